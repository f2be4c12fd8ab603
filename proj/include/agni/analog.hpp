#pragma once

// First-order behavioral model of one BLgroup: DRAM cells, bitlines, sense
// amplifiers, the analog LANE capacitor and the reference ladder.
//
// All voltages are in volts. The LANE charges as a single-pole RC driven by
// the k sense amplifiers latched to '1':
//
//   v(t + d) = v_sat - (v_sat - v(t)) * exp(-k * d / (tau_ns * c_ratio_lane_bl))
//
// which from an empty LANE is v_sat * (1 - exp(-k d / (tau c))). Noise enters
// only at comparator decisions.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "agni/numformat.hpp"

namespace agni {

struct AnalogParams {
  double vdd = 1.2;
  double v_sat = 1.0;            // LANE ceiling after the S_to_A diode drop
  double tau_ns = 100.0;         // single-driver time constant
  double c_ratio_cell_bl = 0.5;  // C_cell / C_bitline
  double c_ratio_lane_bl = 1.0;  // C_lane / C_bitline
  double c_bitline_ff = 10.0;    // absolute bitline capacitance, used for energy
  double noise_sigma_mv = 0.0;
  std::uint64_t rng_seed = 1;

  /// Throws Config when an invariant does not hold.
  void validate() const;

  friend bool operator==(const AnalogParams&, const AnalogParams&) = default;
};

struct AnalogState {
  double t_ns = 0.0;
  std::vector<double> bitline_v;
  std::vector<double> cell_v;
  double lane_v = 0.0;
  std::vector<std::optional<Bit>> sa_latched;

  /// Idle BLgroup holding `operand` in its cells, bitlines at vdd/2, LANE empty.
  static AnalogState idle(const StochasticWord& operand, const AnalogParams& p);

  std::size_t size() const noexcept { return bitline_v.size(); }
  /// Number of sense amplifiers currently latched to '1'.
  std::size_t latched_ones() const noexcept;
  /// Latched pattern with unlatched amplifiers read as 0.
  std::vector<Bit> latched_bits() const;

  friend bool operator==(const AnalogState&, const AnalogState&) = default;
};

class ReferenceLadder {
 public:
  /// taps[i] = (i + 0.5) * v_max / n.
  static ReferenceLadder uniform(std::size_t n, double v_max);

  /// taps[i] halfway between LANE levels i and i + 1; levels must have n + 1
  /// strictly increasing entries starting at level 0.
  static ReferenceLadder level_matched(std::span<const double> levels);

  std::size_t size() const noexcept { return taps_.size(); }
  double v_max() const noexcept { return v_max_; }
  std::span<const double> taps() const noexcept { return taps_; }

 private:
  ReferenceLadder(double v_max, std::vector<double> taps) : v_max_(v_max), taps_(std::move(taps)) {}
  double v_max_ = 0.0;
  std::vector<double> taps_;
};

// Gaussian comparator noise from a seeded 64-bit Mersenne twister.
class NoiseSource {
 public:
  NoiseSource(double sigma_mv, std::uint64_t seed) : sigma_v_(sigma_mv * 1e-3), engine_(seed) {}

  /// One draw in volts; returns 0 without consuming the engine when sigma is 0.
  double draw();
  double sigma_v() const noexcept { return sigma_v_; }

 private:
  double sigma_v_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Deterministic per-item seed derivation (splitmix64 finalizer over base and index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

AnalogState precharge(AnalogState state, double v_ref);
AnalogState precharge(AnalogState state, std::span<const double> v_refs);

/// Word line ON: each bitline and its cell settle to their capacitive average.
AnalogState cell_share(AnalogState state, const AnalogParams& p);

/// Each amplifier latches 1 and drives vdd when bitline > ref + noise, otherwise
/// latches 0 and drives ground. With the word line ON the cells follow.
AnalogState sense_amplify(AnalogState state, std::span<const double> refs, const AnalogParams& p,
                          NoiseSource& noise, bool word_line_on);

/// LANE charging by k_on latched-'1' amplifiers for duration_ns. Throws Range when k_on > N.
AnalogState lane_charge(AnalogState state, std::size_t k_on, double duration_ns, const AnalogParams& p);

/// LANE voltage reached from an empty LANE with k drivers after duration_ns.
double lane_level(const AnalogParams& p, std::size_t k, double duration_ns);

/// B1 ON: every bitline moves toward the LANE voltage through the C_lane/C_bl divider.
AnalogState lane_share(AnalogState state, const AnalogParams& p);

}  // namespace agni
