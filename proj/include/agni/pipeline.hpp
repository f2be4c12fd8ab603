#pragma once

// Four-step stochastic-to-binary conversion of one BLgroup, driven by replaying
// a SignalSchedule into the analog model:
//
//   Activate  operand read into the sense amplifiers (EQ, WL, sense_n)
//   S_to_A    latched '1' amplifiers charge the LANE (K1)
//   A_to_U    amplifiers re-used as comparators against the ladder (EQ, SEL, B1, sense_n)
//   U_to_B    priority encoder output latched (ISO, L1)
//
// Edges sharing a time stamp are applied as one batch; the actions they
// trigger are then evaluated in the order precharge, cell share, lane share,
// sense, latch.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "agni/analog.hpp"
#include "agni/numformat.hpp"
#include "agni/schedule.hpp"
#include "agni/trace.hpp"
#include "json.hpp"

namespace agni {

enum class LadderKind {
  LevelMatched,  // taps halfway between adjacent modeled LANE levels
  Uniform,       // taps at (i + 0.5) * v_max / N
};

struct TileConfig {
  std::size_t n = 4;
  std::size_t l = 512;
  AnalogParams analog{};
  SignalSchedule schedule = default_schedule();
  LadderKind ladder = LadderKind::LevelMatched;
  bool trace = false;
  double trace_step_ns = 0.25;

  /// Default schedule and the calibrated analog parameters for n.
  static TileConfig defaults(std::size_t n);

  /// Throws Config (or Schedule for an invalid schedule).
  void validate() const;
  std::size_t groups() const { return l / n; }
  /// LANE voltage after the schedule's charge window with all n drivers.
  double v_max() const;
  /// LANE levels for k = 0..n after the charge window.
  std::vector<double> lane_levels() const;
  ReferenceLadder make_ladder() const;
};

struct ConversionResult {
  StochasticWord input;
  double lane_v_final = 0.0;
  std::vector<Bit> latched;  // pattern seen by the priority encoder
  UnaryWord unary;           // thermometer word of decoded_count ones
  bool bubble = false;       // latched pattern was not a thermometer word
  std::size_t decoded_count = 0;
  BinaryWord binary;
  BinaryWord oracle;
  bool saturated = false;  // oracle count equals N and the encoder clips it
  double latency_ns = 0.0;
  std::uint64_t seed = 0;
  std::optional<WaveformTrace> trace;
};

class Converter;

// One conversion in progress. Steps must be called in order.
class ConversionRun {
 public:
  ConversionRun(const Converter& conv, const StochasticWord& operand, std::uint64_t seed);

  const AnalogState& step1_activate();
  const AnalogState& step2_stoa();
  const AnalogState& step3_atou();
  ConversionResult step4_utob();

  const AnalogState& state() const noexcept { return state_; }
  Level level(Signal s) const;

 private:
  void run_until(double t_end, bool inclusive);
  void advance_to(double t);
  void apply_batch(std::size_t begin, std::size_t end);
  void record_samples(double upto, bool inclusive);
  bool charging() const;
  std::vector<double> selected_refs() const;
  void expect_step(int step);

  const Converter* conv_;
  StochasticWord operand_;
  std::uint64_t seed_;
  AnalogState state_;
  NoiseSource noise_;
  std::array<Level, 9> levels_{};
  std::size_t next_event_ = 0;
  int steps_done_ = 0;
  std::optional<std::vector<Bit>> encoder_input_;
  std::optional<WaveformTrace> trace_;
  std::size_t next_sample_ = 0;
  std::vector<double> sample_times_;
};

// Validated configuration plus the precomputed reference ladder; cheap to
// reuse across many conversions.
class Converter {
 public:
  explicit Converter(TileConfig cfg);

  const TileConfig& config() const noexcept { return cfg_; }
  const ReferenceLadder& ladder() const noexcept { return ladder_; }

  ConversionRun start(const StochasticWord& operand, std::uint64_t seed) const;
  ConversionResult convert(const StochasticWord& operand, std::uint64_t seed) const;
  ConversionResult convert(const StochasticWord& operand) const;

 private:
  TileConfig cfg_;
  ReferenceLadder ladder_;
};

/// Full conversion with the seed in cfg.analog.rng_seed.
ConversionResult convert(const TileConfig& cfg, const StochasticWord& operand);
ConversionResult convert(const TileConfig& cfg, const StochasticWord& operand, std::uint64_t seed);

/// Converts one operand per BLgroup (exactly l / n of them) under one schedule
/// replay. Group g uses seed derive_seed(cfg.analog.rng_seed, g).
std::vector<ConversionResult> convert_tile(const TileConfig& cfg, std::span<const StochasticWord> operands);

/// Throws Unavailable when the conversion ran without tracing.
const WaveformTrace& emit_trace(const ConversionResult& r);

nlohmann::json to_json(const ConversionResult& r);

}  // namespace agni
