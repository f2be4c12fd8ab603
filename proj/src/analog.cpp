#include "agni/analog.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "agni/error.hpp"

namespace agni {

void AnalogParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::Config, fmt::format("{} must be positive (got {})", name, v));
    }
  };
  positive(vdd, "vdd_v");
  positive(v_sat, "v_sat_v");
  positive(tau_ns, "tau_ns");
  positive(c_ratio_cell_bl, "c_ratio_cell_bl");
  positive(c_ratio_lane_bl, "c_ratio_lane_bl");
  positive(c_bitline_ff, "c_bitline_ff");
  if (!(v_sat < vdd)) {
    throw Error(ErrorKind::Config, fmt::format("v_sat ({} V) must stay below vdd ({} V)", v_sat, vdd));
  }
  if (!(noise_sigma_mv >= 0.0) || !std::isfinite(noise_sigma_mv)) {
    throw Error(ErrorKind::Config, fmt::format("noise_sigma_mv must be >= 0 (got {})", noise_sigma_mv));
  }
}

AnalogState AnalogState::idle(const StochasticWord& operand, const AnalogParams& p) {
  AnalogState s;
  const std::size_t n = operand.size();
  s.bitline_v.assign(n, 0.5 * p.vdd);
  s.cell_v.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.cell_v[i] = operand[i] ? p.vdd : 0.0;
  s.sa_latched.assign(n, std::nullopt);
  return s;
}

std::size_t AnalogState::latched_ones() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(sa_latched.begin(), sa_latched.end(), [](auto b) { return b && *b == 1; }));
}

std::vector<Bit> AnalogState::latched_bits() const {
  std::vector<Bit> out(sa_latched.size());
  std::transform(sa_latched.begin(), sa_latched.end(), out.begin(),
                 [](auto b) { return b.value_or(Bit{0}); });
  return out;
}

ReferenceLadder ReferenceLadder::uniform(std::size_t n, double v_max) {
  if (n == 0 || !(v_max > 0.0)) throw Error(ErrorKind::Config, "ladder needs n >= 1 and v_max > 0");
  std::vector<double> taps(n);
  for (std::size_t i = 0; i < n; ++i) {
    taps[i] = (static_cast<double>(i) + 0.5) * v_max / static_cast<double>(n);
  }
  return ReferenceLadder(v_max, std::move(taps));
}

ReferenceLadder ReferenceLadder::level_matched(std::span<const double> levels) {
  if (levels.size() < 2) throw Error(ErrorKind::Config, "ladder needs at least two levels");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i] > levels[i - 1])) {
      throw Error(ErrorKind::Config,
                  fmt::format("LANE levels {} and {} are not strictly increasing", i - 1, i));
    }
  }
  std::vector<double> taps(levels.size() - 1);
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) taps[i] = 0.5 * (levels[i] + levels[i + 1]);
  return ReferenceLadder(levels.back(), std::move(taps));
}

double NoiseSource::draw() {
  if (sigma_v_ == 0.0) return 0.0;
  return sigma_v_ * normal_(engine_);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

AnalogState precharge(AnalogState state, double v_ref) {
  std::fill(state.bitline_v.begin(), state.bitline_v.end(), v_ref);
  return state;
}

AnalogState precharge(AnalogState state, std::span<const double> v_refs) {
  if (v_refs.size() != state.size()) {
    throw Error(ErrorKind::Config, fmt::format("{} references for {} bitlines", v_refs.size(), state.size()));
  }
  std::copy(v_refs.begin(), v_refs.end(), state.bitline_v.begin());
  return state;
}

AnalogState cell_share(AnalogState state, const AnalogParams& p) {
  const double c = p.c_ratio_cell_bl;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double shared = (state.bitline_v[i] + c * state.cell_v[i]) / (1.0 + c);
    state.bitline_v[i] = shared;
    state.cell_v[i] = shared;
  }
  return state;
}

AnalogState sense_amplify(AnalogState state, std::span<const double> refs, const AnalogParams& p,
                          NoiseSource& noise, bool word_line_on) {
  if (refs.size() != state.size()) {
    throw Error(ErrorKind::Config, fmt::format("{} references for {} amplifiers", refs.size(), state.size()));
  }
  for (std::size_t i = 0; i < state.size(); ++i) {
    // Strict comparison: a bitline sitting exactly on its reference latches 0.
    const bool one = state.bitline_v[i] > refs[i] + noise.draw();
    state.sa_latched[i] = one ? Bit{1} : Bit{0};
    state.bitline_v[i] = one ? p.vdd : 0.0;
    if (word_line_on) state.cell_v[i] = state.bitline_v[i];
  }
  return state;
}

AnalogState lane_charge(AnalogState state, std::size_t k_on, double duration_ns, const AnalogParams& p) {
  if (k_on > state.size()) {
    throw Error(ErrorKind::Range, fmt::format("{} drivers on a {}-bit BLgroup", k_on, state.size()));
  }
  if (k_on == 0 || duration_ns <= 0.0) return state;
  const double rate = static_cast<double>(k_on) / (p.tau_ns * p.c_ratio_lane_bl);
  state.lane_v += (p.v_sat - state.lane_v) * -std::expm1(-rate * duration_ns);
  return state;
}

double lane_level(const AnalogParams& p, std::size_t k, double duration_ns) {
  const double rate = static_cast<double>(k) / (p.tau_ns * p.c_ratio_lane_bl);
  return p.v_sat * -std::expm1(-rate * duration_ns);
}

AnalogState lane_share(AnalogState state, const AnalogParams& p) {
  const double c = p.c_ratio_lane_bl;
  for (double& bl : state.bitline_v) bl = (bl + c * state.lane_v) / (1.0 + c);
  return state;
}

}  // namespace agni
