#include "agni/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "agni/calibration.hpp"
#include "agni/error.hpp"

namespace agni {

namespace {

constexpr std::array<std::size_t, 7> kSupportedN = {4, 8, 16, 32, 64, 128, 256};

std::size_t idx(Signal s) { return static_cast<std::size_t>(s); }

}  // namespace

TileConfig TileConfig::defaults(std::size_t n) {
  TileConfig cfg;
  cfg.n = n;
  cfg.analog = default_params(n);
  return cfg;
}

void TileConfig::validate() const {
  if (std::find(kSupportedN.begin(), kSupportedN.end(), n) == kSupportedN.end()) {
    throw Error(ErrorKind::Config, fmt::format("N = {} not in {{4, 8, 16, 32, 64, 128, 256}}", n));
  }
  if (l == 0 || l % n != 0) {
    throw Error(ErrorKind::Config, fmt::format("L = {} is not a multiple of N = {}", l, n));
  }
  analog.validate();
  if (trace && !(trace_step_ns > 0.0)) throw Error(ErrorKind::Config, "trace step must be positive");
  const auto violations = agni::validate(schedule);
  if (!violations.empty()) {
    std::string msg = "invalid schedule:";
    for (const auto& v : violations) msg += fmt::format(" [{}] {};", to_string(v.kind), v.message);
    throw Error(ErrorKind::Schedule, msg);
  }
}

double TileConfig::v_max() const { return lane_level(analog, n, schedule.charge_window_ns()); }

std::vector<double> TileConfig::lane_levels() const {
  const double window = schedule.charge_window_ns();
  std::vector<double> levels(n + 1);
  for (std::size_t k = 0; k <= n; ++k) levels[k] = lane_level(analog, k, window);
  return levels;
}

ReferenceLadder TileConfig::make_ladder() const {
  if (ladder == LadderKind::Uniform) return ReferenceLadder::uniform(n, v_max());
  const auto levels = lane_levels();
  return ReferenceLadder::level_matched(levels);
}

Converter::Converter(TileConfig cfg)
    : cfg_((cfg.validate(), std::move(cfg))), ladder_(cfg_.make_ladder()) {}

ConversionRun Converter::start(const StochasticWord& operand, std::uint64_t seed) const {
  return ConversionRun(*this, operand, seed);
}

ConversionResult Converter::convert(const StochasticWord& operand, std::uint64_t seed) const {
  auto run = start(operand, seed);
  run.step1_activate();
  run.step2_stoa();
  run.step3_atou();
  return run.step4_utob();
}

ConversionResult Converter::convert(const StochasticWord& operand) const {
  return convert(operand, cfg_.analog.rng_seed);
}

ConversionRun::ConversionRun(const Converter& conv, const StochasticWord& operand, std::uint64_t seed)
    : conv_(&conv),
      operand_(operand),
      seed_(seed),
      noise_(conv.config().analog.noise_sigma_mv, seed) {
  const auto& cfg = conv.config();
  if (operand.size() != cfg.n) {
    throw Error(ErrorKind::Config, fmt::format("operand has {} bits but N = {}", operand.size(), cfg.n));
  }
  state_ = AnalogState::idle(operand, cfg.analog);
  for (Signal s : kAllSignals) levels_[idx(s)] = initial_level(s);

  if (cfg.trace) {
    const double total = cfg.schedule.total_duration_ns();
    const auto count = static_cast<std::size_t>(std::floor(total / cfg.trace_step_ns + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) sample_times_.push_back(static_cast<double>(k) * cfg.trace_step_ns);
    if (sample_times_.back() < total) sample_times_.push_back(total);

    WaveformTrace tr;
    tr.step_ns = cfg.trace_step_ns;
    tr.times_ns.reserve(sample_times_.size());
    for (Signal s : kAllSignals) tr.series.push_back({std::string(to_string(s)), {}});
    for (std::size_t i = 0; i < cfg.n; ++i) tr.series.push_back({fmt::format("bitline_{}", i), {}});
    for (std::size_t i = 0; i < cfg.n; ++i) tr.series.push_back({fmt::format("cell_{}", i), {}});
    for (std::size_t i = 0; i < cfg.n; ++i) tr.series.push_back({fmt::format("vref_{}", i), {}});
    tr.series.push_back({"lane", {}});
    trace_ = std::move(tr);
  }
}

Level ConversionRun::level(Signal s) const {
  if (s == Signal::SenseP) {
    return levels_[idx(Signal::SenseN)] == Level::On ? Level::Off : Level::On;
  }
  return levels_[idx(s)];
}

bool ConversionRun::charging() const {
  return level(Signal::K1) == Level::On && level(Signal::SenseN) == Level::On;
}

std::vector<double> ConversionRun::selected_refs() const {
  const auto& cfg = conv_->config();
  if (level(Signal::SEL) == Level::On) return std::vector<double>(cfg.n, 0.5 * cfg.analog.vdd);
  const auto taps = conv_->ladder().taps();
  return {taps.begin(), taps.end()};
}

void ConversionRun::record_samples(double upto, bool inclusive) {
  if (!trace_) return;
  const auto& cfg = conv_->config();
  const auto refs = selected_refs();
  while (next_sample_ < sample_times_.size()) {
    const double ts = sample_times_[next_sample_];
    if (inclusive ? ts > upto : ts >= upto) break;
    double lane = state_.lane_v;
    if (charging() && ts > state_.t_ns) {
      lane = lane_charge(state_, state_.latched_ones(), ts - state_.t_ns, cfg.analog).lane_v;
    }
    auto& series = trace_->series;
    std::size_t col = 0;
    for (Signal s : kAllSignals) series[col++].values.push_back(level(s) == Level::On ? 1.0 : 0.0);
    for (double v : state_.bitline_v) series[col++].values.push_back(v);
    for (double v : state_.cell_v) series[col++].values.push_back(v);
    for (double v : refs) series[col++].values.push_back(v);
    series[col].values.push_back(lane);
    trace_->times_ns.push_back(ts);
    ++next_sample_;
  }
}

void ConversionRun::advance_to(double t) {
  record_samples(t, false);
  if (t > state_.t_ns) {
    if (charging()) {
      const std::size_t k_on = state_.latched_ones();
      const double dt = t - state_.t_ns;
      state_ = lane_charge(std::move(state_), k_on, dt, conv_->config().analog);
    }
    state_.t_ns = t;
  }
}

void ConversionRun::apply_batch(std::size_t begin, std::size_t end) {
  const auto& cfg = conv_->config();
  const auto& events = cfg.schedule.events();
  const auto before = levels_;
  for (std::size_t i = begin; i < end; ++i) {
    levels_[idx(events[i].signal)] = events[i].edge == Edge::Rise ? Level::On : Level::Off;
  }
  auto rose = [&](Signal s) { return before[idx(s)] == Level::Off && levels_[idx(s)] == Level::On; };
  auto fell = [&](Signal s) { return before[idx(s)] == Level::On && levels_[idx(s)] == Level::Off; };
  const bool wl_on = level(Signal::WL) == Level::On;
  const bool sensing = level(Signal::SenseN) == Level::On;

  if (level(Signal::EQ) == Level::On) state_ = precharge(std::move(state_), selected_refs());
  if (rose(Signal::WL) && !sensing) state_ = cell_share(std::move(state_), cfg.analog);
  if (rose(Signal::B1)) state_ = lane_share(std::move(state_), cfg.analog);
  if (rose(Signal::SenseN)) {
    state_ = sense_amplify(std::move(state_), selected_refs(), cfg.analog, noise_, wl_on);
  } else if (wl_on && sensing) {
    state_.cell_v = state_.bitline_v;
  }
  if (rose(Signal::L1)) {
    if (level(Signal::ISO) != Level::On) {
      throw Error(ErrorKind::Schedule,
                  fmt::format("L1 rises at {} ns while ISO isolates the encoder", state_.t_ns));
    }
    std::vector<Bit> seen(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) seen[i] = state_.bitline_v[i] > 0.5 * cfg.analog.vdd ? 1 : 0;
    encoder_input_ = std::move(seen);
  }

  if (trace_) {
    const double t = state_.t_ns;
    if (fell(Signal::EQ) && t <= cfg.schedule.window(Step::Activate).end_ns) {
      trace_->glitches.push_back({t, "glitch 1 (EQ fall)"});
    }
    if (fell(Signal::WL)) trace_->glitches.push_back({t, "glitch 2 (WL fall)"});
    if (fell(Signal::B1)) trace_->glitches.push_back({t, "glitch 3 (B1 fall)"});
  }
}

void ConversionRun::run_until(double t_end, bool inclusive) {
  const auto& events = conv_->config().schedule.events();
  while (next_event_ < events.size()) {
    const double t = events[next_event_].t_ns;
    if (inclusive ? t > t_end : t >= t_end) break;
    std::size_t last = next_event_;
    while (last < events.size() && events[last].t_ns == t) ++last;
    advance_to(t);
    apply_batch(next_event_, last);
    next_event_ = last;
    record_samples(t, true);
  }
}

void ConversionRun::expect_step(int step) {
  if (steps_done_ != step - 1) {
    throw Error(ErrorKind::Config,
                fmt::format("step {} requested after step {} (steps run in order)", step, steps_done_));
  }
  steps_done_ = step;
}

const AnalogState& ConversionRun::step1_activate() {
  expect_step(1);
  run_until(conv_->config().schedule.window(Step::Activate).end_ns, true);
  return state_;
}

const AnalogState& ConversionRun::step2_stoa() {
  expect_step(2);
  run_until(conv_->config().schedule.window(Step::StoA).end_ns, true);
  return state_;
}

const AnalogState& ConversionRun::step3_atou() {
  expect_step(3);
  run_until(conv_->config().schedule.window(Step::AtoU).end_ns, true);
  return state_;
}

ConversionResult ConversionRun::step4_utob() {
  expect_step(4);
  const auto& cfg = conv_->config();
  const double total = cfg.schedule.total_duration_ns();
  run_until(total, true);
  advance_to(total);
  record_samples(total, true);

  if (!encoder_input_) {
    throw Error(ErrorKind::Schedule, "schedule never latches the encoder output (no L1 rise)");
  }
  const auto& seen = *encoder_input_;
  const std::size_t position = priority_position(seen);
  BinaryWord binary;
  binary.width = encoder_width(cfg.n);
  binary.value = static_cast<std::uint32_t>(std::min<std::size_t>(position, binary.max_value()));

  ConversionResult r{
      .input = operand_,
      .lane_v_final = state_.lane_v,
      .latched = seen,
      .unary = to_unary(position, cfg.n),
      .bubble = !is_thermometer(seen),
      .decoded_count = position,
      .binary = binary,
      .oracle = stob_oracle(operand_),
      .saturated = saturates(popcount(operand_), cfg.n),
      .latency_ns = total,
      .seed = seed_,
      .trace = std::move(trace_),
  };
  return r;
}

ConversionResult convert(const TileConfig& cfg, const StochasticWord& operand) {
  return Converter(cfg).convert(operand);
}

ConversionResult convert(const TileConfig& cfg, const StochasticWord& operand, std::uint64_t seed) {
  return Converter(cfg).convert(operand, seed);
}

std::vector<ConversionResult> convert_tile(const TileConfig& cfg, std::span<const StochasticWord> operands) {
  const Converter conv(cfg);
  if (operands.size() != cfg.groups()) {
    throw Error(ErrorKind::Config, fmt::format("tile with L = {}, N = {} needs {} operands, got {}", cfg.l,
                                               cfg.n, cfg.groups(), operands.size()));
  }
  std::vector<ConversionResult> out;
  out.reserve(operands.size());
  for (std::size_t g = 0; g < operands.size(); ++g) {
    out.push_back(conv.convert(operands[g], derive_seed(cfg.analog.rng_seed, g)));
  }
  return out;
}

const WaveformTrace& emit_trace(const ConversionResult& r) {
  if (!r.trace) throw Error(ErrorKind::Unavailable, "conversion ran without tracing enabled");
  return *r.trace;
}

nlohmann::json to_json(const ConversionResult& r) {
  nlohmann::json j;
  j["n"] = r.input.size();
  j["operand"] = bit_string(r.input.bits());
  j["bit_order"] = "index0=left";
  j["ones"] = popcount(r.input);
  j["lane_v_final"] = r.lane_v_final;
  j["latched"] = bit_string(r.latched);
  j["unary"] = bit_string(r.unary.bits());
  j["bubble"] = r.bubble;
  j["decoded_count"] = r.decoded_count;
  j["binary"] = r.binary.value;
  j["binary_width"] = r.binary.width;
  j["oracle"] = r.oracle.value;
  j["match"] = r.binary == r.oracle;
  j["saturated"] = r.saturated;
  j["latency_ns"] = r.latency_ns;
  j["seed"] = r.seed;
  return j;
}

}  // namespace agni
