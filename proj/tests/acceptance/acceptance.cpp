// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "agni/calibration.hpp"
#include "agni/costmodel.hpp"
#include "agni/error.hpp"
#include "agni/metrics.hpp"
#include "agni/numformat.hpp"
#include "agni/pipeline.hpp"
#include "agni/schedule.hpp"
#include "agni/sysmodel.hpp"

using namespace agni;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

bool within_factor(double value, double target, double factor) {
  return value >= target / factor && value <= target * factor;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::vector<std::size_t> kAllN = {4, 8, 16, 32, 64, 128, 256};

Outcome iso_latency() {
  Outcome o;
  std::mt19937_64 rng(1);
  for (std::size_t n : kAllN) {
    for (int i = 0; i < 4; ++i) {
      std::vector<Bit> bits(n);
      for (auto& b : bits) b = static_cast<Bit>(rng() & 1u);
      const auto r = convert(TileConfig::defaults(n), StochasticWord(bits));
      o.require(r.latency_ns == 55.0, fmt::format("N={} latency {} ns", n, r.latency_ns));
    }
  }
  if (o.ok) o.detail = "55 ns for N=4..256";
  return o;
}

Outcome schedule_fidelity() {
  // The timing table as printed: 15 entries, each a stamp with its toggles.
  struct Entry {
    Step step;
    double t;
    std::vector<std::pair<Signal, Edge>> toggles;
  };
  const std::vector<Entry> table = {
      {Step::Activate, 0, {{Signal::EQ, Edge::Rise}}},
      {Step::Activate, 5, {{Signal::EQ, Edge::Fall}}},
      {Step::Activate, 7, {{Signal::WL, Edge::Rise}}},
      {Step::Activate, 9, {{Signal::SenseN, Edge::Rise}}},
      {Step::Activate, 12, {{Signal::WL, Edge::Fall}}},
      {Step::StoA, 13, {{Signal::K1, Edge::Rise}}},
      {Step::StoA, 37, {{Signal::K1, Edge::Fall}, {Signal::SenseN, Edge::Fall}}},
      {Step::AtoU, 38, {{Signal::EQ, Edge::Rise}, {Signal::SEL, Edge::Fall}}},
      {Step::AtoU, 42, {{Signal::EQ, Edge::Fall}}},
      {Step::AtoU, 43, {{Signal::B1, Edge::Rise}}},
      {Step::AtoU, 45, {{Signal::SenseN, Edge::Rise}}},
      {Step::UtoB, 45, {{Signal::ISO, Edge::Rise}}},
      {Step::UtoB, 51, {{Signal::L1, Edge::Rise}}},
      {Step::UtoB, 52, {{Signal::L1, Edge::Fall}}},
      {Step::UtoB, 55, {{Signal::B1, Edge::Fall}, {Signal::ISO, Edge::Fall}}},
  };
  Outcome o;
  const auto s = default_schedule();
  std::size_t toggles = 0;
  for (const auto& e : table) {
    const auto& w = s.window(e.step);
    o.require(e.t >= w.start_ns && e.t <= w.end_ns, fmt::format("{} ns outside {}", e.t, to_string(e.step)));
    for (const auto& [sig, edge] : e.toggles) {
      ++toggles;
      const auto times = s.edge_times(sig, edge);
      o.require(std::find(times.begin(), times.end(), e.t) != times.end(),
                fmt::format("missing {} edge at {} ns", to_string(sig), e.t));
    }
  }
  o.require(s.events().size() == toggles, fmt::format("{} events, table has {}", s.events().size(), toggles));
  o.require(validate(s).empty(), "default schedule has violations");
  o.require(s.total_duration_ns() == 55.0, "duration is not 55 ns");
  o.require(to_text(s) == slurp(AGNI_SOURCE_DIR "/tests/golden/default_schedule.txt"), "golden file mismatch");
  if (o.ok) o.detail = fmt::format("{} stamps, {} toggles, golden file identical", table.size(), toggles);
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::size_t checked = 0, saturated = 0;
  auto check = [&](const Converter& conv, const StochasticWord& w) {
    const auto r = conv.convert(w, 1);
    if (r.saturated) {
      ++saturated;
      o.require(popcount(w) == w.size(), "saturation flagged on a non all-ones operand");
      return;
    }
    ++checked;
    o.require(r.binary == stob_oracle(w), fmt::format("N={} operand {} mismatch", w.size(), bit_string(w.bits())));
  };
  for (std::size_t n : {4, 8}) {
    const Converter conv(TileConfig::defaults(n));
    for (unsigned v = 0; v < (1u << n); ++v) {
      std::vector<Bit> bits(n);
      for (std::size_t j = 0; j < n; ++j) bits[j] = (v >> j) & 1u;
      check(conv, StochasticWord(bits));
    }
  }
  std::mt19937_64 rng(2024);
  for (std::size_t n : {16, 32, 64}) {
    const Converter conv(TileConfig::defaults(n));
    for (int i = 0; i < 10'000; ++i) {
      std::vector<Bit> bits(n);
      for (auto& b : bits) b = static_cast<Bit>(rng() & 1u);
      check(conv, StochasticWord(bits));
    }
  }
  if (o.ok) o.detail = fmt::format("{} conversions equal the oracle, {} saturated excluded", checked, saturated);
  return o;
}

double modeled_vmax_mv(std::size_t n, const AnalogParams& p) {
  auto cfg = TileConfig::defaults(n);
  cfg.analog = p;
  return cfg.v_max() * 1e3;
}

Outcome vmax_calibration() {
  Outcome o;
  const std::map<std::size_t, double> targets = {{16, 630}, {32, 715}, {64, 735}, {128, 755}, {256, 785}};
  const auto cal = calibrate(targets, {.mode = CalibrationMode::Auto, .window_ns = 24.0});
  double worst = 0.0;
  for (const auto& [n, mv] : targets) {
    const double model = modeled_vmax_mv(n, cal.for_n(n));
    const double rel = std::abs(model - mv) / mv;
    worst = std::max(worst, rel);
    o.require(rel <= 0.10, fmt::format("N={} modeled {:.1f} mV vs {} mV", n, model, mv));
  }
  const auto single = calibrate({{4, 514.0}}, {.window_ns = 24.0});
  const double v4 = modeled_vmax_mv(4, single.for_n(4));
  o.require(std::abs(v4 - 514.0) / 514.0 <= 0.05, fmt::format("N=4 modeled {:.1f} mV", v4));
  if (o.ok) {
    o.detail = fmt::format("mode {}, worst residual {:.2g}%, N=4 {:.1f} mV", to_string(cal.mode), worst * 100, v4);
  }
  return o;
}

Outcome monotone_levels() {
  Outcome o;
  std::string gaps;
  for (std::size_t n : kAllN) {
    const Converter conv(TileConfig::defaults(n));
    double min_gap = INFINITY;
    double prev = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      std::vector<Bit> bits(n, 0);
      std::fill(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(k), 1);
      auto run = conv.start(StochasticWord(bits), 1);
      run.step1_activate();
      const double lane = run.step2_stoa().lane_v;
      if (k > 0) min_gap = std::min(min_gap, lane - prev);
      prev = lane;
    }
    o.require(min_gap > 0.0, fmt::format("N={} min gap {} V", n, min_gap));
    gaps += fmt::format("{}{}:{:.3g}mV", gaps.empty() ? "" : " ", n, min_gap * 1e3);
  }
  if (o.ok) o.detail = "min adjacent gap " + gaps;
  return o;
}

Outcome error_metrics() {
  Outcome o;
  const auto fit = fit_sigma(TileConfig::defaults(16), 3.58, SweepMode::exhaustive(), {.seed = 1});
  const auto& r = fit.report;
  o.require(r.mape_pct >= 1.8 && r.mape_pct <= 7.2, fmt::format("MAPE {:.3f}%", r.mape_pct));
  o.require(within_factor(r.mae, 0.28, 2.0), fmt::format("MAE {:.3f}", r.mae));
  o.require(r.rmse >= r.mae, "RMSE < MAE");
  for (std::size_t n : {4, 8, 16}) {
    auto cfg = TileConfig::defaults(n);
    cfg.analog.noise_sigma_mv = 0.0;
    const auto q = sweep(cfg, SweepMode::exhaustive());
    o.require(q.mae == 0.0 && q.mape_pct == 0.0 && q.rmse == 0.0, fmt::format("N={} nonzero at sigma 0", n));
  }
  if (o.ok) {
    o.detail = fmt::format("sigma {:.2f} mV: MAPE {:.2f}%, MAE {:.3f}, RMSE {:.3f}", fit.sigma_mv, r.mape_pct, r.mae,
                           r.rmse);
  }
  return o;
}

Outcome layout_overhead() {
  Outcome o;
  const LayoutModel l;
  o.require(l.agni_added_height_f() == 164.0, fmt::format("height {}F", l.agni_added_height_f()));
  o.require(l.agni_area_overhead_f2() == 492.0, fmt::format("area {}F^2", l.agni_area_overhead_f2()));
  const double cells[5][4] = {{16, 0.0087, 1.30e-9, 3.91e-9},
                              {32, 0.0186, 2.74e-9, 8.22e-9},
                              {64, 0.038, 5.55e-9, 1.67e-8},
                              {128, 0.077, 1.12e-8, 3.37e-8},
                              {256, 0.158, 2.28e-8, 6.85e-8}};
  int matched = 0;
  for (const auto& c : cells) {
    const auto r = ChargePumpTable::standard().lookup(c[0]);
    for (auto [got, want] : {std::pair{r.area_um2, c[1]}, {r.dyn_power_w, c[2]}, {r.wasted_power_w, c[3]}}) {
      o.require(got == want, fmt::format("N={} cell {} != {}", c[0], got, want));
      matched += got == want;
    }
  }
  if (o.ok) o.detail = fmt::format("164F, 492F^2, {}/15 charge-pump cells", matched);
  return o;
}

Outcome comparative_ratios() {
  struct Anchor {
    Design d;
    std::size_t n;
    double area, area_latency, edp;
  };
  const std::vector<Anchor> anchors = {{Design::ParallelPC, 16, 390, 21, 28},
                                       {Design::ParallelPC, 256, 923, 247, 350},
                                       {Design::SerialPC, 16, 8, 23, 59},
                                       {Design::SerialPC, 256, 96, 333, 930}};
  Outcome o;
  const CostModel model(load_baselines(AGNI_SOURCE_DIR "/config/baselines.json"));
  double worst = 1.0;
  for (const auto& a : anchors) {
    const auto r = advantage(model.cost(Design::AGNI, a.n), model.cost(a.d, a.n));
    for (auto [got, want] : {std::pair{r.area, a.area}, {r.area_latency, a.area_latency}, {r.edp, a.edp}}) {
      worst = std::max({worst, got / want, want / got});
      o.require(within_factor(got, want, 1.5),
                fmt::format("{} N={} ratio {:.1f} vs {}", to_string(a.d), a.n, got, want));
    }
  }
  const std::vector<std::size_t> ns = {16, 32, 64, 128, 256};
  const auto rows = compare(ns, model);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto &p = rows[i - 1], &c = rows[i];
    o.require(c.vs_ppc.area >= p.vs_ppc.area && c.vs_ppc.area_latency >= p.vs_ppc.area_latency &&
                  c.vs_ppc.edp >= p.vs_ppc.edp && c.vs_spc.area >= p.vs_spc.area &&
                  c.vs_spc.area_latency >= p.vs_spc.area_latency && c.vs_spc.edp >= p.vs_spc.edp,
              fmt::format("ratio decreases from N={} to N={}", p.n, c.n));
  }
  if (o.ok) o.detail = fmt::format("worst factor {:.3f}, six families non-decreasing", worst);
  return o;
}

Outcome system_aggregates() {
  Outcome o;
  const auto models = load_models(AGNI_SOURCE_DIR "/data/models");
  o.require(models.size() == 4, fmt::format("{} model specs", models.size()));
  std::vector<PimSystemConfig> variants;
  for (Design d : {Design::AGNI, Design::ParallelPC, Design::SerialPC}) {
    variants.push_back({.tiles = 1024, .l = 512, .n = 256, .backend = d});
  }
  const auto rep = report(models, variants);
  const double lat_spc = rep.latency_advantage(0, 2);
  const double edp_ppc = rep.edp_advantage(0, 1);
  const double edp_spc = rep.edp_advantage(0, 2);
  o.require(lat_spc >= 2.0 && lat_spc <= 8.0, fmt::format("latency advantage vs SerialPC {:.2f}", lat_spc));
  o.require(within_factor(edp_ppc, 397, 2.0), fmt::format("EDP advantage vs ParallelPC {:.1f}", edp_ppc));
  o.require(within_factor(edp_spc, 1048, 2.0), fmt::format("EDP advantage vs SerialPC {:.1f}", edp_spc));

  auto model_index = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(rep.models.begin(), rep.models.end(), name) - rep.models.begin());
  };
  const std::size_t inception = model_index("Inception_V3");
  const std::size_t shuffle = model_index("ShuffleNet_V2");
  o.require(inception < rep.models.size() && shuffle < rep.models.size(), "anchor models missing");
  if (o.ok) {
    o.require(rep.latency_norm[inception][1] == 1.0, "latency anchor is not 1.0");
    o.require(rep.edp_norm[shuffle][0] == 1.0, "EDP anchor is not 1.0");
  }
  if (o.ok) {
    o.detail = fmt::format("latency vs SPC {:.2f}x, EDP vs PPC {:.0f}x, vs SPC {:.0f}x", lat_spc, edp_ppc, edp_spc);
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  auto outputs = [](unsigned workers) {
    std::string all;
    auto cfg = TileConfig::defaults(16);
    cfg.analog.noise_sigma_mv = 9.0;
    const SweepOptions opts{.workers = workers, .seed = 7};
    const std::vector<ErrorReport> reps = {sweep(cfg, SweepMode::exhaustive(), opts),
                                           sweep(TileConfig::defaults(32), SweepMode::sample(5000), opts)};
    for (const auto& r : reps) all += to_json(r).dump(2);
    all += to_csv(reps);

    auto tcfg = TileConfig::defaults(8);
    tcfg.analog.noise_sigma_mv = 20.0;
    tcfg.trace = true;
    all += emit_trace(convert(tcfg, StochasticWord::parse("10110010"), 3)).to_csv();

    const std::vector<std::size_t> ns = {16, 64, 256};
    all += comparison_csv(compare(ns));
    const auto models = load_models(AGNI_SOURCE_DIR "/data/models");
    const std::vector<PimSystemConfig> v = {{.backend = Design::AGNI}, {.backend = Design::SerialPC}};
    const auto rep = report(models, v);
    all += to_json(rep).dump(2) + report_csv(rep);
    return all;
  };
  const auto a = outputs(1);
  const auto b = outputs(1);
  const auto c = outputs(3);
  o.require(a == b, "repeated runs differ");
  o.require(a == c, "worker count changes the output");
  if (o.ok) o.detail = fmt::format("{} bytes identical across 3 runs", a.size());
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "iso-latency", 1, iso_latency},
      {2, "schedule fidelity", 1, schedule_fidelity},
      {3, "oracle equivalence", 60, oracle_equivalence},
      {4, "V_MAX calibration", 10, vmax_calibration},
      {5, "monotone analog levels", 10, monotone_levels},
      {6, "error-metric reproduction", 120, error_metrics},
      {7, "layout overhead", 1, layout_overhead},
      {8, "comparative ratios", 1, comparative_ratios},
      {9, "system-level aggregates", 10, system_aggregates},
      {10, "determinism", 60, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) o.require(false, fmt::format("runtime over the {} s budget; {}", c.budget_s, o.detail));
    failed += !o.ok;
    std::printf("%s criterion %d: %s: %s (%.2f s)\n", o.ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
