#include "agni/costmodel.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "agni/error.hpp"

namespace agni {

std::string_view to_string(Design d) {
  switch (d) {
    case Design::AGNI: return "AGNI";
    case Design::ParallelPC: return "ParallelPC";
    case Design::SerialPC: return "SerialPC";
  }
  return "unknown";
}

Design parse_design(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "agni") return Design::AGNI;
  if (lower == "ppc" || lower == "parallelpc" || lower == "parallel") return Design::ParallelPC;
  if (lower == "spc" || lower == "serialpc" || lower == "serial") return Design::SerialPC;
  throw Error(ErrorKind::Config, fmt::format("unknown design '{}' (expected agni, ppc or spc)", s));
}

double LayoutModel::agni_added_height_f() const {
  double h = 0.0;
  for (const char* k : {"s_to_a", "a_to_u", "u_to_b"}) {
    const auto it = strip_heights_f.find(k);
    if (it == strip_heights_f.end()) throw Error(ErrorKind::Config, fmt::format("layout has no strip '{}'", k));
    h += it->second;
  }
  return h;
}

double LayoutModel::agni_area_overhead_f2() const { return agni_added_height_f() * bitline_pitch_f; }

double LayoutModel::f2_um2() const {
  const double f_um = feature_f_nm * 1e-3;
  return f_um * f_um;
}

// ---- charge pump -----------------------------------------------------------

const ChargePumpTable& ChargePumpTable::standard() {
  static const ChargePumpTable t({
      {16, {0.0087, 1.30e-9, 3.91e-9}},
      {32, {0.0186, 2.74e-9, 8.22e-9}},
      {64, {0.038, 5.55e-9, 1.67e-8}},
      {128, {0.077, 1.12e-8, 3.37e-8}},
      {256, {0.158, 2.28e-8, 6.85e-8}},
  });
  return t;
}

ChargePumpTable::ChargePumpTable(std::map<std::size_t, ChargePumpRow> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw Error(ErrorKind::Config, "charge pump table is empty");
  const ChargePumpRow* prev = nullptr;
  for (const auto& [n, row] : rows_) {
    if (!(row.area_um2 > 0 && row.dyn_power_w > 0 && row.wasted_power_w > 0)) {
      throw Error(ErrorKind::Config, fmt::format("charge pump row N={} has a non-positive value", n));
    }
    if (prev && !(row.area_um2 > prev->area_um2 && row.dyn_power_w > prev->dyn_power_w &&
                  row.wasted_power_w > prev->wasted_power_w)) {
      throw Error(ErrorKind::Config, fmt::format("charge pump row N={} does not increase over the previous row", n));
    }
    prev = &row;
  }
}

double ChargePumpTable::min_n() const { return static_cast<double>(rows_.begin()->first); }
double ChargePumpTable::max_n() const { return static_cast<double>(rows_.rbegin()->first); }

ChargePumpRow ChargePumpTable::lookup(double n) const {
  if (!(n >= min_n() && n <= max_n())) {
    throw Error(ErrorKind::InterpolationRange,
                fmt::format("charge pump lookup at N={} outside the table range [{}, {}]", n, min_n(), max_n()));
  }
  auto hi = rows_.lower_bound(static_cast<std::size_t>(std::ceil(n)));
  if (static_cast<double>(hi->first) == n) return hi->second;
  auto lo = std::prev(hi);
  const double x = (std::log(n) - std::log(static_cast<double>(lo->first))) /
                   (std::log(static_cast<double>(hi->first)) - std::log(static_cast<double>(lo->first)));
  auto interp = [x](double a, double b) { return std::exp(std::log(a) + x * (std::log(b) - std::log(a))); };
  return {interp(lo->second.area_um2, hi->second.area_um2), interp(lo->second.dyn_power_w, hi->second.dyn_power_w),
          interp(lo->second.wasted_power_w, hi->second.wasted_power_w)};
}

// ---- reports -----------------------------------------------------------------

CostReport make_report(Design d, std::size_t n, double area_f2, double latency_ns, double energy_j,
                       const LayoutModel& layout) {
  if (!(area_f2 > 0 && latency_ns > 0 && energy_j > 0)) {
    throw Error(ErrorKind::Config, fmt::format("{} cost at N={} is not positive", to_string(d), n));
  }
  CostReport r;
  r.design = d;
  r.n = n;
  r.area_f2 = area_f2;
  r.area_um2 = area_f2 * layout.f2_um2();
  r.latency_ns = latency_ns;
  r.energy_j = energy_j;
  r.edp = energy_j * latency_ns;
  r.area_latency = area_f2 * latency_ns;
  return r;
}

namespace {

std::size_t rises(const SignalSchedule& s, Signal sig) { return s.edge_times(sig, Edge::Rise).size(); }

void require_pow2(std::size_t n) {
  if (n < 2 || !std::has_single_bit(n)) {
    throw Error(ErrorKind::Config, fmt::format("N={} is not a power of two >= 2", n));
  }
}

double log2n(std::size_t n) { return std::log2(static_cast<double>(n)); }

}  // namespace

AgniEnergyBreakdown agni_energy(const TileConfig& cfg, const ChargePumpTable& cp) {
  cfg.validate();
  const auto& a = cfg.analog;
  const auto& s = cfg.schedule;
  const double n = static_cast<double>(cfg.n);
  const double c_bl = a.c_bitline_ff * 1e-15;
  const double vdd2 = a.vdd * a.vdd;

  AgniEnergyBreakdown e;
  e.precharge_j = static_cast<double>(rises(s, Signal::EQ)) * n * c_bl * vdd2 / 4.0;
  e.sense_j = static_cast<double>(rises(s, Signal::SenseN)) * n * c_bl * vdd2 / 2.0;
  e.restore_j = static_cast<double>(rises(s, Signal::WL)) * n * a.c_ratio_cell_bl * c_bl * vdd2 / 2.0;
  e.lane_j = a.c_ratio_lane_bl * c_bl * cfg.v_max() * a.vdd;
  e.latch_j = static_cast<double>(rises(s, Signal::L1)) * log2n(cfg.n) * kLatchGateEnergyJ;
  e.charge_pump_j = cp.lookup(n).dyn_power_w * s.total_duration_ns() * 1e-9;
  e.total_j = e.precharge_j + e.sense_j + e.restore_j + e.lane_j + e.latch_j + e.charge_pump_j;
  return e;
}

CostReport agni_cost(const TileConfig& cfg, const LayoutModel& layout, const ChargePumpTable& cp) {
  const auto e = agni_energy(cfg, cp);
  const double area_f2 =
      layout.agni_area_overhead_f2() * static_cast<double>(cfg.n) + cp.lookup(static_cast<double>(cfg.n)).area_um2 /
                                                                         layout.f2_um2();
  return make_report(Design::AGNI, cfg.n, area_f2, cfg.schedule.total_duration_ns(), e.total_j, layout);
}

CostReport agni_cost(std::size_t n) { return agni_cost(TileConfig::defaults(n)); }

std::size_t full_adder_count(std::size_t n) {
  require_pow2(n);
  return n - static_cast<std::size_t>(std::countr_zero(n)) - 1;
}

CostReport parallel_pc_cost(std::size_t n, const ParallelPcConstants& c, const LayoutModel& layout) {
  const double fa = static_cast<double>(full_adder_count(n));
  const double lg = log2n(n);
  const double route = static_cast<double>(n) * lg * lg;
  return make_report(Design::ParallelPC, n, c.a_fa_f2 * fa + c.a_route_f2 * route, c.t_stage_ns * lg,
                     c.e_fa_j * fa + c.e_route_j * route, layout);
}

CostReport serial_pc_cost(std::size_t n, const SerialPcConstants& c, const LayoutModel& layout) {
  require_pow2(n);
  const double nn = static_cast<double>(n);
  return make_report(Design::SerialPC, n, c.a_cnt_f2 * (log2n(n) + 1.0) + c.a_track_f2 * nn * nn,
                     c.l0_ns + nn * c.t_clk_ns, nn * (c.e_cnt_j + c.e_wire_j * nn), layout);
}

const BaselineConstants& builtin_baselines() {
  static const BaselineConstants c{
      {
          .a_fa_f2 = 24220.814615159394,
          .a_route_f2 = 8533.5726780077439,
          .t_stage_ns = 1.167110886137084,
          .e_fa_j = 3.6644401389077727e-14,
          .e_route_j = 6.5680602911886602e-13,
      },
      {
          .a_cnt_f2 = 3184.5772438592176,
          .a_track_f2 = 184.04704690740806,
          .l0_ns = 155.69919931742584,
          .t_clk_ns = 0.13812799896027905,
          .e_cnt_j = 1.158107848410401e-13,
          .e_wire_j = 2.5936085814222107e-14,
      },
  };
  return c;
}

CostModel::CostModel(BaselineConstants baselines, LayoutModel layout, ChargePumpTable cp)
    : baselines_(baselines), layout_(std::move(layout)), cp_(std::move(cp)) {}

CostReport CostModel::cost(Design d, std::size_t n) const {
  switch (d) {
    case Design::AGNI: return agni_cost(TileConfig::defaults(n), layout_, cp_);
    case Design::ParallelPC: return parallel_pc_cost(n, baselines_.ppc, layout_);
    case Design::SerialPC: return serial_pc_cost(n, baselines_.spc, layout_);
  }
  throw Error(ErrorKind::Config, "unknown design");
}

Ratios advantage(const CostReport& agni, const CostReport& baseline) {
  return {baseline.area_f2 / agni.area_f2, baseline.area_latency / agni.area_latency, baseline.edp / agni.edp};
}

std::vector<ComparisonRow> compare(std::span<const std::size_t> ns, const CostModel& model) {
  if (ns.empty()) throw Error(ErrorKind::Config, "compare needs at least one N");
  std::vector<ComparisonRow> rows;
  rows.reserve(ns.size());
  for (std::size_t n : ns) {
    ComparisonRow row;
    row.n = n;
    row.agni = model.cost(Design::AGNI, n);
    row.ppc = model.cost(Design::ParallelPC, n);
    row.spc = model.cost(Design::SerialPC, n);
    row.vs_ppc = advantage(row.agni, row.ppc);
    row.vs_spc = advantage(row.agni, row.spc);
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json to_json(const CostReport& r) {
  return {{"design", to_string(r.design)}, {"n", r.n},
          {"area_f2", r.area_f2},          {"area_um2", r.area_um2},
          {"latency_ns", r.latency_ns},    {"energy_j", r.energy_j},
          {"edp", r.edp},                  {"area_latency", r.area_latency}};
}

namespace {

nlohmann::json ratios_json(const Ratios& r) {
  return {{"area", r.area}, {"area_latency", r.area_latency}, {"edp", r.edp}};
}

}  // namespace

nlohmann::json to_json(std::span<const ComparisonRow> rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : rows) {
    out.push_back({{"n", row.n},
                   {"agni", to_json(row.agni)},
                   {"parallel_pc", to_json(row.ppc)},
                   {"serial_pc", to_json(row.spc)},
                   {"advantage_vs_parallel_pc", ratios_json(row.vs_ppc)},
                   {"advantage_vs_serial_pc", ratios_json(row.vs_spc)}});
  }
  return out;
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
  std::string out = "n,design,area_f2,area_um2,latency_ns,energy_j,edp,area_latency,adv_area,adv_area_latency,adv_edp\n";
  for (const auto& row : rows) {
    auto line = [&](const CostReport& r, const Ratios& adv) {
      out += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.n,
                         to_string(r.design), r.area_f2, r.area_um2, r.latency_ns, r.energy_j, r.edp, r.area_latency,
                         adv.area, adv.area_latency, adv.edp);
    };
    line(row.agni, Ratios{1.0, 1.0, 1.0});
    line(row.ppc, row.vs_ppc);
    line(row.spc, row.vs_spc);
  }
  return out;
}

std::string comparison_table(std::span<const ComparisonRow> rows) {
  std::string out = fmt::format("{:>5} {:<11} {:>12} {:>11} {:>11} {:>11} {:>11} {:>9} {:>9} {:>9}\n", "N", "design",
                                "area(F^2)", "latency_ns", "energy_J", "EDP", "AxL", "x_area", "x_AxL", "x_EDP");
  for (const auto& row : rows) {
    auto line = [&](const CostReport& r, const Ratios& adv) {
      out += fmt::format("{:>5} {:<11} {:>12.4g} {:>11.4g} {:>11.4g} {:>11.4g} {:>11.4g} {:>9.3g} {:>9.3g} {:>9.3g}\n",
                         r.n, to_string(r.design), r.area_f2, r.latency_ns, r.energy_j, r.edp, r.area_latency,
                         adv.area, adv.area_latency, adv.edp);
    };
    line(row.agni, Ratios{1.0, 1.0, 1.0});
    line(row.ppc, row.vs_ppc);
    line(row.spc, row.vs_spc);
  }
  return out;
}

}  // namespace agni
