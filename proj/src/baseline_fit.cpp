#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "agni/costmodel.hpp"
#include "agni/error.hpp"
#include "least_squares.hpp"

namespace agni {

std::span<const RatioAnchor> ratio_anchors() {
  static const std::array<RatioAnchor, 4> a = {{
      {Design::ParallelPC, 16, {390.0, 21.0, 28.0}},
      {Design::ParallelPC, 256, {923.0, 247.0, 350.0}},
      {Design::SerialPC, 16, {8.0, 23.0, 59.0}},
      {Design::SerialPC, 256, {96.0, 333.0, 930.0}},
  }};
  return a;
}

namespace {

constexpr double kPriorWeight = 1e-2;

// Fitted in log space; the prior is the starting point.
constexpr std::array<double, 5> kPpcPrior = {3e5, 3e3, 1.0, 1e-12, 1e-14};
constexpr std::array<double, 6> kSpcPrior = {1e3, 10.0, 150.0, 0.1, 1e-12, 1e-14};

ParallelPcConstants ppc_from(std::span<const double> x) {
  return {std::exp(x[0]), std::exp(x[1]), std::exp(x[2]), std::exp(x[3]), std::exp(x[4])};
}

SerialPcConstants spc_from(std::span<const double> x) {
  return {std::exp(x[0]), std::exp(x[1]), std::exp(x[2]), std::exp(x[3]), std::exp(x[4]), std::exp(x[5])};
}

double factor(double modeled, double target) { return std::max(modeled / target, target / modeled); }

template <class Cost>
detail::LsqResult fit_one(Design d, std::span<const double> prior, const Cost& cost,
                          const std::map<std::size_t, CostReport>& agni) {
  std::vector<RatioAnchor> anchors;
  for (const auto& a : ratio_anchors()) {
    if (a.design == d) anchors.push_back(a);
  }
  std::vector<double> x0;
  for (double p : prior) x0.push_back(std::log(p));
  const std::vector<double> logp = x0;
  auto fn = [&](std::span<const double> x, std::span<double> r) {
    std::size_t i = 0;
    for (const auto& a : anchors) {
      const Ratios m = advantage(agni.at(a.n), cost(a.n, x));
      r[i++] = std::log(m.area / a.target.area);
      r[i++] = std::log(m.area_latency / a.target.area_latency);
      r[i++] = std::log(m.edp / a.target.edp);
    }
    for (std::size_t k = 0; k < x.size(); ++k) r[i++] = kPriorWeight * (x[k] - logp[k]);
  };
  return detail::least_squares(fn, x0, anchors.size() * 3 + x0.size());
}

}  // namespace

BaselineFit fit_baselines(const LayoutModel& layout, const ChargePumpTable& cp) {
  std::map<std::size_t, CostReport> agni;
  for (const auto& a : ratio_anchors()) {
    if (!agni.contains(a.n)) agni.emplace(a.n, agni_cost(TileConfig::defaults(a.n), layout, cp));
  }

  const auto ppc = fit_one(Design::ParallelPC, kPpcPrior,
                           [&](std::size_t n, std::span<const double> x) {
                             return parallel_pc_cost(n, ppc_from(x), layout);
                           },
                           agni);
  const auto spc = fit_one(Design::SerialPC, kSpcPrior,
                           [&](std::size_t n, std::span<const double> x) {
                             return serial_pc_cost(n, spc_from(x), layout);
                           },
                           agni);

  BaselineFit fit;
  fit.constants.ppc = ppc_from(ppc.x);
  fit.constants.spc = spc_from(spc.x);
  fit.converged = ppc.converged && spc.converged;
  const CostModel model(fit.constants, layout, cp);
  for (const auto& a : ratio_anchors()) {
    AnchorResidual r{a, advantage(agni.at(a.n), model.cost(a.design, a.n)), 1.0};
    r.max_factor = std::max({factor(r.modeled.area, a.target.area),
                             factor(r.modeled.area_latency, a.target.area_latency),
                             factor(r.modeled.edp, a.target.edp)});
    fit.max_factor = std::max(fit.max_factor, r.max_factor);
    fit.residuals.push_back(r);
  }
  return fit;
}

nlohmann::json to_json(const BaselineConstants& c) {
  return {{"parallel_pc",
           {{"a_fa_f2", c.ppc.a_fa_f2},
            {"a_route_f2", c.ppc.a_route_f2},
            {"t_stage_ns", c.ppc.t_stage_ns},
            {"e_fa_j", c.ppc.e_fa_j},
            {"e_route_j", c.ppc.e_route_j}}},
          {"serial_pc",
           {{"a_cnt_f2", c.spc.a_cnt_f2},
            {"a_track_f2", c.spc.a_track_f2},
            {"l0_ns", c.spc.l0_ns},
            {"t_clk_ns", c.spc.t_clk_ns},
            {"e_cnt_j", c.spc.e_cnt_j},
            {"e_wire_j", c.spc.e_wire_j}}}};
}

namespace {

double positive(const nlohmann::json& obj, const char* section, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw Error(ErrorKind::Format, fmt::format("baselines: {}.{} missing or not a number", section, key));
  }
  const double v = it->get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::Format, fmt::format("baselines: {}.{} must be positive (got {})", section, key, v));
  }
  return v;
}

const nlohmann::json& section(const nlohmann::json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end() || !it->is_object()) {
    throw Error(ErrorKind::Format, fmt::format("baselines: section '{}' missing", name));
  }
  return *it;
}

nlohmann::json ratios_json(const Ratios& r) {
  return {{"area", r.area}, {"area_latency", r.area_latency}, {"edp", r.edp}};
}

}  // namespace

BaselineConstants baselines_from_json(const nlohmann::json& j) {
  const nlohmann::json& c = j.contains("constants") ? j.at("constants") : j;
  const auto& p = section(c, "parallel_pc");
  const auto& s = section(c, "serial_pc");
  BaselineConstants out;
  out.ppc = {positive(p, "parallel_pc", "a_fa_f2"), positive(p, "parallel_pc", "a_route_f2"),
             positive(p, "parallel_pc", "t_stage_ns"), positive(p, "parallel_pc", "e_fa_j"),
             positive(p, "parallel_pc", "e_route_j")};
  out.spc = {positive(s, "serial_pc", "a_cnt_f2"), positive(s, "serial_pc", "a_track_f2"),
             positive(s, "serial_pc", "l0_ns"),    positive(s, "serial_pc", "t_clk_ns"),
             positive(s, "serial_pc", "e_cnt_j"),  positive(s, "serial_pc", "e_wire_j")};
  return out;
}

nlohmann::json baseline_file_json(const BaselineFit& fit, std::string_view version) {
  nlohmann::json anchors = nlohmann::json::array();
  for (const auto& r : fit.residuals) {
    anchors.push_back({{"design", to_string(r.anchor.design)},
                       {"n", r.anchor.n},
                       {"target", ratios_json(r.anchor.target)},
                       {"modeled", ratios_json(r.modeled)},
                       {"max_factor", r.max_factor}});
  }
  return {{"format", "agni-baselines"},
          {"schema_version", 1},
          {"provenance",
           {{"generator", "agni fit-baselines"},
            {"tool_version", version},
            {"method", "Levenberg-Marquardt on log AGNI-relative ratios (area, area x latency, EDP) at N=16 and "
                       "N=256, weak log-prior on each constant"},
            {"parallel_pc_model",
             "area = a_fa*(n-log2 n-1) + a_route*n*log2(n)^2; latency = t_stage*log2 n; "
             "energy = e_fa*(n-log2 n-1) + e_route*n*log2(n)^2"},
            {"serial_pc_model",
             "area = a_cnt*(log2 n+1) + a_track*n^2; latency = l0 + n*t_clk; energy = n*(e_cnt + e_wire*n)"},
            {"units", "area F^2, latency ns, energy J"}}},
          {"constants", to_json(fit.constants)},
          {"converged", fit.converged},
          {"max_factor", fit.max_factor},
          {"residuals", anchors}};
}

BaselineConstants load_baselines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, fmt::format("cannot open baselines file {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Format, fmt::format("{}: {}", path.string(), e.what()));
  }
  return baselines_from_json(j);
}

}  // namespace agni
