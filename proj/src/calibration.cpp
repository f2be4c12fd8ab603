#include "agni/calibration.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "agni/error.hpp"
#include "least_squares.hpp"

namespace agni {

std::string_view to_string(CalibrationMode m) {
  switch (m) {
    case CalibrationMode::Auto: return "auto";
    case CalibrationMode::Global: return "global";
    case CalibrationMode::PerN: return "per-n";
  }
  return "unknown";
}

CalibrationMode parse_calibration_mode(std::string_view s) {
  if (s == "auto") return CalibrationMode::Auto;
  if (s == "global") return CalibrationMode::Global;
  if (s == "per-n" || s == "per_n") return CalibrationMode::PerN;
  throw Error(ErrorKind::Config, fmt::format("unknown calibration mode '{}'", s));
}

const AnalogParams& CalibrationResult::for_n(std::size_t n) const {
  auto it = params.find(n);
  if (it == params.end()) throw Error(ErrorKind::Config, fmt::format("no calibrated parameters for N = {}", n));
  return it->second;
}

namespace {

double model_mv(const AnalogParams& p, std::size_t n, double window_ns) {
  return 1e3 * lane_level(p, n, window_ns);
}

// tau such that n drivers reach target_v from an empty LANE in window_ns.
double solve_tau(const AnalogParams& p, std::size_t n, double target_v, double window_ns) {
  if (!(target_v < p.v_sat)) {
    throw Error(ErrorKind::Calibration,
                fmt::format("target {:.1f} mV for N = {} is not below v_sat = {:.1f} mV", target_v * 1e3, n,
                            p.v_sat * 1e3));
  }
  const double x = -std::log1p(-target_v / p.v_sat);
  return static_cast<double>(n) * window_ns / (p.c_ratio_lane_bl * x);
}

void fill_rows(CalibrationResult& r, const std::map<std::size_t, double>& targets, double window_ns,
               double tolerance) {
  r.rows.clear();
  r.max_relative_residual = 0.0;
  for (const auto& [n, target] : targets) {
    CalibrationRow row;
    row.n = n;
    row.target_mv = target;
    row.model_mv = model_mv(r.for_n(n), n, window_ns);
    row.residual_mv = row.model_mv - target;
    row.relative = row.residual_mv / target;
    r.max_relative_residual = std::max(r.max_relative_residual, std::abs(row.relative));
    r.rows.push_back(row);
  }
  r.met_tolerance = r.max_relative_residual <= tolerance;
}

CalibrationResult calibrate_per_n(const std::map<std::size_t, double>& targets, const CalibrationOptions& o) {
  CalibrationResult r;
  r.mode = CalibrationMode::PerN;
  for (const auto& [n, target] : targets) {
    AnalogParams p = o.prior;
    p.tau_ns = solve_tau(p, n, target * 1e-3, o.window_ns);
    r.params[n] = p;
  }
  fill_rows(r, targets, o.window_ns, o.tolerance);
  return r;
}

CalibrationResult calibrate_global(const std::map<std::size_t, double>& targets, const CalibrationOptions& o) {
  CalibrationResult r;
  r.mode = CalibrationMode::Global;
  AnalogParams fitted = o.prior;

  if (targets.size() == 1) {
    // One equation, two unknowns: keep the prior v_sat and solve tau exactly.
    const auto& [n, target] = *targets.begin();
    fitted.tau_ns = solve_tau(fitted, n, target * 1e-3, o.window_ns);
  } else {
    const double max_target_v =
        std::max_element(targets.begin(), targets.end(), [](auto& a, auto& b) { return a.second < b.second; })
            ->second * 1e-3;
    AnalogParams start = o.prior;
    start.v_sat = std::max(start.v_sat, 1.05 * max_target_v);
    const auto& [n_mid, t_mid] = *std::next(targets.begin(), static_cast<long>(targets.size() / 2));
    start.tau_ns = solve_tau(start, n_mid, t_mid * 1e-3, o.window_ns);

    std::vector<std::pair<std::size_t, double>> tv(targets.begin(), targets.end());
    const AnalogParams base = o.prior;
    const double window = o.window_ns;
    detail::ResidualFn fn = [&tv, base, window](std::span<const double> x, std::span<double> res) {
      AnalogParams p = base;
      p.v_sat = std::exp(x[0]);
      p.tau_ns = std::exp(x[1]);
      for (std::size_t i = 0; i < tv.size(); ++i) res[i] = model_mv(p, tv[i].first, window) - tv[i].second;
    };
    const auto fit = detail::least_squares(fn, {std::log(start.v_sat), std::log(start.tau_ns)}, tv.size());
    fitted.v_sat = std::exp(fit.x[0]);
    fitted.tau_ns = std::exp(fit.x[1]);
    if (!fit.converged || !std::isfinite(fitted.v_sat) || !std::isfinite(fitted.tau_ns)) {
      std::string res;
      for (std::size_t i = 0; i < tv.size(); ++i) {
        res += fmt::format("{}N={}:{:+.2f}mV", i ? " " : "", tv[i].first, fit.residuals[i]);
      }
      throw Error(ErrorKind::Calibration,
                  fmt::format("global fit did not converge (status {}); best residuals {}", fit.status, res));
    }
    if (!(fitted.v_sat < fitted.vdd)) {
      throw Error(ErrorKind::Calibration,
                  fmt::format("global fit needs v_sat = {:.3f} V, not below vdd = {:.3f} V", fitted.v_sat,
                              fitted.vdd));
    }
  }
  for (const auto& [n, target] : targets) r.params[n] = fitted;
  fill_rows(r, targets, o.window_ns, o.tolerance);
  return r;
}

}  // namespace

CalibrationResult calibrate(const std::map<std::size_t, double>& targets_mv, const CalibrationOptions& options) {
  if (targets_mv.empty()) throw Error(ErrorKind::Config, "calibration needs at least one target");
  for (const auto& [n, v] : targets_mv) {
    if (n == 0 || !(v > 0.0)) {
      throw Error(ErrorKind::Config, fmt::format("invalid calibration target N = {}: {} mV", n, v));
    }
  }
  options.prior.validate();
  if (!(options.window_ns > 0.0)) throw Error(ErrorKind::Config, "calibration window must be positive");

  switch (options.mode) {
    case CalibrationMode::Global: return calibrate_global(targets_mv, options);
    case CalibrationMode::PerN: return calibrate_per_n(targets_mv, options);
    case CalibrationMode::Auto: break;
  }
  try {
    auto global = calibrate_global(targets_mv, options);
    if (global.met_tolerance) return global;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Calibration) throw;
  }
  return calibrate_per_n(targets_mv, options);
}

const std::map<std::size_t, double>& table_vmax_targets_mv() {
  static const std::map<std::size_t, double> t = {{16, 630.0}, {32, 715.0}, {64, 735.0}, {128, 755.0}, {256, 785.0}};
  return t;
}

const std::map<std::size_t, double>& default_vmax_targets_mv() {
  static const std::map<std::size_t, double> t = [] {
    auto m = table_vmax_targets_mv();
    m[4] = 514.0;
    m[8] = 514.0 + (630.0 - 514.0) * (3.0 - 2.0) / (4.0 - 2.0);
    return m;
  }();
  return t;
}

const AnalogParams& default_params(std::size_t n) {
  static const CalibrationResult cal = [] {
    CalibrationOptions o;
    o.mode = CalibrationMode::PerN;
    return calibrate(default_vmax_targets_mv(), o);
  }();
  return cal.for_n(n);
}

nlohmann::json to_json(const AnalogParams& p) {
  return {{"vdd_v", p.vdd},
          {"v_sat_v", p.v_sat},
          {"tau_ns", p.tau_ns},
          {"c_ratio_cell_bl", p.c_ratio_cell_bl},
          {"c_ratio_lane_bl", p.c_ratio_lane_bl},
          {"c_bitline_ff", p.c_bitline_ff},
          {"noise_sigma_mv", p.noise_sigma_mv},
          {"rng_seed", p.rng_seed}};
}

AnalogParams params_from_json(const nlohmann::json& j, AnalogParams p) {
  try {
    if (j.contains("vdd_v")) p.vdd = j["vdd_v"].get<double>();
    if (j.contains("v_sat_v")) p.v_sat = j["v_sat_v"].get<double>();
    if (j.contains("tau_ns")) p.tau_ns = j["tau_ns"].get<double>();
    if (j.contains("c_ratio_cell_bl")) p.c_ratio_cell_bl = j["c_ratio_cell_bl"].get<double>();
    if (j.contains("c_ratio_lane_bl")) p.c_ratio_lane_bl = j["c_ratio_lane_bl"].get<double>();
    if (j.contains("c_bitline_ff")) p.c_bitline_ff = j["c_bitline_ff"].get<double>();
    if (j.contains("noise_sigma_mv")) p.noise_sigma_mv = j["noise_sigma_mv"].get<double>();
    if (j.contains("rng_seed")) p.rng_seed = j["rng_seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, fmt::format("analog parameters: {}", e.what()));
  }
  p.validate();
  return p;
}

nlohmann::json to_json(const CalibrationResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"n", row.n},
                    {"target_mv", row.target_mv},
                    {"model_mv", row.model_mv},
                    {"residual_mv", row.residual_mv},
                    {"relative", row.relative}});
  }
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [n, p] : r.params) params[std::to_string(n)] = to_json(p);
  return {{"mode", std::string(to_string(r.mode))},
          {"met_tolerance", r.met_tolerance},
          {"max_relative_residual", r.max_relative_residual},
          {"rows", rows},
          {"params_by_n", params}};
}

}  // namespace agni
