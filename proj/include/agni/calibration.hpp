#pragma once

// Fits the LANE charging model (v_sat, tau) to maximum-LANE-voltage targets,
// i.e. the voltage reached with all N amplifiers driving for the charge window.

#include <cstddef>
#include <map>
#include <string_view>
#include <vector>

#include "agni/analog.hpp"
#include "json.hpp"

namespace agni {

enum class CalibrationMode {
  Auto,    // Global when it meets tolerance, otherwise PerN
  Global,  // one (v_sat, tau) pair shared by every N
  PerN,    // v_sat held at the prior, tau solved exactly for each N
};

std::string_view to_string(CalibrationMode m);
CalibrationMode parse_calibration_mode(std::string_view s);

struct CalibrationOptions {
  CalibrationMode mode = CalibrationMode::Auto;
  double window_ns = 24.0;
  double tolerance = 0.10;  // max |relative residual| accepted per target
  AnalogParams prior{};
};

struct CalibrationRow {
  std::size_t n = 0;
  double target_mv = 0.0;
  double model_mv = 0.0;
  double residual_mv = 0.0;
  double relative = 0.0;
};

struct CalibrationResult {
  CalibrationMode mode = CalibrationMode::Global;
  bool met_tolerance = false;
  double max_relative_residual = 0.0;
  std::vector<CalibrationRow> rows;
  std::map<std::size_t, AnalogParams> params;

  /// Parameters for n; throws Config when n was not calibrated.
  const AnalogParams& for_n(std::size_t n) const;
};

/// Throws Config for empty or non-positive targets and Calibration when the
/// solver fails to converge (the message carries the best residuals found).
CalibrationResult calibrate(const std::map<std::size_t, double>& targets_mv,
                            const CalibrationOptions& options = {});

/// Maximum LANE voltages for N = 16..256 at the 24 ns window.
const std::map<std::size_t, double>& table_vmax_targets_mv();

/// Table targets plus the N = 4 waveform anchor (514 mV) and an N = 8 value
/// interpolated in log2(N) between the N = 4 and N = 16 anchors.
const std::map<std::size_t, double>& default_vmax_targets_mv();

/// Per-N parameters calibrated against default_vmax_targets_mv(). Cached.
const AnalogParams& default_params(std::size_t n);

nlohmann::json to_json(const AnalogParams& p);
AnalogParams params_from_json(const nlohmann::json& j, AnalogParams base = {});
nlohmann::json to_json(const CalibrationResult& r);

}  // namespace agni
