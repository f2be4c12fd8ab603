#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "agni/pipeline.hpp"
#include "json.hpp"

namespace agni {

/// Mean absolute error. Throws Arity for empty or mismatched inputs.
double mae(std::span<const double> pred, std::span<const double> actual);

struct MapeResult {
  double percent = 0.0;
  std::size_t included = 0;
  std::size_t excluded_zero_actuals = 0;
};

/// Mean of |(actual - pred) / actual| * 100 over samples with actual != 0.
/// Throws UndefinedMetric when every actual is zero.
MapeResult mape(std::span<const double> pred, std::span<const double> actual);

double rmse(std::span<const double> pred, std::span<const double> actual);

// Errors are scored on ones-counts: predicted = encoder output, actual =
// popcount of the operand. Operands whose count the encoder cannot represent
// (all ones) are excluded and counted in saturated_excluded.
struct ErrorReport {
  std::size_t n = 0;
  double mae = 0.0;
  double mape_pct = 0.0;
  double rmse = 0.0;
  double v_max_mv = 0.0;
  std::size_t samples = 0;
  std::size_t excluded_zero_actuals = 0;
  std::size_t saturated_excluded = 0;
  std::size_t bubbles = 0;
  double bubble_flag_rate = 0.0;
  double sigma_mv = 0.0;
  std::string mode;
  std::uint64_t seed = 0;

  friend bool operator==(const ErrorReport&, const ErrorReport&) = default;
};

struct SweepMode {
  enum class Kind { Exhaustive, Sample };
  Kind kind = Kind::Exhaustive;
  std::size_t count = 0;

  static SweepMode exhaustive() { return {Kind::Exhaustive, 0}; }
  static SweepMode sample(std::size_t count) { return {Kind::Sample, count}; }
};

struct SweepOptions {
  unsigned workers = 0;      // 0 = hardware concurrency
  bool allow_large = false;  // lift the exhaustive N <= 16 guard
  std::uint64_t seed = 1;
};

inline constexpr std::size_t kMinSampleCount = 1000;

/// Runs every operand through the converter and aggregates the error metrics.
/// Operand i uses seed derive_seed(options.seed, i), so the report does not
/// depend on the worker count.
ErrorReport sweep(const TileConfig& cfg, SweepMode mode, const SweepOptions& options = {});

struct TableRow {
  double mae = 0.0;
  double mape_pct = 0.0;
  double rmse = 0.0;
  double v_max_mv = 0.0;
};

/// Published per-N error statistics used as calibration targets.
const std::map<std::size_t, TableRow>& table_error_targets();

struct SigmaFit {
  double sigma_mv = 0.0;
  double target_mape_pct = 0.0;
  ErrorReport report;
  int evaluations = 0;
};

/// Bisects the comparator noise sigma until the sweep MAPE brackets the target
/// to a relative sigma resolution of 1e-3. Uses common random numbers, so each
/// evaluation sees the same seeds.
SigmaFit fit_sigma(const TileConfig& cfg, double target_mape_pct, SweepMode mode,
                   const SweepOptions& options = {});

nlohmann::json to_json(const ErrorReport& r);
/// Aligned text table with the columns N, MAE, MAPE%, RMSE, V_MAX(mV).
std::string to_table(std::span<const ErrorReport> reports);
std::string to_csv(std::span<const ErrorReport> reports);

}  // namespace agni
