#pragma once

// Area, latency and energy for one stochastic-to-binary conversion of an
// N-bit operand on three substrates:
//
//   AGNI        in-DRAM charge-sharing converter (this library's pipeline)
//   ParallelPC  full-adder pop-count tree
//   SerialPC    bit-serial counter
//
// Areas are in F^2 (process-normalized) and um^2, latency in ns, energy in J.
// EDP is energy_j * latency_ns and area x latency is area_f2 * latency_ns.

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agni/pipeline.hpp"
#include "json.hpp"

namespace agni {

enum class Design { AGNI, ParallelPC, SerialPC };

std::string_view to_string(Design d);
/// Accepts agni, ppc, spc, parallelpc, serialpc (case-insensitive).
Design parse_design(std::string_view s);

struct LayoutModel {
  double feature_f_nm = 45.0;
  double cell_area_f2 = 6.0;
  double bitline_pitch_f = 3.0;
  std::map<std::string, double> strip_heights_f = {
      {"SA", 117.0},    {"precharge", 90.0}, {"write_driver", 27.0},
      {"s_to_a", 27.0}, {"a_to_u", 27.0},    {"u_to_b", 110.0},
  };

  /// Height added to a tile by the S_to_A, A_to_U and U_to_B strips.
  double agni_added_height_f() const;
  /// Added area per bitline-pitch column.
  double agni_area_overhead_f2() const;
  /// Area of one F^2 in um^2.
  double f2_um2() const;
};

struct ChargePumpRow {
  double area_um2 = 0.0;
  double dyn_power_w = 0.0;
  double wasted_power_w = 0.0;

  friend bool operator==(const ChargePumpRow&, const ChargePumpRow&) = default;
};

class ChargePumpTable {
 public:
  /// The five evaluated rows, N = 16 .. 256.
  static const ChargePumpTable& standard();

  explicit ChargePumpTable(std::map<std::size_t, ChargePumpRow> rows);

  const std::map<std::size_t, ChargePumpRow>& rows() const noexcept { return rows_; }
  double min_n() const;
  double max_n() const;

  /// Log-log interpolation between rows; exact at the rows. Throws
  /// InterpolationRange outside [min_n, max_n].
  ChargePumpRow lookup(double n) const;

 private:
  std::map<std::size_t, ChargePumpRow> rows_;
};

struct CostReport {
  Design design = Design::AGNI;
  std::size_t n = 0;
  double area_f2 = 0.0;
  double area_um2 = 0.0;
  double latency_ns = 0.0;
  double energy_j = 0.0;
  double edp = 0.0;           // energy_j * latency_ns
  double area_latency = 0.0;  // area_f2 * latency_ns
};

CostReport make_report(Design d, std::size_t n, double area_f2, double latency_ns, double energy_j,
                       const LayoutModel& layout);

struct AgniEnergyBreakdown {
  double precharge_j = 0.0;  // bitline equalization, per EQ rise
  double sense_j = 0.0;      // bitline swing, per sense_n rise
  double restore_j = 0.0;    // cell write-back, per WL rise
  double lane_j = 0.0;       // LANE charged to V_MAX from vdd
  double latch_j = 0.0;      // output latch gates, per L1 rise
  double charge_pump_j = 0.0;
  double total_j = 0.0;
};

inline constexpr double kLatchGateEnergyJ = 0.5e-15;

/// Switching-energy estimate integrated over the schedule of cfg.
AgniEnergyBreakdown agni_energy(const TileConfig& cfg, const ChargePumpTable& cp = ChargePumpTable::standard());

CostReport agni_cost(const TileConfig& cfg, const LayoutModel& layout = {},
                     const ChargePumpTable& cp = ChargePumpTable::standard());
/// agni_cost(TileConfig::defaults(n)).
CostReport agni_cost(std::size_t n);

// ParallelPC: (n - log2 n - 1) full adders plus routing that grows as n log2^2 n.
struct ParallelPcConstants {
  double a_fa_f2 = 0.0;
  double a_route_f2 = 0.0;
  double t_stage_ns = 0.0;
  double e_fa_j = 0.0;
  double e_route_j = 0.0;
};

// SerialPC: (log2 n + 1)-bit counter, operand tracks growing as n^2, one
// clock per bit after a fixed overhead.
struct SerialPcConstants {
  double a_cnt_f2 = 0.0;
  double a_track_f2 = 0.0;
  double l0_ns = 0.0;
  double t_clk_ns = 0.0;
  double e_cnt_j = 0.0;
  double e_wire_j = 0.0;
};

struct BaselineConstants {
  ParallelPcConstants ppc;
  SerialPcConstants spc;
};

/// Full adders in an n-input pop-count tree: n - log2(n) - 1.
std::size_t full_adder_count(std::size_t n);

CostReport parallel_pc_cost(std::size_t n, const ParallelPcConstants& c, const LayoutModel& layout = {});
CostReport serial_pc_cost(std::size_t n, const SerialPcConstants& c, const LayoutModel& layout = {});

/// Constants compiled into the library; config/baselines.json holds the same
/// values with fit residuals.
const BaselineConstants& builtin_baselines();

class CostModel {
 public:
  explicit CostModel(BaselineConstants baselines = builtin_baselines(), LayoutModel layout = {},
                     ChargePumpTable cp = ChargePumpTable::standard());

  CostReport cost(Design d, std::size_t n) const;
  const BaselineConstants& baselines() const noexcept { return baselines_; }
  const LayoutModel& layout() const noexcept { return layout_; }

 private:
  BaselineConstants baselines_;
  LayoutModel layout_;
  ChargePumpTable cp_;
};

struct Ratios {
  double area = 0.0;
  double area_latency = 0.0;
  double edp = 0.0;
};

/// Baseline metric divided by the AGNI metric.
Ratios advantage(const CostReport& agni, const CostReport& baseline);

struct ComparisonRow {
  std::size_t n = 0;
  CostReport agni;
  CostReport ppc;
  CostReport spc;
  Ratios vs_ppc;
  Ratios vs_spc;
};

/// Throws Config for an empty list.
std::vector<ComparisonRow> compare(std::span<const std::size_t> ns, const CostModel& model = CostModel());

nlohmann::json to_json(const CostReport& r);
nlohmann::json to_json(std::span<const ComparisonRow> rows);
std::string comparison_csv(std::span<const ComparisonRow> rows);
std::string comparison_table(std::span<const ComparisonRow> rows);

// ---- baseline fitting ----------------------------------------------------

struct RatioAnchor {
  Design design = Design::ParallelPC;
  std::size_t n = 0;
  Ratios target;
};

/// AGNI-relative advantage ratios the baseline constants are fit against.
std::span<const RatioAnchor> ratio_anchors();

struct AnchorResidual {
  RatioAnchor anchor;
  Ratios modeled;
  double max_factor = 1.0;  // max over the three ratios of max(m/t, t/m)
};

struct BaselineFit {
  BaselineConstants constants;
  std::vector<AnchorResidual> residuals;
  double max_factor = 1.0;
  bool converged = false;
};

/// Least squares on log ratios with a weak log-prior so the fit stays
/// well-posed when a constant is barely constrained.
BaselineFit fit_baselines(const LayoutModel& layout = {}, const ChargePumpTable& cp = ChargePumpTable::standard());

nlohmann::json to_json(const BaselineConstants& c);
BaselineConstants baselines_from_json(const nlohmann::json& j);
/// Versioned file with a provenance header, constants and residuals.
nlohmann::json baseline_file_json(const BaselineFit& fit, std::string_view version);
/// Throws Format on malformed content.
BaselineConstants load_baselines(const std::filesystem::path& path);

}  // namespace agni
