#pragma once

// StoB-phase latency and EDP of CNN inference. Every element of every layer's
// output tensor needs one conversion; conversions are spread over the tiles
// and each round costs one converter latency.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "agni/costmodel.hpp"
#include "json.hpp"

namespace agni {

struct LayerSpec {
  std::string name;
  std::uint64_t output_elements = 0;
};

struct CnnModelSpec {
  std::string name;
  std::vector<LayerSpec> layers;
  nlohmann::json provenance;  // free-form, null when absent

  std::uint64_t total_elements() const;
};

/// Parses {name, layers: [{name, output_elements}]}. `source` labels errors.
/// Throws Format with the line (for syntax errors) or the offending field.
CnnModelSpec parse_model(const std::string& text, const std::string& source = "<model>");
CnnModelSpec load_model(const std::filesystem::path& path);
/// Every *.json in dir, ordered by file name.
std::vector<CnnModelSpec> load_models(const std::filesystem::path& dir);

struct PimSystemConfig {
  std::size_t tiles = 1024;
  std::size_t l = 512;
  std::size_t n = 256;
  Design backend = Design::AGNI;
  std::size_t baseline_converters_per_tile = 1;

  /// l / n for AGNI, baseline_converters_per_tile otherwise.
  std::size_t conversions_per_tile() const;
  std::string label() const;
  void validate() const;
};

std::uint64_t conversion_rounds(const CnnModelSpec& model, const PimSystemConfig& sys);
double stob_phase_latency(const CnnModelSpec& model, const PimSystemConfig& sys, const CostModel& costs = CostModel());
double stob_phase_energy(const CnnModelSpec& model, const PimSystemConfig& sys, const CostModel& costs = CostModel());
/// Latency (ns) times energy (J).
double stob_phase_edp(const CnnModelSpec& model, const PimSystemConfig& sys, const CostModel& costs = CostModel());

double geomean(std::span<const double> v);

struct SystemReport {
  std::vector<std::string> models;
  std::vector<std::string> variants;
  std::vector<Design> backends;
  // [model][variant]
  std::vector<std::vector<double>> latency_ns;
  std::vector<std::vector<double>> energy_j;
  std::vector<std::vector<double>> edp;
  std::vector<std::vector<double>> latency_norm;
  std::vector<std::vector<double>> edp_norm;
  std::string latency_anchor;  // "variant/model"
  std::string edp_anchor;
  std::vector<double> gmean_latency_norm;  // per variant
  std::vector<double> gmean_edp_norm;

  /// Geometric mean over models of metric(variant b) / metric(variant a).
  double latency_advantage(std::size_t a, std::size_t b) const;
  double edp_advantage(std::size_t a, std::size_t b) const;
  /// Index of the first variant with the given backend; throws Config when absent.
  std::size_t variant_index(Design d) const;
};

/// Latency is normalized to (ParallelPC, Inception_V3) and EDP to
/// (AGNI, ShuffleNet_V2) when present, otherwise to the first cell.
SystemReport report(std::span<const CnnModelSpec> models, std::span<const PimSystemConfig> variants,
                    const CostModel& costs = CostModel());

nlohmann::json to_json(const SystemReport& r);
std::string report_csv(const SystemReport& r);
std::string report_table(const SystemReport& r);

}  // namespace agni
