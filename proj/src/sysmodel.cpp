#include "agni/sysmodel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "agni/error.hpp"

namespace agni {

std::uint64_t CnnModelSpec::total_elements() const {
  std::uint64_t t = 0;
  for (const auto& l : layers) t += l.output_elements;
  return t;
}

namespace {

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

[[noreturn]] void field_error(const std::string& source, const std::string& field, const std::string& what) {
  throw Error(ErrorKind::Format, fmt::format("{}: field '{}' {}", source, field, what));
}

}  // namespace

CnnModelSpec parse_model(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Format, fmt::format("{}: line {}: {}", source, line_of(text, e.byte), e.what()));
  }
  if (!j.is_object()) field_error(source, "<root>", "must be an object");

  CnnModelSpec m;
  const auto name = j.find("name");
  if (name == j.end() || !name->is_string() || name->get<std::string>().empty()) {
    field_error(source, "name", "must be a non-empty string");
  }
  m.name = name->get<std::string>();
  if (const auto p = j.find("provenance"); p != j.end()) m.provenance = *p;

  const auto layers = j.find("layers");
  if (layers == j.end() || !layers->is_array()) field_error(source, "layers", "must be an array");
  if (layers->empty()) field_error(source, "layers", "must contain at least one layer");
  for (std::size_t i = 0; i < layers->size(); ++i) {
    const auto& l = (*layers)[i];
    const std::string where = fmt::format("layers[{}]", i);
    if (!l.is_object()) field_error(source, where, "must be an object");
    LayerSpec spec;
    const auto ln = l.find("name");
    if (ln == l.end() || !ln->is_string()) field_error(source, where + ".name", "must be a string");
    spec.name = ln->get<std::string>();
    const auto oe = l.find("output_elements");
    if (oe == l.end() || !oe->is_number_integer() || (oe->is_number_integer() && oe->get<std::int64_t>() <= 0)) {
      field_error(source, where + ".output_elements", "must be a positive integer");
    }
    spec.output_elements = oe->get<std::uint64_t>();
    m.layers.push_back(std::move(spec));
  }
  return m;
}

CnnModelSpec load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, fmt::format("cannot open model spec {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path.string());
}

std::vector<CnnModelSpec> load_models(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::Config, fmt::format("model directory {} not found", dir.string()));
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorKind::Config, fmt::format("no *.json model specs in {}", dir.string()));
  std::vector<CnnModelSpec> out;
  for (const auto& f : files) out.push_back(load_model(f));
  return out;
}

std::size_t PimSystemConfig::conversions_per_tile() const {
  return backend == Design::AGNI ? l / n : baseline_converters_per_tile;
}

std::string PimSystemConfig::label() const { return fmt::format("{}(N={})", to_string(backend), n); }

void PimSystemConfig::validate() const {
  if (tiles == 0) throw Error(ErrorKind::Config, "tiles must be positive");
  if (n == 0 || l == 0 || l % n != 0) throw Error(ErrorKind::Config, fmt::format("L={} is not a multiple of N={}", l, n));
  if (baseline_converters_per_tile == 0) throw Error(ErrorKind::Config, "baseline converters per tile must be positive");
}

std::uint64_t conversion_rounds(const CnnModelSpec& model, const PimSystemConfig& sys) {
  sys.validate();
  const std::uint64_t per_round = static_cast<std::uint64_t>(sys.tiles) * sys.conversions_per_tile();
  std::uint64_t rounds = 0;
  for (const auto& l : model.layers) rounds += (l.output_elements + per_round - 1) / per_round;
  return rounds;
}

double stob_phase_latency(const CnnModelSpec& model, const PimSystemConfig& sys, const CostModel& costs) {
  return static_cast<double>(conversion_rounds(model, sys)) * costs.cost(sys.backend, sys.n).latency_ns;
}

double stob_phase_energy(const CnnModelSpec& model, const PimSystemConfig& sys, const CostModel& costs) {
  sys.validate();
  return static_cast<double>(model.total_elements()) * costs.cost(sys.backend, sys.n).energy_j;
}

double stob_phase_edp(const CnnModelSpec& model, const PimSystemConfig& sys, const CostModel& costs) {
  return stob_phase_latency(model, sys, costs) * stob_phase_energy(model, sys, costs);
}

double geomean(std::span<const double> v) {
  if (v.empty()) throw Error(ErrorKind::Arity, "geometric mean of an empty list");
  double s = 0.0;
  for (double x : v) {
    if (!(x > 0.0)) throw Error(ErrorKind::Range, fmt::format("geometric mean needs positive values (got {})", x));
    s += std::log(x);
  }
  return std::exp(s / static_cast<double>(v.size()));
}

namespace {

std::string key(const std::string& s) {
  std::string k;
  for (unsigned char c : s) {
    if (std::isalnum(c)) k.push_back(static_cast<char>(std::tolower(c)));
  }
  return k;
}

std::pair<std::size_t, std::size_t> find_anchor(const SystemReport& r, Design d, const std::string& model) {
  for (std::size_t m = 0; m < r.models.size(); ++m) {
    if (key(r.models[m]) != key(model)) continue;
    for (std::size_t v = 0; v < r.backends.size(); ++v) {
      if (r.backends[v] == d) return {m, v};
    }
  }
  return {0, 0};
}

double ratio_gmean(const std::vector<std::vector<double>>& cells, std::size_t a, std::size_t b) {
  std::vector<double> q;
  for (const auto& row : cells) q.push_back(row.at(b) / row.at(a));
  return geomean(q);
}

}  // namespace

double SystemReport::latency_advantage(std::size_t a, std::size_t b) const { return ratio_gmean(latency_ns, a, b); }
double SystemReport::edp_advantage(std::size_t a, std::size_t b) const { return ratio_gmean(edp, a, b); }

std::size_t SystemReport::variant_index(Design d) const {
  for (std::size_t v = 0; v < backends.size(); ++v) {
    if (backends[v] == d) return v;
  }
  throw Error(ErrorKind::Config, fmt::format("report has no {} variant", to_string(d)));
}

SystemReport report(std::span<const CnnModelSpec> models, std::span<const PimSystemConfig> variants,
                    const CostModel& costs) {
  if (models.empty() || variants.empty()) throw Error(ErrorKind::Config, "report needs at least one model and variant");
  SystemReport r;
  for (const auto& v : variants) {
    v.validate();
    r.variants.push_back(v.label());
    r.backends.push_back(v.backend);
  }
  for (const auto& m : models) {
    r.models.push_back(m.name);
    std::vector<double> lat, en, edp;
    for (const auto& v : variants) {
      lat.push_back(stob_phase_latency(m, v, costs));
      en.push_back(stob_phase_energy(m, v, costs));
      edp.push_back(lat.back() * en.back());
    }
    r.latency_ns.push_back(std::move(lat));
    r.energy_j.push_back(std::move(en));
    r.edp.push_back(std::move(edp));
  }

  const auto [lm, lv] = find_anchor(r, Design::ParallelPC, "Inception_V3");
  const auto [em, ev] = find_anchor(r, Design::AGNI, "ShuffleNet_V2");
  r.latency_anchor = r.variants[lv] + "/" + r.models[lm];
  r.edp_anchor = r.variants[ev] + "/" + r.models[em];
  const double lat0 = r.latency_ns[lm][lv];
  const double edp0 = r.edp[em][ev];
  for (std::size_t m = 0; m < r.models.size(); ++m) {
    std::vector<double> ln, en;
    for (std::size_t v = 0; v < r.variants.size(); ++v) {
      ln.push_back(m == lm && v == lv ? 1.0 : r.latency_ns[m][v] / lat0);
      en.push_back(m == em && v == ev ? 1.0 : r.edp[m][v] / edp0);
    }
    r.latency_norm.push_back(std::move(ln));
    r.edp_norm.push_back(std::move(en));
  }
  for (std::size_t v = 0; v < r.variants.size(); ++v) {
    std::vector<double> ln, en;
    for (std::size_t m = 0; m < r.models.size(); ++m) {
      ln.push_back(r.latency_norm[m][v]);
      en.push_back(r.edp_norm[m][v]);
    }
    r.gmean_latency_norm.push_back(geomean(ln));
    r.gmean_edp_norm.push_back(geomean(en));
  }
  return r;
}

nlohmann::json to_json(const SystemReport& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t m = 0; m < r.models.size(); ++m) {
    for (std::size_t v = 0; v < r.variants.size(); ++v) {
      cells.push_back({{"model", r.models[m]},
                       {"variant", r.variants[v]},
                       {"latency_ns", r.latency_ns[m][v]},
                       {"energy_j", r.energy_j[m][v]},
                       {"edp", r.edp[m][v]},
                       {"latency_norm", r.latency_norm[m][v]},
                       {"edp_norm", r.edp_norm[m][v]}});
    }
  }
  nlohmann::json gm = nlohmann::json::array();
  for (std::size_t v = 0; v < r.variants.size(); ++v) {
    gm.push_back({{"variant", r.variants[v]},
                  {"latency_norm", r.gmean_latency_norm[v]},
                  {"edp_norm", r.gmean_edp_norm[v]}});
  }
  nlohmann::json adv = nlohmann::json::array();
  for (std::size_t a = 0; a < r.variants.size(); ++a) {
    if (r.backends[a] != Design::AGNI) continue;
    for (std::size_t b = 0; b < r.variants.size(); ++b) {
      if (b == a) continue;
      adv.push_back({{"variant", r.variants[a]},
                     {"over", r.variants[b]},
                     {"latency", r.latency_advantage(a, b)},
                     {"edp", r.edp_advantage(a, b)}});
    }
  }
  return {{"normalization", {{"latency", r.latency_anchor}, {"edp", r.edp_anchor}}},
          {"models", r.models},
          {"variants", r.variants},
          {"cells", cells},
          {"geomean", gm},
          {"advantage_geomean", adv}};
}

std::string report_csv(const SystemReport& r) {
  std::string out = fmt::format("# latency normalized to {}; edp normalized to {}\n", r.latency_anchor, r.edp_anchor);
  out += "model,variant,latency_ns,energy_j,edp,latency_norm,edp_norm\n";
  for (std::size_t m = 0; m < r.models.size(); ++m) {
    for (std::size_t v = 0; v < r.variants.size(); ++v) {
      out += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.models[m], r.variants[v],
                         r.latency_ns[m][v], r.energy_j[m][v], r.edp[m][v], r.latency_norm[m][v], r.edp_norm[m][v]);
    }
  }
  for (std::size_t v = 0; v < r.variants.size(); ++v) {
    out += fmt::format("Gmean,{},,,,{:.17g},{:.17g}\n", r.variants[v], r.gmean_latency_norm[v], r.gmean_edp_norm[v]);
  }
  return out;
}

std::string report_table(const SystemReport& r) {
  auto block = [&](const char* title, const std::vector<std::vector<double>>& cells, const std::vector<double>& gm,
                   const std::string& anchor) {
    std::string out = fmt::format("{} (normalized to {})\n{:<16}", title, anchor, "model");
    for (const auto& v : r.variants) out += fmt::format(" {:>18}", v);
    out += "\n";
    for (std::size_t m = 0; m < r.models.size(); ++m) {
      out += fmt::format("{:<16}", r.models[m]);
      for (double x : cells[m]) out += fmt::format(" {:>18.6g}", x);
      out += "\n";
    }
    out += fmt::format("{:<16}", "Gmean");
    for (double x : gm) out += fmt::format(" {:>18.6g}", x);
    return out + "\n";
  };
  return block("latency", r.latency_norm, r.gmean_latency_norm, r.latency_anchor) + "\n" +
         block("EDP", r.edp_norm, r.gmean_edp_norm, r.edp_anchor);
}

}  // namespace agni
