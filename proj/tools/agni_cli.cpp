// agni: command-line front end for the converter simulator and cost models.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "agni/calibration.hpp"
#include "agni/config.hpp"
#include "agni/costmodel.hpp"
#include "agni/error.hpp"
#include "agni/metrics.hpp"
#include "agni/pipeline.hpp"
#include "agni/sysmodel.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace agni;

enum class Format { Json, Csv, Table };

struct Rendered {
  json j;
  std::string csv;
  std::string table;
};

struct Session {
  std::vector<std::string> argv;
  std::map<std::string, std::string> hashes;
  std::uint64_t seed = 0;
};

// --out is either a format name (stdout) or a file path whose extension picks
// the format.
struct OutTarget {
  Format format = Format::Table;
  std::optional<fs::path> file;
};

OutTarget parse_out(const std::string& out) {
  if (out == "json") return {Format::Json, std::nullopt};
  if (out == "csv") return {Format::Csv, std::nullopt};
  if (out == "table") return {Format::Table, std::nullopt};
  const fs::path p(out);
  const auto ext = p.extension().string();
  if (ext == ".json") return {Format::Json, p};
  if (ext == ".csv") return {Format::Csv, p};
  if (ext == ".txt" || ext == ".table") return {Format::Table, p};
  throw Error(ErrorKind::Config,
              fmt::format("--out '{}' is neither json|csv|table nor a .json/.csv/.txt path", out));
}

void emit(const Session& s, const std::string& out, const Rendered& r) {
  const auto target = parse_out(out);
  std::string body;
  switch (target.format) {
    case Format::Json: body = r.j.dump(2) + "\n"; break;
    case Format::Csv: body = r.csv; break;
    case Format::Table: body = r.table; break;
  }
  if (!target.file) {
    std::cout << body;
    return;
  }
  write_file(*target.file, body);
  RunManifest m{s.argv, s.hashes, s.seed, AGNI_VERSION, manifest_timestamp()};
  m.config_hashes["output"] = hex64(fnv1a64(body));
  write_file(manifest_path(*target.file), m.to_json().dump(2) + "\n");
}

std::string fmt_csv_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return fmt::format("{:.17g}", v.get<double>());
  return v.dump();
}

// Flat objects render as key,value CSV and an aligned key: value table.
Rendered flat(const json& j) {
  Rendered r{j, "key,value\n", ""};
  std::size_t w = 0;
  for (const auto& [k, v] : j.items()) w = std::max(w, k.size());
  for (const auto& [k, v] : j.items()) {
    r.csv += fmt::format("{},{}\n", k, fmt_csv_value(v));
    r.table += fmt::format("{:<{}}  {}\n", k + ":", w + 1, fmt_csv_value(v));
  }
  return r;
}

// ---- configuration ----------------------------------------------------------

struct AnalogFlags {
  double sigma_mv = 0.0;
  std::uint64_t seed = 1;
  std::string ladder = "level";
  std::string schedule_file;
  std::size_t l = 512;
  CLI::Option* sigma_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void add(CLI::App* app) {
    sigma_opt = app->add_option("--sigma", sigma_mv, "Comparator noise sigma in mV")->check(CLI::NonNegativeNumber);
    seed_opt = app->add_option("--seed", seed, "Base RNG seed");
    app->add_option("--ladder", ladder, "Reference ladder: level or uniform")
        ->check(CLI::IsMember({"level", "uniform"}));
    app->add_option("--schedule", schedule_file, "Schedule file (text or JSON)");
    app->add_option("--l", l, "Bitlines per tile")->check(CLI::PositiveNumber);
  }
};

TileConfig tile_config(Session& s, std::size_t n, const AnalogFlags& f) {
  TileConfig cfg = TileConfig::defaults(n);
  cfg.l = f.l;
  if (const auto root = config_root()) {
    const auto conf = *root / "analog.conf";
    if (fs::exists(conf)) {
      const auto text = read_file(conf);
      s.hashes["analog.conf"] = hex64(fnv1a64(text));
      cfg.analog = parse_analog_conf(text, cfg.analog, conf.string());
    }
  }
  if (f.sigma_opt && f.sigma_opt->count()) cfg.analog.noise_sigma_mv = f.sigma_mv;
  if (f.seed_opt && f.seed_opt->count()) cfg.analog.rng_seed = f.seed;
  if (!f.schedule_file.empty()) {
    s.hashes["schedule"] = hex64(fnv1a64(read_file(f.schedule_file)));
    cfg.schedule = load_schedule(f.schedule_file);
  }
  cfg.ladder = f.ladder == "uniform" ? LadderKind::Uniform : LadderKind::LevelMatched;
  cfg.validate();
  s.hashes[fmt::format("analog.n{}", n)] = hex64(fnv1a64(to_json(cfg.analog).dump()));
  s.seed = cfg.analog.rng_seed;
  return cfg;
}

BaselineConstants resolve_baselines(Session& s, const std::string& flag) {
  std::optional<fs::path> path;
  if (!flag.empty()) {
    path = flag;
  } else if (const auto root = config_root(); root && fs::exists(*root / "baselines.json")) {
    path = *root / "baselines.json";
  }
  if (!path) {
    s.hashes["baselines"] = "builtin";
    return builtin_baselines();
  }
  s.hashes["baselines.json"] = hex64(fnv1a64(read_file(*path)));
  return load_baselines(*path);
}

fs::path resolve_models_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const auto root = config_root(); root && fs::is_directory(*root / "models")) return *root / "models";
  return fs::path(AGNI_DATA_DIR) / "models";
}

unsigned resolve_workers(unsigned w) { return w ? w : std::max(1u, std::thread::hardware_concurrency()); }

// ---- subcommands --------------------------------------------------------------

Rendered render_conversion(const ConversionResult& r) {
  Rendered out = flat(to_json(r));
  out.table = fmt::format(
      "operand  {}\nunary    {}\nbinary   {} (0b{}, {} bits)\noracle   {}{}\nlatency  {} ns\nbubble   {}\n",
      bit_string(r.input.bits()), bit_string(r.unary.bits()), r.binary.value,
      fmt::format("{:0{}b}", r.binary.value, r.binary.width), r.binary.width, r.oracle.value,
      r.saturated ? " (saturated)" : "", r.latency_ns, r.bubble ? "yes" : "no");
  return out;
}

Rendered render_trace(const WaveformTrace& t) {
  Rendered r{t.to_json(), t.to_csv(), ""};
  r.table = fmt::format("{:>8}", "t_ns");
  for (const auto& s : t.series) r.table += fmt::format(" {:>10}", s.name);
  r.table += "\n";
  for (std::size_t i = 0; i < t.times_ns.size(); ++i) {
    r.table += fmt::format("{:>8.3f}", t.times_ns[i]);
    for (const auto& s : t.series) r.table += fmt::format(" {:>10.5f}", s.values[i]);
    r.table += "\n";
  }
  for (const auto& g : t.glitches) r.table += fmt::format("# glitch {:g} {}\n", g.t_ns, g.label);
  return r;
}

Rendered render_schedule(const SignalSchedule& s) {
  Rendered r{to_json(s), "t_ns,signal,edge\n", to_text(s)};
  for (const auto& e : s.events()) r.csv += fmt::format("{:g},{},{}\n", e.t_ns, to_string(e.signal), to_string(e.edge));
  return r;
}

Rendered render_calibration(const CalibrationResult& c) {
  Rendered r{to_json(c), "n,target_mv,model_mv,residual_mv,relative,v_sat_v,tau_ns\n", ""};
  r.table = fmt::format("mode {}  met_tolerance {}  max_relative {:.4f}\n{:>5} {:>10} {:>10} {:>9} {:>9} {:>8} {:>10}\n",
                        to_string(c.mode), c.met_tolerance, c.max_relative_residual, "N", "target_mV", "model_mV",
                        "resid_mV", "relative", "v_sat_V", "tau_ns");
  for (const auto& row : c.rows) {
    const auto& p = c.for_n(row.n);
    r.csv += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", row.n, row.target_mv, row.model_mv,
                         row.residual_mv, row.relative, p.v_sat, p.tau_ns);
    r.table += fmt::format("{:>5} {:>10.1f} {:>10.2f} {:>9.3f} {:>9.4f} {:>8.4f} {:>10.3f}\n", row.n, row.target_mv,
                           row.model_mv, row.residual_mv, row.relative, p.v_sat, p.tau_ns);
  }
  return r;
}

std::map<std::size_t, double> parse_targets(const std::vector<std::string>& items) {
  std::map<std::size_t, double> out;
  for (const auto& it : items) {
    const auto colon = it.find(':');
    if (colon == std::string::npos) throw Error(ErrorKind::Config, fmt::format("target '{}' is not N:mV", it));
    try {
      out[std::stoul(it.substr(0, colon))] = std::stod(it.substr(colon + 1));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Config, fmt::format("target '{}' is not N:mV", it));
    }
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Behavioral simulator and cost model for the AGNI in-DRAM stochastic-to-binary converter"};
  app.set_version_flag("--version", AGNI_VERSION);
  app.require_subcommand(1);

  Session session;
  for (int i = 0; i < argc; ++i) session.argv.emplace_back(argv[i]);
  std::string out;

  // convert
  auto* convert_cmd = app.add_subcommand("convert", "Convert one stochastic operand");
  std::size_t conv_n = 0;
  std::string operand;
  AnalogFlags conv_flags;
  convert_cmd->add_option("--n", conv_n, "Operand length N")->required();
  convert_cmd->add_option("--operand", operand, "Operand bits, index 0 first")->required();
  conv_flags.add(convert_cmd);

  // trace
  auto* trace_cmd = app.add_subcommand("trace", "Convert one operand and emit the waveform trace");
  std::size_t trace_n = 0;
  std::string trace_operand;
  double trace_step = 0.25;
  AnalogFlags trace_flags;
  trace_cmd->add_option("--n", trace_n, "Operand length N")->required();
  trace_cmd->add_option("--operand", trace_operand, "Operand bits, index 0 first")->required();
  trace_cmd->add_option("--step", trace_step, "Sample step in ns")->check(CLI::PositiveNumber);
  trace_flags.add(trace_cmd);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Error metrics over many operands");
  std::vector<std::size_t> sweep_ns;
  bool exhaustive = false;
  std::size_t samples = 0;
  double fit_target = 0.0;
  bool allow_large = false;
  unsigned workers = 0;
  AnalogFlags sweep_flags;
  sweep_cmd->add_option("--n", sweep_ns, "Operand lengths")->required()->delimiter(',');
  auto* ex_opt = sweep_cmd->add_flag("--exhaustive", exhaustive, "All 2^N operands");
  auto* sample_opt = sweep_cmd->add_option("--samples", samples, "Number of random operands");
  ex_opt->excludes(sample_opt);
  auto* fit_opt = sweep_cmd->add_option("--fit-sigma", fit_target, "Fit sigma to this MAPE (%) per N")
                      ->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--allow-large", allow_large, "Allow exhaustive sweeps above N=16");
  sweep_cmd->add_option("--workers", workers, "Worker threads (default: available parallelism)");
  sweep_flags.add(sweep_cmd);

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Area, latency and energy of AGNI and the baselines");
  std::vector<std::size_t> compare_ns = {16, 32, 64, 128, 256};
  std::string baselines_file;
  compare_cmd->add_option("--n", compare_ns, "Operand lengths")->delimiter(',')->capture_default_str();
  compare_cmd->add_option("--baselines", baselines_file, "Fitted baseline constants (JSON)");

  // cnn-eval
  auto* cnn_cmd = app.add_subcommand("cnn-eval", "StoB-phase latency and EDP of CNN models");
  std::string models_dir;
  std::vector<std::string> backends = {"agni", "ppc", "spc"};
  std::size_t cnn_n = 256;
  std::size_t tiles = 1024;
  std::size_t cnn_l = 512;
  std::size_t per_tile = 1;
  std::string cnn_baselines;
  cnn_cmd->add_option("--models", models_dir, "Directory of model specs (*.json)");
  cnn_cmd->add_option("--backend", backends, "Back-ends: agni,ppc,spc")->delimiter(',')->capture_default_str();
  cnn_cmd->add_option("--n", cnn_n, "Operand length N")->capture_default_str();
  cnn_cmd->add_option("--tiles", tiles, "DRAM tiles")->check(CLI::PositiveNumber)->capture_default_str();
  cnn_cmd->add_option("--l", cnn_l, "Bitlines per tile")->check(CLI::PositiveNumber)->capture_default_str();
  cnn_cmd->add_option("--baseline-converters", per_tile, "Baseline converters per tile")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cnn_cmd->add_option("--baselines", cnn_baselines, "Fitted baseline constants (JSON)");

  // calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "Fit the LANE charging model to V_MAX targets");
  std::string cal_mode = "auto";
  std::vector<std::string> cal_targets;
  double cal_window = 24.0;
  double cal_tol = 0.10;
  cal_cmd->add_option("--mode", cal_mode, "auto|global|per-n")->capture_default_str();
  cal_cmd->add_option("--targets", cal_targets, "N:mV pairs (default: the N=16..256 table)")->delimiter(',');
  cal_cmd->add_option("--window", cal_window, "Charge window in ns")->check(CLI::PositiveNumber);
  cal_cmd->add_option("--tolerance", cal_tol, "Accepted relative residual")->check(CLI::PositiveNumber);

  // fit-baselines
  auto* fitb_cmd = app.add_subcommand("fit-baselines", "Fit ParallelPC/SerialPC constants to the ratio anchors");

  // schedule
  auto* sched_cmd = app.add_subcommand("schedule", "Print or validate a signal schedule");
  std::string sched_file;
  sched_cmd->add_option("--file", sched_file, "Schedule file to validate (default: built-in)");

  for (auto* sub : {trace_cmd, sweep_cmd, compare_cmd, cnn_cmd, cal_cmd, fitb_cmd, sched_cmd, convert_cmd}) {
    sub->add_option("--out", out, "json|csv|table, or an output path (.json/.csv/.txt)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto out_or = [&](const char* def) { return out.empty() ? std::string(def) : out; };

  if (*convert_cmd) {
    const auto cfg = tile_config(session, conv_n, conv_flags);
    const auto word = StochasticWord::parse(operand);
    if (word.size() != conv_n) {
      throw Error(ErrorKind::Config, fmt::format("operand has {} bits, --n is {}", word.size(), conv_n));
    }
    emit(session, out_or("table"), render_conversion(convert(cfg, word)));
  } else if (*trace_cmd) {
    auto cfg = tile_config(session, trace_n, trace_flags);
    cfg.trace = true;
    cfg.trace_step_ns = trace_step;
    const auto word = StochasticWord::parse(trace_operand);
    if (word.size() != trace_n) {
      throw Error(ErrorKind::Config, fmt::format("operand has {} bits, --n is {}", word.size(), trace_n));
    }
    emit(session, out_or("csv"), render_trace(emit_trace(convert(cfg, word))));
  } else if (*sweep_cmd) {
    const SweepMode mode = sample_opt->count() ? SweepMode::sample(samples) : SweepMode::exhaustive();
    std::vector<ErrorReport> reports;
    json extra = json::array();
    for (std::size_t n : sweep_ns) {
      const auto cfg = tile_config(session, n, sweep_flags);
      const SweepOptions opts{resolve_workers(workers), allow_large, cfg.analog.rng_seed};
      if (fit_opt->count()) {
        const auto f = fit_sigma(cfg, fit_target, mode, opts);
        reports.push_back(f.report);
        extra.push_back({{"n", n}, {"target_mape_pct", f.target_mape_pct}, {"evaluations", f.evaluations}});
      } else {
        reports.push_back(sweep(cfg, mode, opts));
      }
    }
    json j = json::array();
    for (const auto& r : reports) j.push_back(to_json(r));
    Rendered r{{{"reports", j}}, to_csv(reports), to_table(reports)};
    if (!extra.empty()) r.j["sigma_fit"] = extra;
    emit(session, out_or("table"), r);
  } else if (*compare_cmd) {
    const CostModel model(resolve_baselines(session, baselines_file));
    const auto rows = compare(compare_ns, model);
    emit(session, out_or("table"), {to_json(rows), comparison_csv(rows), comparison_table(rows)});
  } else if (*cnn_cmd) {
    const CostModel costs(resolve_baselines(session, cnn_baselines));
    const auto models = load_models(resolve_models_dir(models_dir));
    for (const auto& m : models) {
      json layers = json::array();
      for (const auto& l : m.layers) layers.push_back({l.name, l.output_elements});
      session.hashes["model." + m.name] = hex64(fnv1a64(layers.dump()));
    }
    std::vector<PimSystemConfig> variants;
    for (const auto& b : backends) variants.push_back({tiles, cnn_l, cnn_n, parse_design(b), per_tile});
    const auto rep = report(models, variants, costs);
    auto j = to_json(rep);
    j["system"] = {{"tiles", tiles}, {"l", cnn_l}, {"n", cnn_n}, {"baseline_converters_per_tile", per_tile}};
    emit(session, out_or("table"), {j, report_csv(rep), report_table(rep)});
  } else if (*cal_cmd) {
    CalibrationOptions o;
    o.mode = parse_calibration_mode(cal_mode);
    o.window_ns = cal_window;
    o.tolerance = cal_tol;
    const auto targets = cal_targets.empty() ? table_vmax_targets_mv() : parse_targets(cal_targets);
    emit(session, out_or("table"), render_calibration(calibrate(targets, o)));
  } else if (*fitb_cmd) {
    const auto fit = fit_baselines();
    Rendered r{baseline_file_json(fit, AGNI_VERSION), "design,n,metric,target,modeled,factor\n", ""};
    r.table = fmt::format("converged {}  max_factor {:.4f}\n{}", fit.converged, fit.max_factor,
                          to_json(fit.constants).dump(2) + "\n");
    for (const auto& res : fit.residuals) {
      const auto& a = res.anchor;
      for (auto [name, t, m] : {std::tuple{"area", a.target.area, res.modeled.area},
                                {"area_latency", a.target.area_latency, res.modeled.area_latency},
                                {"edp", a.target.edp, res.modeled.edp}}) {
        r.csv += fmt::format("{},{},{},{:.17g},{:.17g},{:.17g}\n", to_string(a.design), a.n, name, t, m,
                             std::max(m / t, t / m));
        r.table += fmt::format("{:<11} N={:<4} {:<13} target {:>7.1f}  modeled {:>9.2f}\n", to_string(a.design), a.n,
                               name, t, m);
      }
    }
    emit(session, out_or("json"), r);
  } else if (*sched_cmd) {
    SignalSchedule s = default_schedule();
    if (!sched_file.empty()) {
      session.hashes["schedule"] = hex64(fnv1a64(read_file(sched_file)));
      s = load_schedule(sched_file);
    }
    const auto v = validate(s);
    if (!v.empty()) {
      std::string msg = fmt::format("schedule has {} violation(s):", v.size());
      for (const auto& x : v) msg += fmt::format(" [{}] {};", to_string(x.kind), x.message);
      throw Error(ErrorKind::Schedule, msg);
    }
    emit(session, out_or("table"), render_schedule(s));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const agni::Error& e) {
    std::cerr << json{{"error", {{"kind", agni::to_string(e.kind())}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  }
}
