#include "agni/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "agni/error.hpp"

namespace agni {

namespace {

void check_pair(std::span<const double> pred, std::span<const double> actual) {
  if (pred.empty() || pred.size() != actual.size()) {
    throw Error(ErrorKind::Arity,
                fmt::format("metric needs equal non-empty inputs (got {} and {})", pred.size(), actual.size()));
  }
}

}  // namespace

double mae(std::span<const double> pred, std::span<const double> actual) {
  check_pair(pred, actual);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - actual[i]);
  return sum / static_cast<double>(pred.size());
}

MapeResult mape(std::span<const double> pred, std::span<const double> actual) {
  check_pair(pred, actual);
  MapeResult r;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (actual[i] == 0.0) {
      ++r.excluded_zero_actuals;
      continue;
    }
    sum += std::abs((actual[i] - pred[i]) / actual[i]);
    ++r.included;
  }
  if (r.included == 0) throw Error(ErrorKind::UndefinedMetric, "MAPE is undefined when every actual value is 0");
  r.percent = 100.0 * sum / static_cast<double>(r.included);
  return r;
}

double rmse(std::span<const double> pred, std::span<const double> actual) {
  check_pair(pred, actual);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - actual[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(pred.size()));
}

namespace {

// Joint histogram of (actual count, predicted count). Integer counts make the
// merge associative, and metrics are read back in a fixed order.
struct Histogram {
  std::size_t n = 0;
  std::vector<std::uint64_t> cells;  // (n + 1) x (n + 1)
  std::uint64_t bubbles = 0;

  explicit Histogram(std::size_t n_) : n(n_), cells((n_ + 1) * (n_ + 1), 0) {}
  void add(std::size_t actual, std::size_t pred) { ++cells[actual * (n + 1) + pred]; }
  void merge(const Histogram& o) {
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] += o.cells[i];
    bubbles += o.bubbles;
  }
};

StochasticWord operand_for(const TileConfig& cfg, SweepMode mode, std::uint64_t seed, std::uint64_t i) {
  std::vector<Bit> bits(cfg.n);
  if (mode.kind == SweepMode::Kind::Exhaustive) {
    for (std::size_t j = 0; j < cfg.n; ++j) bits[j] = static_cast<Bit>((i >> j) & 1u);
  } else {
    const std::uint64_t stream = derive_seed(seed ^ 0x5eedf00dULL, i);
    for (std::size_t w = 0; w * 64 < cfg.n; ++w) {
      const std::uint64_t word = derive_seed(stream, w);
      for (std::size_t j = w * 64; j < std::min(cfg.n, w * 64 + 64); ++j) {
        bits[j] = static_cast<Bit>((word >> (j - w * 64)) & 1u);
      }
    }
  }
  return StochasticWord(std::move(bits));
}

ErrorReport report_from(const Histogram& h, const TileConfig& cfg, SweepMode mode, const SweepOptions& o) {
  ErrorReport r;
  r.n = cfg.n;
  r.v_max_mv = cfg.v_max() * 1e3;
  r.sigma_mv = cfg.analog.noise_sigma_mv;
  r.mode = mode.kind == SweepMode::Kind::Exhaustive ? "exhaustive" : fmt::format("sample({})", mode.count);
  r.seed = o.seed;
  r.bubbles = h.bubbles;

  std::uint64_t total = 0;
  std::uint64_t abs_sum = 0;
  std::uint64_t sq_sum = 0;
  std::uint64_t mape_count = 0;
  double mape_sum = 0.0;
  for (std::size_t a = 0; a <= h.n; ++a) {
    for (std::size_t p = 0; p <= h.n; ++p) {
      const std::uint64_t c = h.cells[a * (h.n + 1) + p];
      if (c == 0) continue;
      if (a == h.n) {
        r.saturated_excluded += c;
        continue;
      }
      const std::uint64_t d = a > p ? a - p : p - a;
      total += c;
      abs_sum += c * d;
      sq_sum += c * d * d;
      if (a == 0) {
        r.excluded_zero_actuals += c;
      } else {
        mape_count += c;
        mape_sum += static_cast<double>(c) * static_cast<double>(d) / static_cast<double>(a);
      }
    }
  }
  r.samples = total;
  const std::uint64_t all = total + r.saturated_excluded;
  r.bubble_flag_rate = all ? static_cast<double>(h.bubbles) / static_cast<double>(all) : 0.0;
  if (total > 0) {
    r.mae = static_cast<double>(abs_sum) / static_cast<double>(total);
    r.rmse = std::sqrt(static_cast<double>(sq_sum) / static_cast<double>(total));
  }
  if (mape_count > 0) r.mape_pct = 100.0 * mape_sum / static_cast<double>(mape_count);
  return r;
}

}  // namespace

ErrorReport sweep(const TileConfig& cfg_in, SweepMode mode, const SweepOptions& options) {
  TileConfig cfg = cfg_in;
  cfg.trace = false;
  std::uint64_t count = 0;
  if (mode.kind == SweepMode::Kind::Exhaustive) {
    if (cfg.n > 16 && !options.allow_large) {
      throw Error(ErrorKind::ResourceGuard,
                  fmt::format("exhaustive sweep over 2^{} operands refused; pass allow_large to override", cfg.n));
    }
    if (cfg.n >= 64) throw Error(ErrorKind::ResourceGuard, "exhaustive sweep beyond N = 32 is not representable");
    count = std::uint64_t{1} << cfg.n;
  } else {
    if (mode.count < kMinSampleCount) {
      throw Error(ErrorKind::Config, fmt::format("sample mode needs at least {} operands (got {})",
                                                 kMinSampleCount, mode.count));
    }
    count = mode.count;
  }

  const Converter conv(cfg);
  unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));

  std::vector<Histogram> parts(workers, Histogram(cfg.n));
  auto work = [&](unsigned w) {
    const std::uint64_t begin = count * w / workers;
    const std::uint64_t end = count * (w + 1) / workers;
    auto& h = parts[w];
    for (std::uint64_t i = begin; i < end; ++i) {
      const auto operand = operand_for(cfg, mode, options.seed, i);
      const auto r = conv.convert(operand, derive_seed(options.seed, i));
      h.add(popcount(operand), r.binary.value);
      if (r.bubble) ++h.bubbles;
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  Histogram total(cfg.n);
  for (const auto& h : parts) total.merge(h);
  return report_from(total, cfg, mode, options);
}

const std::map<std::size_t, TableRow>& table_error_targets() {
  static const std::map<std::size_t, TableRow> t = {
      {16, {0.28, 3.58, 0.41, 630}},  {32, {0.41, 3.93, 0.50, 715}},  {64, {0.37, 1.58, 1.03, 735}},
      {128, {0.29, 0.97, 0.43, 755}}, {256, {0.20, 0.59, 0.35, 785}},
  };
  return t;
}

SigmaFit fit_sigma(const TileConfig& cfg_in, double target_mape_pct, SweepMode mode, const SweepOptions& options) {
  if (!(target_mape_pct > 0.0)) throw Error(ErrorKind::Config, "target MAPE must be positive");
  TileConfig cfg = cfg_in;
  SigmaFit fit;
  fit.target_mape_pct = target_mape_pct;
  auto eval = [&](double sigma) {
    cfg.analog.noise_sigma_mv = sigma;
    ++fit.evaluations;
    return sweep(cfg, mode, options);
  };

  double lo = 0.0;
  double hi = 1.0;
  ErrorReport hi_report = eval(hi);
  while (hi_report.mape_pct < target_mape_pct) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e4) {
      throw Error(ErrorKind::Calibration,
                  fmt::format("no sigma up to {} mV reaches MAPE {}%", hi, target_mape_pct));
    }
    hi_report = eval(hi);
  }
  while ((hi - lo) > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    auto r = eval(mid);
    if (r.mape_pct < target_mape_pct) {
      lo = mid;
    } else {
      hi = mid;
      hi_report = r;
    }
  }
  fit.sigma_mv = hi;
  fit.report = hi_report;
  return fit;
}

nlohmann::json to_json(const ErrorReport& r) {
  return {{"n", r.n},
          {"mae", r.mae},
          {"mape_pct", r.mape_pct},
          {"rmse", r.rmse},
          {"v_max_mv", r.v_max_mv},
          {"samples", r.samples},
          {"excluded_zero_actuals", r.excluded_zero_actuals},
          {"saturated_excluded", r.saturated_excluded},
          {"bubbles", r.bubbles},
          {"bubble_flag_rate", r.bubble_flag_rate},
          {"sigma_mv", r.sigma_mv},
          {"mode", r.mode},
          {"seed", r.seed}};
}

std::string to_table(std::span<const ErrorReport> reports) {
  std::string out = fmt::format("{:>5} {:>8} {:>8} {:>8} {:>11} {:>9} {:>10} {:>9}\n", "N", "MAE", "MAPE%", "RMSE",
                                "V_MAX(mV)", "sigma_mV", "samples", "bubbles");
  for (const auto& r : reports) {
    out += fmt::format("{:>5} {:>8.4f} {:>8.4f} {:>8.4f} {:>11.1f} {:>9.4f} {:>10} {:>9}\n", r.n, r.mae, r.mape_pct,
                       r.rmse, r.v_max_mv, r.sigma_mv, r.samples, r.bubbles);
  }
  return out;
}

std::string to_csv(std::span<const ErrorReport> reports) {
  std::string out =
      "n,mae,mape_pct,rmse,v_max_mv,samples,excluded_zero_actuals,saturated_excluded,bubbles,sigma_mv,mode,seed\n";
  for (const auto& r : reports) {
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{},{},{},{},{:.17g},{},{}\n", r.n, r.mae, r.mape_pct,
                       r.rmse, r.v_max_mv, r.samples, r.excluded_zero_actuals, r.saturated_excluded, r.bubbles,
                       r.sigma_mv, r.mode, r.seed);
  }
  return out;
}

}  // namespace agni
