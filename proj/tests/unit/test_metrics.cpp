#include <algorithm>
#include <cmath>
#include <random>

#include "agni/error.hpp"
#include "agni/metrics.hpp"
#include "doctest.h"

using namespace agni;

using V = std::vector<double>;

TEST_CASE("mae examples") {
  CHECK(mae(V{2, 3}, V{2, 3}) == 0.0);
  CHECK(mae(V{2}, V{4}) == 2.0);
  CHECK(mae(V{1, 2, 3, 4}, V{0, 1, 2, 3}) == 1.0);
  CHECK_THROWS_AS(mae(V{}, V{}), Error);
  CHECK_THROWS_AS(mae(V{1}, V{1, 2}), Error);
}

TEST_CASE("mape examples") {
  CHECK(mape(V{3}, V{4}).percent == doctest::Approx(25.0));
  CHECK(mape(V{1, 5}, V{1, 5}).percent == 0.0);
  const auto r = mape(V{1, 0}, V{2, 0});
  CHECK(r.percent == doctest::Approx(50.0));
  CHECK(r.excluded_zero_actuals == 1);
  CHECK(r.included == 1);
  try {
    mape(V{1, 2}, V{0, 0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UndefinedMetric);
  }
}

TEST_CASE("rmse examples") {
  CHECK(rmse(V{4, 5}, V{4, 5}) == 0.0);
  CHECK(rmse(V{0, 2}, V{2, 0}) == 2.0);
  CHECK(rmse(V{3.5, 1.5, 9.5}, V{1, -1, 7}) == doctest::Approx(2.5));
  try {
    rmse(V{}, V{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Arity);
  }
}

TEST_CASE("metric properties on random vectors") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 40;
    V p(n), a(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = u(rng);
      a[i] = u(rng);
    }
    CHECK(rmse(p, a) >= mae(p, a));
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    V p2(n), a2(n);
    for (std::size_t i = 0; i < n; ++i) {
      p2[i] = p[idx[i]];
      a2[i] = a[idx[i]];
    }
    CHECK(mae(p2, a2) == doctest::Approx(mae(p, a)).epsilon(1e-12));
    CHECK(rmse(p2, a2) == doctest::Approx(rmse(p, a)).epsilon(1e-12));
    CHECK(mape(p2, a2).percent == doctest::Approx(mape(p, a).percent).epsilon(1e-12));
    CHECK(mae(a, a) == 0.0);
    CHECK(rmse(a, a) == 0.0);
  }
}

TEST_CASE("noiseless sweep has zero error") {
  for (std::size_t n : {4, 8, 16}) {
    const auto r = sweep(TileConfig::defaults(n), SweepMode::exhaustive(), {.workers = 2});
    CHECK(r.mae == 0.0);
    CHECK(r.mape_pct == 0.0);
    CHECK(r.rmse == 0.0);
    CHECK(r.saturated_excluded == 1);
    CHECK(r.excluded_zero_actuals == 1);
    CHECK(r.samples == (std::size_t{1} << n) - 1);
    CHECK(r.bubbles == 0);
  }
  const auto s = sweep(TileConfig::defaults(64), SweepMode::sample(2000), {.workers = 2, .seed = 4});
  CHECK(s.mae == 0.0);
  CHECK(s.samples + s.saturated_excluded == 2000);
}

TEST_CASE("sweep matches a direct evaluation") {
  auto cfg = TileConfig::defaults(8);
  cfg.analog.noise_sigma_mv = 25;
  const SweepOptions o{.workers = 1, .seed = 99};
  const auto r = sweep(cfg, SweepMode::exhaustive(), o);

  const Converter conv(cfg);
  V pred, actual;
  std::size_t bubbles = 0;
  for (unsigned v = 0; v < 256; ++v) {
    std::vector<Bit> bits(8);
    for (unsigned j = 0; j < 8; ++j) bits[j] = (v >> j) & 1u;
    const StochasticWord w(bits);
    const auto c = conv.convert(w, derive_seed(99, v));
    if (c.bubble) ++bubbles;
    const auto ones = static_cast<double>(std::count(bits.begin(), bits.end(), Bit{1}));
    if (ones == 8) continue;
    pred.push_back(c.binary.value);
    actual.push_back(ones);
  }
  CHECK(r.samples == pred.size());
  CHECK(r.mae == doctest::Approx(mae(pred, actual)).epsilon(1e-12));
  CHECK(r.rmse == doctest::Approx(rmse(pred, actual)).epsilon(1e-12));
  CHECK(r.mape_pct == doctest::Approx(mape(pred, actual).percent).epsilon(1e-12));
  CHECK(r.bubbles == bubbles);
  CHECK(r.mae > 0.0);
  CHECK(r.rmse >= r.mae);
}

TEST_CASE("noise never reduces the error") {
  auto cfg = TileConfig::defaults(16);
  const auto quiet = sweep(cfg, SweepMode::exhaustive(), {.workers = 2});
  cfg.analog.noise_sigma_mv = 8;
  const auto noisy = sweep(cfg, SweepMode::exhaustive(), {.workers = 2});
  CHECK(quiet.mae <= noisy.mae);
  CHECK(quiet.mape_pct <= noisy.mape_pct);
  CHECK(quiet.rmse <= noisy.rmse);
}

TEST_CASE("sweep reports do not depend on the worker count") {
  auto cfg = TileConfig::defaults(16);
  cfg.analog.noise_sigma_mv = 9;
  const auto a = sweep(cfg, SweepMode::exhaustive(), {.workers = 1, .seed = 5});
  const auto b = sweep(cfg, SweepMode::exhaustive(), {.workers = 3, .seed = 5});
  CHECK(a == b);
  const auto c = sweep(TileConfig::defaults(32), SweepMode::sample(3000), {.workers = 1, .seed = 6});
  const auto d = sweep(TileConfig::defaults(32), SweepMode::sample(3000), {.workers = 4, .seed = 6});
  CHECK(c == d);
}

TEST_CASE("sweep guards") {
  try {
    sweep(TileConfig::defaults(32), SweepMode::exhaustive());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ResourceGuard);
  }
  CHECK_THROWS_AS(sweep(TileConfig::defaults(16), SweepMode::sample(999)), Error);
}

TEST_CASE("fit_sigma brackets the target") {
  const auto f = fit_sigma(TileConfig::defaults(16), 3.58, SweepMode::sample(4000), {.workers = 2, .seed = 3});
  CHECK(f.sigma_mv > 0.0);
  CHECK(f.report.mape_pct >= 3.58);
  CHECK(f.report.mape_pct < 3.58 * 1.2);
  CHECK(f.report.sigma_mv == f.sigma_mv);
  CHECK_THROWS_AS(fit_sigma(TileConfig::defaults(16), 0.0, SweepMode::sample(4000)), Error);
}

TEST_CASE("table targets") {
  const auto& t = table_error_targets();
  CHECK(t.size() == 5);
  CHECK(t.at(16).mape_pct == 3.58);
  CHECK(t.at(64).rmse == 1.03);
  CHECK(t.at(256).v_max_mv == 785);
}

TEST_CASE("report rendering") {
  const auto r = sweep(TileConfig::defaults(8), SweepMode::exhaustive(), {.workers = 1});
  const auto j = to_json(r);
  CHECK(j.at("n") == 8);
  CHECK(j.at("mode") == "exhaustive");
  const std::vector<ErrorReport> rs = {r};
  CHECK(to_csv(rs).rfind("n,mae,", 0) == 0);
  CHECK(to_table(rs).find("V_MAX(mV)") != std::string::npos);
}
