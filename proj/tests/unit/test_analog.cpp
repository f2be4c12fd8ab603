#include <cmath>

#include "agni/analog.hpp"
#include "agni/calibration.hpp"
#include "agni/error.hpp"
#include "doctest.h"

using namespace agni;

namespace {

// Closed-form LANE level from an empty LANE, written independently.
double ref_level(const AnalogParams& p, double k, double d) {
  return p.v_sat * (1.0 - std::exp(-k * d / (p.tau_ns * p.c_ratio_lane_bl)));
}

AnalogState state_with(std::vector<double> bl, std::vector<double> cell) {
  AnalogState s;
  s.bitline_v = std::move(bl);
  s.cell_v = std::move(cell);
  s.sa_latched.assign(s.bitline_v.size(), std::nullopt);
  return s;
}

}  // namespace

TEST_CASE("precharge") {
  const AnalogParams p;
  auto s = AnalogState::idle(StochasticWord::parse("1001"), p);
  s.bitline_v = {0.0, 1.2, 0.3, 0.9};
  auto a = precharge(s, 0.5 * p.vdd);
  for (double v : a.bitline_v) CHECK(v == 0.6);
  CHECK(precharge(a, 0.5 * p.vdd) == a);
  const std::vector<double> taps = {0.1, 0.2, 0.3, 0.4};
  auto b = precharge(s, taps);
  CHECK(b.bitline_v == taps);
  CHECK(precharge(b, taps) == b);
}

TEST_CASE("cell_share perturbation signs") {
  const AnalogParams p;
  const double half = p.vdd / 2;
  auto s = cell_share(state_with({half, half, half}, {p.vdd, 0.0, half}), p);
  CHECK(s.bitline_v[0] > half);
  CHECK(s.bitline_v[1] < half);
  CHECK(s.bitline_v[2] == doctest::Approx(half).epsilon(1e-15));
  // Capacitive average with C_cell / C_bl = r.
  const double r = p.c_ratio_cell_bl;
  CHECK(s.bitline_v[0] == doctest::Approx((half + r * p.vdd) / (1 + r)));
}

TEST_CASE("sense_amplify decisions") {
  const AnalogParams p;
  NoiseSource quiet(0.0, 1);
  const double half = p.vdd / 2;
  const std::vector<double> refs(3, half);
  auto s = sense_amplify(state_with({half + 0.01, half - 0.01, half}, {0, 0, 0}), refs, p, quiet, false);
  CHECK(s.sa_latched[0] == Bit{1});
  CHECK(s.bitline_v[0] == p.vdd);
  CHECK(s.sa_latched[1] == Bit{0});
  CHECK(s.bitline_v[1] == 0.0);
  CHECK(s.sa_latched[2] == Bit{0});  // tie latches 0
  CHECK(s.cell_v == std::vector<double>{0, 0, 0});

  auto w = sense_amplify(state_with({half + 0.01, half - 0.01, half}, {0, 0, 0}), refs, p, quiet, true);
  CHECK(w.cell_v == std::vector<double>{p.vdd, 0, 0});

  // Idempotent at sigma 0.
  CHECK(sense_amplify(s, refs, p, quiet, false) == s);
}

TEST_CASE("lane_charge against the closed form") {
  AnalogParams p;
  p.v_sat = 0.9;
  p.tau_ns = 150;
  AnalogState s = AnalogState::idle(StochasticWord::parse("11110000"), p);
  for (std::size_t k = 0; k <= 8; ++k) {
    CHECK(lane_level(p, k, 24) == doctest::Approx(ref_level(p, static_cast<double>(k), 24)).epsilon(1e-13));
    CHECK(lane_charge(s, k, 24, p).lane_v == lane_level(p, k, 24));
  }
  CHECK(lane_charge(s, 0, 24, p).lane_v == s.lane_v);
  CHECK_THROWS_AS(lane_charge(s, 9, 24, p), Error);

  // Two half-windows compose to one full window.
  auto half = lane_charge(lane_charge(s, 3, 12, p), 3, 12, p);
  CHECK(half.lane_v == doctest::Approx(lane_level(p, 3, 24)).epsilon(1e-12));
}

TEST_CASE("lane levels are strictly increasing in k and duration") {
  const auto& p = default_params(4);
  CHECK(lane_level(p, 4, 24) * 1e3 == doctest::Approx(514.0).epsilon(0.05));
  for (std::size_t k = 1; k <= 4; ++k) CHECK(lane_level(p, k - 1, 24) < lane_level(p, k, 24));
  for (double d : {1.0, 5.0, 12.0, 24.0}) CHECK(lane_level(p, 2, d) < lane_level(p, 2, d + 1.0));
}

TEST_CASE("lane_share examples on a uniform ladder") {
  AnalogParams p;
  const double v_max = 0.5;
  const auto ladder = ReferenceLadder::uniform(4, v_max);
  AnalogState s = AnalogState::idle(StochasticWord::parse("0000"), p);
  s = precharge(s, ladder.taps());

  auto perturbed = [&](double lane) {
    AnalogState t = s;
    t.lane_v = lane;
    t = lane_share(t, p);
    std::vector<int> dir;
    for (std::size_t i = 0; i < 4; ++i) dir.push_back(t.bitline_v[i] > ladder.taps()[i] ? 1 : -1);
    return dir;
  };
  CHECK(perturbed(0.5 * v_max) == std::vector<int>{1, 1, -1, -1});
  CHECK(perturbed(0.0) == std::vector<int>{-1, -1, -1, -1});
  CHECK(perturbed(v_max) == std::vector<int>{1, 1, 1, 1});
}

TEST_CASE("ladders") {
  const auto u = ReferenceLadder::uniform(4, 0.8);
  CHECK(u.taps()[0] == doctest::Approx(0.1));
  CHECK(u.taps()[3] == doctest::Approx(0.7));
  const std::vector<double> levels = {0.0, 0.2, 0.3, 0.35, 0.38};
  const auto m = ReferenceLadder::level_matched(levels);
  CHECK(m.taps()[0] == doctest::Approx(0.1));
  CHECK(m.taps()[3] == doctest::Approx(0.365));
  const std::vector<double> flat = {0.0, 0.2, 0.2};
  CHECK_THROWS_AS(ReferenceLadder::level_matched(flat), Error);
}

TEST_CASE("noise is reproducible per seed") {
  NoiseSource a(5.0, 42), b(5.0, 42), c(5.0, 43);
  for (int i = 0; i < 10; ++i) {
    const double x = a.draw();
    CHECK(x == b.draw());
    CHECK(x != c.draw());
  }
  NoiseSource zero(0.0, 42);
  CHECK(zero.draw() == 0.0);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 5) == derive_seed(1, 5));
}

TEST_CASE("parameter validation") {
  AnalogParams p;
  p.v_sat = 1.5;  // above vdd
  CHECK_THROWS_AS(p.validate(), Error);
  p = AnalogParams{};
  p.tau_ns = 0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("calibration: single target is solved exactly") {
  CalibrationOptions o;
  const auto r = calibrate({{4, 514.0}}, o);
  CHECK(r.max_relative_residual < 1e-9);
  const auto& p = r.for_n(4);
  CHECK(ref_level(p, 4, 24) * 1e3 == doctest::Approx(514.0).epsilon(1e-9));
}

TEST_CASE("calibration: synthetic ground truth is recovered") {
  AnalogParams truth;
  truth.v_sat = 0.9;
  truth.tau_ns = 2000;
  std::map<std::size_t, double> targets;
  for (std::size_t n : {16, 32, 64, 128, 256}) targets[n] = 1e3 * ref_level(truth, static_cast<double>(n), 24);
  CalibrationOptions o;
  o.mode = CalibrationMode::Global;
  const auto r = calibrate(targets, o);
  CHECK(r.mode == CalibrationMode::Global);
  CHECK(r.for_n(64).v_sat == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(r.for_n(64).tau_ns == doctest::Approx(2000).epsilon(1e-6));
  CHECK(r.max_relative_residual < 1e-8);
}

TEST_CASE("calibration: table targets") {
  const auto& t = table_vmax_targets_mv();
  CHECK(t.at(16) == 630);
  CHECK(t.at(256) == 785);
  const auto a = calibrate(t);
  CHECK(a.met_tolerance);
  CHECK(a.max_relative_residual <= 0.10);
  CalibrationOptions per;
  per.mode = CalibrationMode::PerN;
  const auto b = calibrate(t, per);
  CHECK(b.mode == CalibrationMode::PerN);
  CHECK(b.max_relative_residual < 1e-9);
  CHECK_THROWS_AS(calibrate({}), Error);
  CHECK_THROWS_AS(calibrate({{16, -3.0}}), Error);
}
