#include <cmath>
#include <random>

#include "doctest.h"
#include "mgtr/errors.hpp"
#include "mgtr/rf_analysis.hpp"
#include "mgtr/twotone.hpp"
#include "mgtr/units.hpp"
#include "oracles.hpp"

using namespace mgtr;

namespace {

TwoToneSpec poly_spec(double a1, double a2, double a3, std::vector<double> pins) {
  TwoToneSpec s;
  s.pin_dbm_sweep = std::move(pins);
  s.nonlinearity = PolynomialNonlinearity{a1, a2, a3};
  return s;
}

std::vector<double> range(double lo, double hi, double step) {
  std::vector<double> v;
  for (double p = lo; p <= hi + 1e-9; p += step) v.push_back(p);
  return v;
}

double pin_for_amplitude(double a, double r) { return watts_to_dbm(available_power(a, r)); }

}  // namespace

TEST_CASE("coherent grid") {
  TwoToneSpec s;
  const CoherentGrid g = coherent_grid(s);
  CHECK(g.k2 - g.k1 == s.cycles);
  CHECK(g.f1 == doctest::Approx(2.0975e9));
  CHECK(g.f2 == doctest::Approx(2.1025e9));
  CHECK(g.snap_hz <= s.max_snap_hz);
  CHECK(g.n_samples == s.samples_per_period * (2 * g.k2 - g.k1));
  CHECK(g.sample_rate / g.n_samples == doctest::Approx((g.f2 - g.f1) / s.cycles));

  SUBCASE("an off-grid request beyond the tolerance is refused") {
    TwoToneSpec t;
    t.f1 = 2.0975e9 + 3e5;
    t.max_snap_hz = 1e3;
    CHECK_THROWS_AS((void)coherent_grid(t), ConfigError);
  }
  SUBCASE("invalid specs") {
    TwoToneSpec t;
    t.f2 = t.f1;
    CHECK_THROWS_AS((void)coherent_grid(t), ConfigError);
    t = TwoToneSpec{};
    t.f1 = 1e9;
    t.f2 = 3e9;
    CHECK_THROWS_AS((void)coherent_grid(t), ConfigError);
  }
}

TEST_CASE("line spectrum") {
  SUBCASE("pure sinusoid stays on its bin") {
    const int n = 4096, k0 = 37;
    std::vector<double> x(n);
    for (int t = 0; t < n; ++t) x[t] = 0.5 * std::cos(kTwoPi * static_cast<double>((k0 * t) % n) / n);
    const LineSpectrum s = line_spectrum(x);
    CHECK(s.amplitude[k0] == doctest::Approx(0.5).epsilon(1e-14));
    double worst = 0;
    for (int k = 0; k < static_cast<int>(s.amplitude.size()); ++k)
      if (k != k0) worst = std::max(worst, s.amplitude[k]);
    CHECK(20 * std::log10(worst / 0.5) < -250.0);
    CHECK(std::abs(s.time_power - s.spectral_power) / s.time_power < 1e-12);
  }
}

TEST_CASE("linear device has no intermodulation") {
  const auto r = simulate_two_tone(poly_spec(0.02, 0.0, 0.0, {-30.0, -10.0}));
  for (const auto& p : r) {
    CHECK(p.imd3_dbc < -180.0);
    CHECK(p.parseval_residual < 1e-10);
    CHECK(p.p_fund - p.pin_dbm == doctest::Approx(20 * std::log10(0.02)).epsilon(1e-9));
  }
}

TEST_CASE("pure cubic") {
  const double a = 0.1;
  const auto r = simulate_two_tone(poly_spec(0.0, 0.0, 1e-3, {pin_for_amplitude(a, 50.0)}));
  CHECK(r[0].amp_imd3_lo == doctest::Approx(0.75 * 1e-3 * a * a * a).epsilon(1e-10));
  CHECK(r[0].amp_imd3_lo == doctest::Approx(7.5e-7).epsilon(1e-10));
  CHECK(r[0].amp_fund == doctest::Approx(2.25 * 1e-3 * a * a * a).epsilon(1e-10));
}

TEST_CASE("cubic device sweep") {
  const double a1 = 0.02, a3 = -0.4e-3;
  const double p0 = oracle::memoryless_iip3_dbm(a1, a3, 50.0);
  const auto r = simulate_two_tone(poly_spec(a1, 0.0, a3, range(p0 - 60, p0 - 30, 2.0)));
  const SweepFit fit = fit_sweep(r);
  CHECK(fit.qualifying_pin.size() >= 4);
  CHECK(fit.imd3_free_slope == doctest::Approx(3.0).epsilon(0.1 / 3.0));
  CHECK(fit.fund_free_slope == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::abs(fit.iip3_dbm - p0) < 0.5);
  for (const auto& p : r) {
    CHECK(std::abs(p.p_imd3_lo - p.p_imd3_hi) < 0.01);
    CHECK(p.parseval_residual < 1e-10);
  }

  SUBCASE("matches the closed form") {
    const double analytic =
        volterra_iip3(PowerSeries::from_derivatives(0, a1, 0, 6 * a3), {}, [] {
          ImpedanceEnv e;
          e.load = LoadKind::inductive;
          return e;
        }(), 2.0975e9, 2.1025e9).dbm;
    CHECK(std::abs(extract_iip3(r) - analytic) < 0.5);
  }
  SUBCASE("a tenth of the cubic term gains 10 dB") {
    const auto q = simulate_two_tone(poly_spec(a1, 0.0, 0.1 * a3, range(p0 - 60, p0 - 30, 2.0)));
    CHECK(extract_iip3(q) - extract_iip3(r) == doctest::Approx(10.0).epsilon(0.02));
  }
  SUBCASE("deterministic") {
    const auto again = simulate_two_tone(poly_spec(a1, 0.0, a3, range(p0 - 60, p0 - 30, 2.0)));
    for (std::size_t k = 0; k < r.size(); ++k) {
      CHECK(again[k].p_fund == r[k].p_fund);
      CHECK(again[k].p_imd3_lo == r[k].p_imd3_lo);
    }
  }
}

TEST_CASE("random memoryless instances agree with the closed form") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ImpedanceEnv e;
  e.load = LoadKind::inductive;
  for (int k = 0; k < 10; ++k) {
    const double a1 = std::exp(std::log(1e-3) + u(rng) * std::log(1e2));
    const double a3 = (u(rng) < 0.5 ? -1 : 1) * a1 * std::exp(std::log(1e-3) + u(rng) * std::log(1e3));
    const double analytic = volterra_iip3(PowerSeries::from_derivatives(0, a1, 0, 6 * a3), {}, e,
                                          2.0975e9, 2.1025e9).dbm;
    const auto r = simulate_two_tone(poly_spec(a1, 0.0, a3, range(analytic - 60, analytic - 30, 3.0)));
    CHECK(std::abs(extract_iip3(r) - analytic) < 0.5);
  }
}

TEST_CASE("gain read from the sweep") {
  const auto r = simulate_two_tone(poly_spec(2.8183829312644538, 0.0, 0.0, range(-40, -20, 5)));
  CHECK(gain_from_sweep(r) == doctest::Approx(9.0).epsilon(1e-9));
  CHECK(fit_sweep(simulate_two_tone(poly_spec(2.818, 0.0, -1e-3, range(-60, -40, 5)))).gain_db ==
        doctest::Approx(9.0).epsilon(0.05 / 9));
}

TEST_CASE("unusable sweeps") {
  CHECK_THROWS_AS((void)fit_sweep({}), SweepRangeError);
  // A linear device has its IMD3 at the floor everywhere.
  const auto lin = simulate_two_tone(poly_spec(0.02, 0.0, 0.0, range(-40, -20, 5)));
  CHECK_THROWS_AS((void)extract_iip3(lin), SweepRangeError);
  // Three points are not enough.
  const auto few = simulate_two_tone(poly_spec(0.02, 0.0, -4e-4, {-50, -45, -40}));
  CHECK_THROWS_AS((void)extract_iip3(few), SweepRangeError);
}

TEST_CASE("full device record") {
  const LnaDesign d = default_design();
  TwoToneSpec s = design_two_tone_spec(d, 2.1e9);
  CHECK(s.transimpedance_ohm == doctest::Approx(kTwoPi * 2.1e9 * d.l2_h));
  CHECK(s.f2 - s.f1 == doctest::Approx(5e6));
  s.pin_dbm_sweep = {-60.0};
  const auto r = simulate_two_tone(s);
  CHECK(r[0].parseval_residual < 1e-10);
  CHECK(r[0].p_fund > r[0].p_imd3_lo);
}
