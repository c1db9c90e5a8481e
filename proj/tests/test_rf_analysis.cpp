#include <cmath>
#include <random>

#include "doctest.h"
#include "mgtr/bias_network.hpp"
#include "mgtr/errors.hpp"
#include "mgtr/rf_analysis.hpp"
#include "mgtr/units.hpp"
#include "oracles.hpp"

using namespace mgtr;

namespace {

PowerSeries cubic(double a1, double a2, double a3) {
  return PowerSeries::from_derivatives(0.0, a1, 2.0 * a2, 6.0 * a3);
}

ImpedanceEnv memoryless_env() {
  ImpedanceEnv env;
  env.load = LoadKind::inductive;
  return env;
}

}  // namespace

TEST_CASE("g_omega") {
  const PowerSeries s = cubic(24.3e-3, 0.0, 0.0);
  SUBCASE("no capacitance gives gm") {
    CHECK(g_omega(s, {}, {50, 0}, {50, 0}, 1e10) == Complex(24.3e-3, 0.0));
    CHECK(g_omega(s, {100e-15, 20e-15}, {50, 0}, {50, 0}, 0.0) ==
          Complex(24.3e-3 / (1.0 + 24.3e-3 / 120e-15 * 20e-15 * 50.0), 0.0));
  }
  SUBCASE("reference value") {
    const Complex g = g_omega(s, {100e-15, 20e-15}, {50, 0}, {50, 0}, kTwoPi * 4.2e9);
    CHECK(g.real() == doctest::Approx(0.020207900207900208).epsilon(1e-13));
    CHECK(g.imag() == doctest::Approx(0.0063992870764315868).epsilon(1e-13));
  }
  SUBCASE("random inputs against extended precision") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
      const double gm = 1e-3 + 0.1 * u(rng);
      const DeviceCaps c{1e-15 + 500e-15 * u(rng), 200e-15 * u(rng)};
      const Complex z1{10 + 90 * u(rng), 200 * (u(rng) - 0.5)};
      const Complex z2{1000 * u(rng), 200 * (u(rng) - 0.5)};
      const double w = kTwoPi * 1e10 * u(rng);
      const Complex got = g_omega(cubic(gm, 0, 0), c, z1, z2, w);
      const auto ref = oracle::g_omega(gm, c.c_gs, c.c_gd, z1, z2, w);
      CHECK(std::abs(got - Complex(ref)) <= 1e-12 * std::abs(Complex(ref)));
    }
  }
  SUBCASE("rejects negative frequency") {
    CHECK_THROWS_AS((void)g_omega(s, {}, {50, 0}, {50, 0}, -1.0), DomainError);
  }
}

TEST_CASE("second-order feedback term") {
  const ImpedanceEnv env = memoryless_env();
  const double w = kTwoPi * 2.1e9, dw = kTwoPi * 5e6;
  SUBCASE("vanishes without a2") {
    CHECK(g_ob(cubic(20e-3, 0.0, -4e-4), {100e-15, 20e-15}, env, dw, w) == Complex(0.0));
  }
  SUBCASE("memoryless collapse to a2^2/a1") {
    const PowerSeries s = cubic(20e-3, 3e-3, -4e-4);
    const Complex g = g_ob(s, {}, env, dw, w);
    CHECK(g.real() == doctest::Approx(3e-3 * 3e-3 / 20e-3).epsilon(1e-14));
    CHECK(g.imag() == 0.0);
    CHECK(eps_term(s, {}, env, dw, w).real() == doctest::Approx(-4e-4 - 4.5e-4).epsilon(1e-14));
  }
  SUBCASE("random inputs against extended precision") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
      const PowerSeries s = cubic(1e-3 + 0.05 * u(rng), 0.02 * (u(rng) - 0.5), 0.01 * (u(rng) - 0.5));
      const DeviceCaps c{500e-15 * u(rng) + 1e-15, 100e-15 * u(rng)};
      ImpedanceEnv e;
      e.r_s = 20 + 80 * u(rng);
      e.l1 = 5e-9 * u(rng);
      e.l2 = 20e-9 * u(rng);
      e.load = u(rng) < 0.5 ? LoadKind::cascode : LoadKind::inductive;
      e.gm_lt = 1e-3 + 0.05 * u(rng);
      const double om = kTwoPi * (0.5e9 + 3e9 * u(rng));
      const double d_om = kTwoPi * 1e7 * u(rng) + 1.0;
      const Complex got = eps_term(s, c, e, d_om, om);
      const auto ref = oracle::eps(s.a1, s.a2, s.a3, c.c_gs, c.c_gd, e.z1(2 * om), e.z2(2 * om), om, d_om);
      CHECK(std::abs(got - Complex(ref)) <= 1e-12 * std::abs(Complex(ref)) + 1e-18);
    }
  }
}

TEST_CASE("IIP3 estimate") {
  const ImpedanceEnv env = memoryless_env();
  SUBCASE("memoryless cubic") {
    const Iip3Estimate e = volterra_iip3(cubic(20e-3, 0.0, -0.4e-3), {}, env, 2.0975e9, 2.1025e9);
    CHECK_FALSE(e.infinite);
    CHECK(e.dbm == doctest::Approx(22.218487496163564).epsilon(1e-12));
    CHECK(e.dbm == doctest::Approx(oracle::memoryless_iip3_dbm(20e-3, -0.4e-3, 50.0)).epsilon(1e-12));
    CHECK(e.dbm_unnormalized == doctest::Approx(e.dbm - 10 * std::log10(20e-3)).epsilon(1e-12));
  }
  SUBCASE("ten times the cubic term costs 10 dB") {
    const double a = volterra_iip3(cubic(20e-3, 0.0, -0.4e-3), {}, env, 2.0975e9, 2.1025e9).dbm;
    const double b = volterra_iip3(cubic(20e-3, 0.0, -4e-3), {}, env, 2.0975e9, 2.1025e9).dbm;
    CHECK(a - b == doctest::Approx(10.0).epsilon(1e-12));
  }
  SUBCASE("exact cancellation is infinite") {
    const Iip3Estimate e = volterra_iip3(cubic(20e-3, 0.0, 0.0), {}, env, 2.0975e9, 2.1025e9);
    CHECK(e.infinite);
    CHECK(std::isinf(e.dbm));
  }
  SUBCASE("identical tones are rejected") {
    CHECK_THROWS_AS((void)volterra_iip3(cubic(20e-3, 0, -4e-4), {}, env, 2e9, 2e9), DomainError);
  }
}

TEST_CASE("cascode lowers Z2 and raises IIP3") {
  const double f = 2.1e9, w = kTwoPi * f;
  ImpedanceEnv cas;
  cas.load = LoadKind::cascode;
  cas.gm_lt = 20e-3;
  cas.l2 = 8.8e-9;
  ImpedanceEnv ind = cas;
  ind.load = LoadKind::inductive;
  CHECK(cas.z2(w) == Complex(50.0, 0.0));
  CHECK(std::abs(ind.z2(w)) == doctest::Approx(116.11326447667876).epsilon(1e-13));
  CHECK(cascode_z2(20e-3) == doctest::Approx(50.0));
  CHECK_THROWS_AS((void)cascode_z2(0.0), DomainError);

  const OperatingPoints ops = solve_self_bias(default_design());
  const DeviceCaps caps{100e-15, 20e-15};
  const double a = volterra_iip3(ops.mt.series, caps, cas, f - 2.5e6, f + 2.5e6).dbm;
  const double b = volterra_iip3(ops.mt.series, caps, ind, f - 2.5e6, f + 2.5e6).dbm;
  CHECK(a >= b);

  SUBCASE("nonincreasing along a real Z2 sweep") {
    for (double fc : {0.9e9, 2.1e9, 2.4e9}) {
      double prev = INFINITY;
      for (int k = 0; k < 20; ++k) {
        ImpedanceEnv e = cas;
        e.gm_lt = 1.0 / (5.0 * std::pow(10.0, 3.0 * k / 19.0));
        const double v = volterra_iip3(ops.mt.series, caps, e, fc - 2.5e6, fc + 2.5e6).dbm;
        CHECK(v <= prev);
        prev = v;
      }
    }
  }
}

TEST_CASE("voltage gain") {
  CHECK(voltage_gain(24.3e-3, {0.0, 115.9}) == doctest::Approx(8.9937941912381636).epsilon(1e-13));
  CHECK(std::pow(10.0, voltage_gain(1.0, {2.8183829312644538, 0}) / 20.0) ==
        doctest::Approx(2.8183829312644538).epsilon(1e-14));
  CHECK(voltage_gain(24.3e-3, {0.0, kTwoPi * 2.1e9 * 8.8e-9}) == doctest::Approx(9.0).epsilon(0.05 / 9.0));
  CHECK(std::isinf(voltage_gain(24.3e-3, {0.0, 0.0})));
  CHECK_THROWS_AS((void)voltage_gain(0.0, {0.0, 1.0}), DomainError);
}

TEST_CASE("noise figure") {
  const NoiseModel m;
  SUBCASE("reference values") {
    CHECK(noise_figure_approx(24.3e-3, m) == doctest::Approx(1.8996641360699324).epsilon(1e-13));
    CHECK(noise_figure_full(24.3e-3, 2.43e-3, 20e-3, m) == doctest::Approx(17.213777680464582).epsilon(1e-13));
  }
  SUBCASE("inversion for 1.9 dB") {
    const double f = std::pow(10.0, 1.9 / 10.0);
    const double gm = m.gamma_noise / (m.r_s * (f - 1.0));
    CHECK(gm == doctest::Approx(0.024294696760011148).epsilon(1e-14));
    CHECK(noise_figure_approx(gm, m) == doctest::Approx(1.9).epsilon(1e-14));
  }
  SUBCASE("full figure never undercuts the approximation") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
      const double mt = std::exp(std::log(1e-3) + u(rng) * std::log(100.0));
      const double st = mt * std::exp(std::log(1e-3) + u(rng) * std::log(1e3));
      const double lt = mt * 2 * u(rng);
      const double full = noise_figure_full(mt, st, lt, m);
      CHECK(full >= noise_figure_approx(mt, m));
      CHECK(noise_figure_full(mt, std::nullopt, lt, m) >= noise_figure_approx(mt, m));
      CHECK(full >= noise_figure_full(mt, std::nullopt, lt, m));
    }
  }
  SUBCASE("single device without cascode reduces to the approximation") {
    CHECK(noise_figure_full(24.3e-3, std::nullopt, 0.0, m) ==
          doctest::Approx(noise_figure_approx(24.3e-3, m)).epsilon(1e-14));
  }
  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS((void)noise_figure_full(0.0, std::nullopt, 0.0, m), DomainError);
    CHECK_THROWS_AS((void)noise_figure_full(1e-3, 0.0, 0.0, m), DomainError);
    CHECK_THROWS_AS((void)noise_figure_approx(-1.0, m), DomainError);
  }
}
