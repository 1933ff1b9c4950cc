#include <doctest.h>

#include <cmath>
#include <random>

#include "nvmpr/bessel.hpp"
#include "nvmpr/cavity_bloch.hpp"
#include "nvmpr/errors.hpp"
#include "nvmpr/units.hpp"

using namespace nvmpr;

namespace {

using S5 = ode::State<5>;

S5 rate_vec(const StateRate& r) { return {r.alpha.real(), r.alpha.imag(), r.P_z, r.P_plus.real(), r.P_plus.imag()}; }

auto flow(const BlochCavityParams& p) {
  return [p](double t, const S5& y, S5& dy) {
    BlochCavityState s{{y[0], y[1]}, y[2], {y[3], y[4]}, t};
    dy = rate_vec(derivatives(s, p));
  };
}

BlochCavityParams busy_params() {
  BlochCavityParams p;
  p.omega_c = 3.0;
  p.gamma_c = 0.4;
  p.gamma_1 = 0.2;
  p.gamma_2 = 0.7;
  p.omega_a = 2.1;
  p.omega_b = 1.3;
  p.omega_L = 0.9;
  p.omega_Delta = 0.5;
  p.omega_1 = 0.3;
  p.omega_T = 1.7;
  p.g = 0.25;
  p.P_zs = 0.4;
  return p;
}

}  // namespace

TEST_CASE("undriven fixed point") {
  BlochCavityParams p;
  p.omega_c = 5.0;
  p.gamma_1 = 1.0;
  p.P_zs = 0.3;
  BlochCavityState s;
  s.P_z = 0.3;
  const StateRate r = derivatives(s, p);
  CHECK(r.alpha == Complex(0.0, 0.0));
  CHECK(r.P_z == 0.0);
  CHECK(r.P_plus == Complex(0.0, 0.0));
}

TEST_CASE("cavity decouples without coupling and drives") {
  BlochCavityParams p;
  p.omega_c = 5.0;
  p.gamma_c = 0.5;
  p.gamma_1 = 1.0;
  p.omega_Delta = 0.3;
  BlochCavityState s;
  s.alpha = {0.2, -0.1};
  s.P_z = 0.1;
  s.P_plus = {0.05, 0.02};
  const StateRate r = derivatives(s, p);
  CHECK(std::abs(r.alpha - (-(Complex(0, 5.0) + 0.5) * s.alpha)) < 1e-15);
  BlochCavityState s2 = s;
  s2.alpha = {3.0, 4.0};
  CHECK(derivatives(s2, p).P_z == r.P_z);
  CHECK(derivatives(s2, p).P_plus == r.P_plus);
}

TEST_CASE("derivatives written out by hand") {
  const BlochCavityParams p = busy_params();
  BlochCavityState s{{0.1, 0.2}, -0.3, {0.15, -0.05}, 0.37};
  const Complex I(0, 1);
  const Complex Om = -I * (p.omega_1 * std::exp(-I * p.omega_T * s.t) + p.omega_Delta + 2.0 * p.g * s.alpha);
  const double w0 = p.omega_a - p.omega_b * std::sin(p.omega_L * s.t);
  const StateRate r = derivatives(s, p);
  CHECK(std::abs(r.alpha - (-(I * p.omega_c + p.gamma_c) * s.alpha - I * p.g * std::conj(s.P_plus))) < 1e-15);
  CHECK(r.P_z == doctest::Approx((Om * s.P_plus + std::conj(Om) * std::conj(s.P_plus)).real() - p.gamma_1 * (s.P_z - p.P_zs)));
  CHECK(std::abs(r.P_plus - (I * w0 * s.P_plus - std::conj(Om) / 2.0 * s.P_z - p.gamma_2 * s.P_plus)) < 1e-15);
}

TEST_CASE("single steps reproduce the flow by central differences") {
  const BlochCavityParams p = busy_params();
  const auto f = flow(p);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 10; ++trial) {
    const S5 y{u(rng), u(rng), u(rng), u(rng), u(rng)};
    const double t = 3.0 * (u(rng) + 0.5);
    S5 exact;
    f(t, y, exact);
    double errs[2];
    for (int k = 0; k < 2; ++k) {
      const double h = 1e-2 / (1 << k);
      const auto fwd = ode::dormand_prince_step<5>(f, t, y, h);
      const auto bwd = ode::dormand_prince_step<5>(f, t, y, -h);
      double e = 0.0;
      for (int i = 0; i < 5; ++i) e = std::max(e, std::abs((fwd.y[i] - bwd.y[i]) / (2 * h) - exact[i]));
      errs[k] = e;
    }
    CHECK(errs[0] < 1e-3);
    // O(h^2) difference quotient
    CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("no drive relaxes to P_zs") {
  BlochCavityParams p;
  p.gamma_1 = 2.0;
  p.gamma_2 = 3.0;
  p.P_zs = 0.6;
  BlochCavityState s0;
  const auto r = integrate_to_steady_state(p, s0, 1e-10, 100000);
  CHECK(r.converged);
  CHECK(r.mean_P_z == doctest::Approx(0.6).epsilon(1e-8));
  CHECK(r.periods * r.period > 5.0 / p.gamma_1);
}

TEST_CASE("CW saturation closed form") {
  for (double wd : {0.5, 1.0, 3.0})
    for (double wa : {0.0, 2.0, -5.0}) {
      BlochCavityParams p;
      p.gamma_1 = 1.0;
      p.gamma_2 = 4.0;
      p.omega_a = wa;
      p.omega_Delta = wd;
      p.P_zs = 0.5;
      BlochCavityState s0;
      s0.P_z = p.P_zs;
      const auto r = integrate_to_steady_state(p, s0, 1e-11, 100000);
      REQUIRE(r.converged);
      const double x = wd * wd / (p.gamma_1 * p.gamma_2);
      const double expected = 1.0 - x / (1.0 + x + wa * wa / (p.gamma_2 * p.gamma_2));
      CHECK(r.mean_P_z / p.P_zs == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("stiff superharmonic point matches the closed form") {
  BlochCavityParams p;
  p.gamma_1 = 1e4;
  p.gamma_2 = 1e7;
  p.gamma_c = 1e7;
  p.omega_L = 3e8;
  const int l = 2;
  p.omega_c = l * p.omega_L;
  p.omega_a = l * p.omega_L + 0.5 * p.gamma_2;
  p.omega_b = 3.0 * p.omega_L;
  p.omega_Delta = 2.0 * std::sqrt(p.gamma_1 * p.gamma_2);
  p.P_zs = 0.5;
  BlochCavityState s0;
  s0.P_z = p.P_zs;
  const auto r = integrate_to_steady_state(p, s0, 1e-9, 2000000);
  REQUIRE(r.converged);
  CHECK_FALSE(r.bounds_violated);
  const auto pt = superharmonic_point(p, l);
  CHECK(pt.beta_al == doctest::Approx(0.5));
  CHECK(pt.beta_Delta == doctest::Approx(2.0));
  CHECK(pt.z == doctest::Approx(3.0));
  const double cf = closed_form_pz(pt, p.P_zs);
  CHECK(std::abs(r.mean_P_z / p.P_zs - cf) / cf < 0.02);
}

TEST_CASE("non-convergence is reported") {
  BlochCavityParams p;
  p.gamma_1 = 1e-3;
  p.gamma_2 = 1.0;
  p.omega_L = 1.0;
  p.omega_b = 1.0;
  p.omega_a = 1.0;
  p.omega_Delta = 0.1;
  BlochCavityState s0;
  const auto r = integrate_to_steady_state(p, s0, 1e-12, 3);
  CHECK_FALSE(r.converged);
  CHECK(r.periods == 3);
}

TEST_CASE("integration preconditions") {
  BlochCavityParams p;
  p.omega_b = 1.0;  // needs omega_L
  CHECK_THROWS_AS(integrate_to_steady_state(p, {}, 1e-6, 10), InvalidParameter);
  BlochCavityParams q;
  CHECK_THROWS_AS(integrate_to_steady_state(q, {}, 0.0, 10), InvalidParameter);
  BlochCavityParams bad;
  bad.gamma_2 = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
  bad.gamma_2 = 1.0;
  bad.P_zs = 1.5;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
}

TEST_CASE("cavity field decays at gamma_c") {
  BlochCavityParams p;
  p.omega_c = 40.0;
  p.gamma_c = 0.8;
  p.gamma_2 = 1.0;
  const auto f = flow(p);
  S5 y{1.0, 0.0, 0.0, 0.0, 0.0};
  double h = 0.0;
  ode::StepControl ctl;
  double last = 1.0;
  for (int k = 1; k <= 10; ++k) {
    ode::integrate<5>(f, (k - 1) * 0.5, k * 0.5, y, h, ctl);
    const double mag = std::hypot(y[0], y[1]);
    CHECK(mag < last);
    CHECK(mag == doctest::Approx(std::exp(-p.gamma_c * k * 0.5)).epsilon(0.01));
    last = mag;
  }
}

TEST_CASE("zeta_a special cases") {
  SuperharmonicPoint pt;
  pt.l = 3;
  pt.z = 2.2;
  pt.beta_cl = 0.4;
  pt.beta_al = -1.0;
  pt.kappa = 0.0;
  CHECK(std::abs(zeta_a(pt, 0.5)) == doctest::Approx(std::abs(bessel_j(3, 2.2))).epsilon(1e-14));
  pt.z = 0.0;
  pt.kappa = 2.0;
  CHECK(std::abs(zeta_a(pt, 0.5)) == 0.0);
  pt.z = 1.7;
  pt.beta_cl = pt.beta_al = 0.0;
  const double j0 = bessel_j(0, 1.7);
  pt.kappa = 1.0 / (j0 * j0 * 0.5);
  CHECK(std::abs(zeta_a(pt, 0.5)) == doctest::Approx(2.0 * std::abs(bessel_j(3, 1.7))).epsilon(1e-13));
}

TEST_CASE("zeta_a phase prefactor") {
  SuperharmonicPoint pt;
  pt.l = 1;
  pt.z = 0.9;
  const Complex I(0, 1);
  const Complex expected = bessel_j(-1, 0.9) / (std::pow(I, 2) * std::exp(I * 0.9));
  CHECK(std::abs(zeta_a(pt, 0.5) - expected) < 1e-15);
}

TEST_CASE("closed form special cases") {
  SuperharmonicPoint pt;
  pt.l = 2;
  pt.z = 1.3;
  pt.beta_Delta = 0.0;
  CHECK(closed_form_pz(pt, 0.5) == 1.0);
  pt.beta_al = 0.0;
  pt.beta_Delta = 1.0 / std::abs(bessel_j(2, 1.3));
  CHECK(closed_form_pz(pt, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("effective OISP") {
  CHECK(effective_oisp({2.0, 0.0, 0.1, 0.9}).P_zs == 0.1);
  CHECK(effective_oisp({0.0, 3.0, 0.1, 0.9}).P_zs == 0.9);
  const auto eq = effective_oisp({1.5, 1.5, 0.2, 0.6});
  CHECK(eq.P_zs == doctest::Approx(0.4));
  CHECK(eq.gamma_1 == 3.0);
  CHECK_THROWS_AS(effective_oisp({0.0, 0.0, 0.1, 0.2}), InvalidParameter);
}

TEST_CASE("cooperativity") {
  CHECK(cooperativity(std::sqrt(6.0), 2.0, 3.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cooperativity(0.0, 2.0, 3.0) == 0.0);
  const double k = cooperativity(kTwoPi * 8e6, kTwoPi * 30e6, kTwoPi * 2.87e6);
  CHECK(k == doctest::Approx(64.0 / (30.0 * 2.87)).epsilon(1e-14));
  CHECK(k == doctest::Approx(0.743).epsilon(0.001));
  CHECK_THROWS_AS(cooperativity(1.0, 0.0, 1.0), InvalidParameter);
}

TEST_CASE("Jacobi-Anger residuals") {
  CHECK(jacobi_anger_check(0.0, 1.1, 1) == 0.0);
  CHECK(jacobi_anger_check(0.0, 0.3, 30) == 0.0);
  CHECK(jacobi_anger_check(1.0, 0.7, 25) < 1e-10);
  CHECK(jacobi_anger_check(5.0, 0.7, 2) > 1e-3);
  CHECK_THROWS_AS(jacobi_anger_check(1.0, 0.0, 0), InvalidParameter);
}

TEST_CASE("superharmonic point from parameters") {
  BlochCavityParams p;
  p.gamma_1 = 4.0;
  p.gamma_2 = 9.0;
  p.gamma_c = 2.0;
  p.omega_L = 100.0;
  p.omega_c = 310.0;
  p.omega_a = 290.0;
  p.omega_b = 250.0;
  p.omega_Delta = 3.0;
  p.g = 6.0;
  const auto pt = superharmonic_point(p, 3);
  CHECK(pt.beta_cl == doctest::Approx(5.0));
  CHECK(pt.beta_al == doctest::Approx(-10.0 / 9.0));
  CHECK(pt.beta_Delta == doctest::Approx(0.5));
  CHECK(pt.kappa == doctest::Approx(2.0));
  CHECK(pt.z == doctest::Approx(2.5));
  CHECK(nearest_order(p) == 3);
}
