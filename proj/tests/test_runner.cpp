#include <doctest.h>

#include <cmath>
#include <complex>

#include "nvmpr/bessel.hpp"
#include "nvmpr/cavity_bloch.hpp"
#include "nvmpr/errors.hpp"
#include "nvmpr/runner.hpp"

using namespace nvmpr;

namespace {

const Cell& summary(const Report& r, const std::string& key) {
  for (const auto& [k, v] : r.summary)
    if (k == key) return v;
  FAIL("missing summary key " << key);
  static Cell none;
  return none;
}

// d(P_z/P_zs)/d(f_LA [MHz]) of the closed form at fixed order l.
double analytic_slope(const SweepConfig& s, double B_mT, double f_MHz, int l) {
  using C = std::complex<double>;
  const C I(0, 1);
  const double dB = units::mt_to_tesla(B_mT) - s.lac.lac_field();
  const double eta = s.lac.eta(dB);
  const double wa = lac_frequency(s.lac, dB);
  const double W = units::mhz_to_rad(f_MHz);
  const double dW = units::kRadPerMhz;
  const double u = (s.omega_c - l * W) / s.gamma_c, du = -l * dW / s.gamma_c;
  const double v = (wa - l * W) / s.gamma_2, dv = -l * dW / s.gamma_2;
  const double bd = s.beta_Delta0 * eta / std::sqrt(1 + eta * eta);
  const double j0 = bessel_j(0, s.bessel_z), jl = bessel_j(l, s.bessel_z);
  const double c = cooperativity(s.g, s.gamma_2, s.gamma_c) * (s.P_zs > 0 ? 1.0 : -1.0) * j0 * j0;
  const C w = (1.0 + I * u) * (1.0 + I * v);
  const C dw = I * du * (1.0 + I * v) + I * dv * (1.0 + I * u);
  const C q = 1.0 + c / w;
  const C dq = -c / (w * w) * dw;
  const double x = bd * bd * jl * jl * std::norm(q);
  const double dx = bd * bd * jl * jl * 2.0 * std::real(std::conj(q) * dq);
  const double den = 1 + x + v * v;
  return -(dx * den - x * (dx + 2 * v * dv)) / (den * den);
}

}  // namespace

TEST_CASE("sweep grid dimensions follow the config") {
  const RunConfig c = parse_config("mode = sweep\nB_points = 7\nf_points = 11\n");
  const SweepGrid g = run_sweep(c);
  CHECK(g.rows.values.size() == 7);
  CHECK(g.cols.values.size() == 11);
  CHECK(g.values.size() == 77);
  CHECK(g.rows.name == "B_S");
  CHECK(g.cols.unit == "MHz");
  CHECK(g.metadata.at("config.g_MHz") == "8");
  CHECK(g.metadata.count("artifact_version"));
  CHECK(g.flags.empty());
}

TEST_CASE("row at the LAC field is flat") {
  RunConfig c = parse_config("mode = sweep\nB_points = 3\nf_points = 50\n");
  const double lac = units::tesla_to_mt(c.sweep.lac.lac_field());
  c.sweep.B_S = {lac - 1.0, lac + 1.0, 3};
  const SweepGrid g = run_sweep(c);
  for (std::size_t j = 0; j < 50; ++j) CHECK(g.at(1, j) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("values are ratios in [0, 1]") {
  const RunConfig c = parse_config("mode = sweep\nB_points = 20\nf_points = 30\n");
  for (double v : run_sweep(c).values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("thread count does not change the result") {
  const RunConfig c = parse_config("mode = sweep\nB_points = 23\nf_points = 17\n");
  const SweepGrid a = run_sweep(c, 1);
  const SweepGrid b = run_sweep(c, 4);
  CHECK(grid_to_json(a) == grid_to_json(b));
  CHECK_THROWS_AS(run_sweep(c, 0), InvalidParameter);
}

TEST_CASE("sweep_cell uses the dominant order") {
  const RunConfig c = parse_config("mode = sweep\n");
  const SweepConfig& s = c.sweep;
  const double B = 95.0;
  const double fa = lac_frequency(s.lac, units::mt_to_tesla(B) - s.lac.lac_field()) / units::kRadPerMhz;
  for (int l = 1; l <= 10; ++l) CHECK(dominant_order(s, B, fa / l) == l);
}

TEST_CASE("all-l mode multiplies the per-order ratios") {
  RunConfig c = parse_config("mode = sweep\nl_selection = all\nl_max = 3\n");
  const SweepConfig& s = c.sweep;
  RunConfig d = parse_config("mode = sweep\nl_max = 3\n");
  const double B = 96.0, f = 120.0;
  const double all = sweep_cell(s, B, f);
  CHECK(all <= sweep_cell(d.sweep, B, f) + 1e-15);
  CHECK(all >= 0.0);
}

TEST_CASE("derivative map matches the analytic slope") {
  const double B = 95.3;
  auto run = [&](double h) {
    RunConfig c = parse_config("mode = sweep\nquantity = derivative\nB_points = 2\n");
    c.sweep.B_S = {B, B + 1.0, 2};
    c.sweep.f_LA = {136.0 - 10 * h, 136.0 + 10 * h, 21};
    return run_sweep(c);
  };
  const RunConfig base = parse_config("mode = sweep\n");
  const int l = dominant_order(base.sweep, B, 136.0);
  const double exact = analytic_slope(base.sweep, B, 136.0, l);
  const SweepGrid g1 = run(0.02);
  const SweepGrid g2 = run(0.01);
  CHECK(g1.quantity.find("d(") == 0);
  const double e1 = std::abs(g1.at(0, 10) - exact);
  const double e2 = std::abs(g2.at(0, 10) - exact);
  CHECK(std::abs(exact) > 1e-4);
  CHECK(e1 < 1e-3 * std::abs(exact));
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("run_sweep requires sweep mode") {
  CHECK_THROWS_AS(run_sweep(parse_config("mode = atlas\n")), InvalidParameter);
}

TEST_CASE("transitions report") {
  const Report r = run_transitions(parse_config("mode = transitions\nB_mT = 100\ntilt_deg = 2\n"));
  CHECK(r.rows.size() == 8 + 12);
  CHECK(r.columns.size() == 6);
  CHECK(std::get<double>(summary(r, "lac_field_mT")) == doctest::Approx(102.39).epsilon(1e-4));
}

TEST_CASE("atlas report") {
  const Report r = run_atlas(parse_config("mode = atlas\n"));
  CHECK(std::get<double>(summary(r, "omega_a0_over_2pi_MHz")) == doctest::Approx(106.3).epsilon(0.005));
  CHECK(std::get<double>(summary(r, "hyperfine_splitting_MHz")) == doctest::Approx(85.58).epsilon(0.001));
  CHECK(std::get<double>(summary(r, "tripolar_rate_over_2pi_Hz")) == doctest::Approx(307).epsilon(0.1));
  CHECK_FALSE(r.rows.empty());
  const std::string csv = report_to_csv(r);
  CHECK(csv.find("# lac_field_mT = ") == 0);
  CHECK(csv.find("below_hyperbola_minimum") != std::string::npos);
}

TEST_CASE("ode-check report") {
  const Report r = run_ode_check(parse_config("mode = ode-check\nl_values = 1\neta_points = 2\n"));
  CHECK(r.rows.size() == 2);
  CHECK(std::get<bool>(summary(r, "pass")));
  CHECK(r.numerically_ok);
  const Report bad = run_ode_check(parse_config("mode = ode-check\nl_values = 1\neta_points = 2\nmax_periods = 2\n"));
  CHECK_FALSE(bad.numerically_ok);
}

TEST_CASE("coupling report") {
  const Report r = run_coupling(parse_config("mode = coupling\nsynthetic_points = 21\n"));
  const double g = std::get<double>(summary(r, "g_rad_per_s"));
  CHECK(g > 8e6 / 3);
  CHECK(g < 8e6 * 3);
  CHECK(std::get<double>(summary(r, "g_over_2pi_MHz")) == doctest::Approx(g / kTwoPi / 1e6));
  const std::string json = report_to_json(r);
  CHECK(json.find("\"g_rad_per_s\"") != std::string::npos);
  CHECK(report_to_csv(r).rfind("key,value\n", 0) == 0);
}
