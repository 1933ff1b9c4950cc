#include "nvmpr/cavity_bloch.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "nvmpr/bessel.hpp"
#include "nvmpr/errors.hpp"
#include "nvmpr/units.hpp"

namespace nvmpr {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kBoundTolerance = 1e-6;

// i^n for any integer n
Complex i_power(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw InvalidParameter(what);
}

using Vec5 = ode::State<5>;

Vec5 pack(const BlochCavityState& s) {
  return {s.alpha.real(), s.alpha.imag(), s.P_z, s.P_plus.real(), s.P_plus.imag()};
}

BlochCavityState unpack(const Vec5& y, double t) { return {{y[0], y[1]}, y[2], {y[3], y[4]}, t}; }

}  // namespace

void BlochCavityParams::validate() const {
  const double all[] = {omega_c, gamma_c, gamma_1, gamma_2, omega_a, omega_b, omega_L,
                        omega_Delta, omega_1, omega_T, g, P_zs};
  for (double v : all) require(std::isfinite(v), "Bloch-cavity parameters must be finite");
  require(gamma_c > 0.0, "gamma_c must be positive");
  require(gamma_2 > 0.0, "gamma_2 must be positive");
  require(gamma_1 >= 0.0, "gamma_1 must be non-negative");
  require(omega_L >= 0.0, "omega_L must be non-negative");
  require(g >= 0.0, "g must be non-negative");
  require(std::abs(P_zs) <= 1.0, "|P_zs| must not exceed 1");
  require(omega_b == 0.0 || omega_L > 0.0, "omega_L must be positive when omega_b is non-zero");
}

void OispParams::validate() const {
  require(gamma_1T >= 0.0 && gamma_1O >= 0.0, "OISP rates must be non-negative");
  require(gamma_1T + gamma_1O > 0.0, "OISP: at least one rate must be positive");
  require(std::abs(P_zST) <= 1.0 && std::abs(P_zSO) <= 1.0, "OISP polarizations must lie in [-1, 1]");
}

void SuperharmonicPoint::validate() const {
  require(l >= 1, "superharmonic order l must be >= 1");
  require(kappa >= 0.0, "kappa must be non-negative");
  require(std::isfinite(beta_cl) && std::isfinite(beta_al) && std::isfinite(beta_Delta) && std::isfinite(z),
          "superharmonic point must be finite");
}

StateRate derivatives(const BlochCavityState& s, const BlochCavityParams& p) {
  const Complex transverse = p.omega_1 * std::exp(-kI * (p.omega_T * s.t)) + p.omega_Delta + 2.0 * p.g * s.alpha;
  const Complex omega1 = -kI * transverse;
  const double omega0 = p.omega_a - p.omega_b * std::sin(p.omega_L * s.t);
  const Complex p_minus = std::conj(s.P_plus);

  StateRate r;
  r.alpha = -(kI * p.omega_c + p.gamma_c) * s.alpha - kI * p.g * p_minus;
  r.P_z = 2.0 * (omega1 * s.P_plus).real() - p.gamma_1 * (s.P_z - p.P_zs);
  r.P_plus = kI * omega0 * s.P_plus - 0.5 * std::conj(omega1) * s.P_z - p.gamma_2 * s.P_plus;
  return r;
}

SteadyStateReport integrate_to_steady_state(const BlochCavityParams& params, const BlochCavityState& initial,
                                            double tolerance, long max_periods, const ode::StepControl& control) {
  params.validate();
  require(tolerance > 0.0, "tolerance must be positive");
  require(max_periods >= 2, "max_periods must be at least 2");

  double period;
  if (params.omega_L > 0.0) period = kTwoPi / params.omega_L;
  else if (params.gamma_1 > 0.0) period = 0.1 / params.gamma_1;
  else period = 0.1 / params.gamma_2;

  const double dt = period / kSamplesPerPeriod;
  ode::StepControl ctl = control;
  ctl.h_max = ctl.h_max > 0.0 ? std::min(ctl.h_max, dt) : dt;

  auto rhs = [&params](double t, const Vec5& y, Vec5& dy) {
    const StateRate r = derivatives(unpack(y, t), params);
    dy = {r.alpha.real(), r.alpha.imag(), r.P_z, r.P_plus.real(), r.P_plus.imag()};
  };

  SteadyStateReport rep;
  rep.period = period;
  Vec5 y = pack(initial);
  double t = initial.t;
  double h = dt;
  double previous = 0.0;

  for (long k = 1; k <= max_periods; ++k) {
    const double t_start = t;
    double sum = 0.5 * y[2];
    for (int s = 1; s <= kSamplesPerPeriod; ++s) {
      const double t_next = t_start + s * dt;
      if (!ode::integrate<5>(rhs, t, t_next, y, h, ctl, &rep.stats)) {
        rep.final_state = unpack(y, t);
        rep.periods = k;
        return rep;
      }
      t = t_next;
      const double pplus = std::hypot(y[3], y[4]);
      if (std::abs(y[2]) > 1.0 + kBoundTolerance || pplus > 1.0 + kBoundTolerance || !std::isfinite(y[2])) {
        rep.bounds_violated = true;
        rep.final_state = unpack(y, t);
        rep.periods = k;
        return rep;
      }
      sum += (s == kSamplesPerPeriod ? 0.5 : 1.0) * y[2];
    }
    const double mean = sum / kSamplesPerPeriod;
    rep.mean_P_z = mean;
    rep.periods = k;
    if (k >= 2) {
      const double scale = std::max({std::abs(mean), std::abs(params.P_zs), 1e-300});
      rep.last_change = std::abs(mean - previous) / scale;
      if (rep.last_change < tolerance) {
        rep.converged = true;
        break;
      }
    }
    previous = mean;
  }
  rep.final_state = unpack(y, t);
  return rep;
}

SuperharmonicPoint superharmonic_point(const BlochCavityParams& params, int l) {
  params.validate();
  require(l >= 1, "superharmonic order l must be >= 1");
  require(params.gamma_1 > 0.0, "beta_Delta needs gamma_1 > 0");
  SuperharmonicPoint p;
  p.l = l;
  p.beta_cl = (params.omega_c - l * params.omega_L) / params.gamma_c;
  p.beta_al = (params.omega_a - l * params.omega_L) / params.gamma_2;
  p.beta_Delta = params.omega_Delta / std::sqrt(params.gamma_1 * params.gamma_2);
  p.kappa = cooperativity(params.g, params.gamma_2, params.gamma_c);
  p.z = params.omega_L > 0.0 ? params.omega_b / params.omega_L : 0.0;
  return p;
}

int nearest_order(const BlochCavityParams& params) {
  require(params.omega_L > 0.0, "nearest_order needs omega_L > 0");
  const long l = std::lround(std::abs(params.omega_a) / params.omega_L);
  return static_cast<int>(std::max(1L, l));
}

Complex zeta_a(const SuperharmonicPoint& point, double P_zs) {
  point.validate();
  const int l = point.l;
  const double j0 = bessel_j(0, point.z);
  const double jml = bessel_j(-l, point.z);
  const Complex bracket =
      1.0 + point.kappa * j0 * j0 * P_zs / ((1.0 + kI * point.beta_cl) * (1.0 + kI * point.beta_al));
  // i^{1+l} e^{i z} zeta_a = J_{-l}(z) * bracket
  return jml * bracket / (i_power(1 + l) * std::exp(kI * point.z));
}

double closed_form_pz(const SuperharmonicPoint& point, double P_zs) {
  const double zeta2 = std::norm(zeta_a(point, P_zs));
  const double drive = point.beta_Delta * point.beta_Delta * zeta2;
  return 1.0 - drive / (1.0 + drive + point.beta_al * point.beta_al);
}

OispEffective effective_oisp(const OispParams& params) {
  params.validate();
  const double g1 = params.gamma_1T + params.gamma_1O;
  return {g1, (params.gamma_1T * params.P_zST + params.gamma_1O * params.P_zSO) / g1};
}

double cooperativity(double g, double gamma_2, double gamma_c) {
  const double denom = gamma_2 * gamma_c;
  if (!(denom > 0.0) || !std::isfinite(denom)) throw InvalidParameter("cooperativity: gamma_2 gamma_c must be positive");
  return g * g / denom;
}

double jacobi_anger_check(double z, double theta, int n_terms) {
  require(n_terms >= 1, "jacobi_anger_check: n_terms must be >= 1");
  const std::vector<double> j = bessel_j_table(n_terms, z);
  Complex sum = j[0];
  for (int n = 1; n <= n_terms; ++n) {
    const double jn = j[static_cast<std::size_t>(n)];
    const double jmn = (n % 2) ? -jn : jn;
    sum += i_power(n) * jn * std::exp(kI * (n * theta));
    sum += i_power(-n) * jmn * std::exp(-kI * (n * theta));
  }
  return std::abs(std::exp(kI * (z * std::cos(theta))) - sum);
}

}  // namespace nvmpr
