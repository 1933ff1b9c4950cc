#pragma once

#include <complex>

#include "nvmpr/ode.hpp"

namespace nvmpr {

using Complex = std::complex<double>;

// Spin ensemble (collective Bloch vector) driven by
//   omega_0(t) = omega_a - omega_b sin(omega_L t)          (longitudinal)
//   omega_Delta + omega_1 e^{-i omega_T t}                  (transverse)
// and coupled with strength g to a damped cavity mode. All rates in rad/s.
struct BlochCavityParams {
  double omega_c = 0.0;
  double gamma_c = 1.0;
  double gamma_1 = 0.0;
  double gamma_2 = 1.0;
  double omega_a = 0.0;
  double omega_b = 0.0;
  double omega_L = 0.0;
  double omega_Delta = 0.0;
  double omega_1 = 0.0;
  double omega_T = 0.0;
  double g = 0.0;
  double P_zs = 1.0;

  void validate() const;
};

// Optically induced spin polarization folded into gamma_1 and P_zs.
struct OispParams {
  double gamma_1T = 0.0;
  double gamma_1O = 0.0;
  double P_zST = 0.0;
  double P_zSO = 0.0;

  void validate() const;
};

struct OispEffective {
  double gamma_1 = 0.0;
  double P_zs = 0.0;
};

struct BlochCavityState {
  Complex alpha{};
  double P_z = 0.0;
  Complex P_plus{};
  double t = 0.0;  // s
};

struct StateRate {
  Complex alpha{};
  double P_z = 0.0;
  Complex P_plus{};
};

// Dimensionless description of the l-th superharmonic resonance
// omega_a ~ l omega_L.
struct SuperharmonicPoint {
  int l = 1;
  double beta_cl = 0.0;     // (omega_c - l omega_L) / gamma_c
  double beta_al = 0.0;     // (omega_a - l omega_L) / gamma_2
  double beta_Delta = 0.0;  // omega_Delta / sqrt(gamma_1 gamma_2)
  double kappa = 0.0;       // g^2 / (gamma_2 gamma_c)
  double z = 0.0;           // omega_b / omega_L

  void validate() const;
};

StateRate derivatives(const BlochCavityState& state, const BlochCavityParams& params);

struct SteadyStateReport {
  bool converged = false;
  bool bounds_violated = false;  // |P_z| or |P_+| exceeded 1 + 1e-6: integrator failure
  double mean_P_z = 0.0;         // trapezoid average over the last drive period
  double last_change = 0.0;      // relative change of the period average
  long periods = 0;
  double period = 0.0;           // averaging window, s
  BlochCavityState final_state;
  ode::Stats stats;
};

inline constexpr int kSamplesPerPeriod = 64;

// Integrates the equations of motion period by period until the
// period-averaged P_z changes by less than `tolerance` (relative to
// max(|<P_z>|, |P_zs|)) between consecutive periods. The window is 2 pi /
// omega_L; without longitudinal drive it is 0.1 / gamma_1 (0.1 / gamma_2 if
// gamma_1 = 0).
SteadyStateReport integrate_to_steady_state(const BlochCavityParams& params, const BlochCavityState& initial,
                                            double tolerance, long max_periods,
                                            const ode::StepControl& control = {});

SuperharmonicPoint superharmonic_point(const BlochCavityParams& params, int l);

// Order l >= 1 of the superharmonic closest to omega_a.
int nearest_order(const BlochCavityParams& params);

Complex zeta_a(const SuperharmonicPoint& point, double P_zs);

// Steady-state P_z / P_zs in the rotating-frame approximation.
double closed_form_pz(const SuperharmonicPoint& point, double P_zs);

OispEffective effective_oisp(const OispParams& params);

double cooperativity(double g, double gamma_2, double gamma_c);

// |exp(i z cos theta) - sum_{n=-N}^{N} i^n J_n(z) e^{i n theta}|
double jacobi_anger_check(double z, double theta, int n_terms);

}  // namespace nvmpr
