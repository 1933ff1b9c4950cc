#include "nvmpr/resonance_atlas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "nvmpr/errors.hpp"

namespace nvmpr {

void LacParams::validate() const {
  if (!(theta_S > 0.0) || !std::isfinite(theta_S)) throw InvalidParameter("LAC: theta_S must be positive");
  if (!(D > 0.0)) throw InvalidParameter("LAC: D must be positive");
  if (!(gamma_e > 0.0)) throw InvalidParameter("LAC: gamma_e must be positive");
}

double LacParams::omega_a0() const { return std::numbers::sqrt2 * D * theta_S; }
double LacParams::lac_field() const { return D / gamma_e; }
double LacParams::eta(double delta_B) const { return gamma_e * delta_B / omega_a0(); }

LacParams LacParams::from_gap(double omega_a0, double D, double gamma_e) {
  LacParams p;
  p.D = D;
  p.gamma_e = gamma_e;
  p.theta_S = omega_a0 / (std::numbers::sqrt2 * D);
  p.validate();
  return p;
}

void PeakGridParams::validate() const {
  if (!(f_m > 0.0)) throw InvalidParameter("peak grid: f_m must be positive");
  if (l_max < 1 || k_max < 1) throw InvalidParameter("peak grid: l_max and k_max must be >= 1");
}

void TripolarParams::validate() const {
  if (!(p_N >= 0.0) || !(p_N < 1.0)) throw InvalidParameter("tripolar: p_N must lie in [0, 1)");
  if (!(nv_fraction > 0.0)) throw InvalidParameter("tripolar: nv_fraction must be positive");
  if (!(D > 0.0)) throw InvalidParameter("tripolar: D must be positive");
}

double lac_frequency(const LacParams& params, double delta_B) {
  params.validate();
  const double eta = params.eta(delta_B);
  return params.omega_a0() * std::sqrt(1.0 + eta * eta);
}

double hyperbola_frequency(const LacParams& params, double delta_B, int l) {
  if (l < 1) throw InvalidParameter("hyperbola index l must be >= 1");
  return lac_frequency(params, delta_B) / (kTwoPi * l);
}

double hyperfine_splitting(const P1Params& params, double theta_B) {
  const double c = std::cos(theta_B);
  const double s = std::sin(theta_B);
  return std::sqrt(params.A_par * params.A_par * c * c + params.A_perp * params.A_perp * s * s);
}

std::vector<GridPeak> peak_grid(const PeakGridParams& params) {
  params.validate();
  std::vector<GridPeak> out;
  for (int l = 1; l <= params.l_max; ++l) {
    for (int k = 1; k <= params.k_max; ++k) {
      // k/l already produced by a smaller l exactly when it is not in lowest terms
      if (std::gcd(k, l) != 1) continue;
      out.push_back({k, l, k, l, params.f_m * k / l, false});
    }
    if (params.half_integer) {
      for (int k = 1; k <= params.k_max; k += 2) {
        out.push_back({k, l, k, 2 * l, params.f_m * k / (2.0 * l), true});
      }
    }
  }
  return out;
}

std::string to_string(OmitReason reason) {
  switch (reason) {
    case OmitReason::BelowHyperbolaMinimum:
      return "below_hyperbola_minimum";
  }
  return "unknown";
}

PeakPositions peak_field_positions(const LacParams& lac, const std::vector<GridPeak>& peaks) {
  lac.validate();
  const double wa0 = lac.omega_a0();
  PeakPositions out;
  for (const GridPeak& p : peaks) {
    const double ratio = kTwoPi * p.l * p.frequency / wa0;
    if (ratio < 1.0) {
      out.omitted.push_back({p, OmitReason::BelowHyperbolaMinimum});
      continue;
    }
    const double db = wa0 / lac.gamma_e * std::sqrt(ratio * ratio - 1.0);
    out.found.push_back({p, -db, db});
  }
  return out;
}

PeakPositions peak_field_positions(const LacParams& lac, const PeakGridParams& grid) {
  return peak_field_positions(lac, peak_grid(grid));
}

double p1_density(const TripolarParams& params) { return lattice::kAtomDensity * params.p_N; }

double dipolar_density(const TripolarParams& params) {
  const PhysicalConstants& c = params.constants;
  const double n_d = 4.0 * std::numbers::pi * params.D / (c.mu0() * c.gamma_e() * c.gamma_e() * c.hbar());
  return units::per_m3_to_per_cm3(n_d);
}

double tripolar_rate(const TripolarParams& params) {
  params.validate();
  const double ratio = p1_density(params) / dipolar_density(params);
  return ratio * ratio * params.D;
}

double lattice_angle(const Vec3& a, const Vec3& b) {
  const double c = a.dot(b) / (a.norm() * b.norm());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace nvmpr
