#pragma once

#include <string>
#include <vector>

#include "nvmpr/spin_models.hpp"
#include "nvmpr/units.hpp"

namespace nvmpr {

// Near the level anti-crossing B ~ D/gamma_e, with the field tilted by
// theta_S from the NV axis, the lowest transition follows
//   omega_a = omega_a0 sqrt(1 + eta^2),  omega_a0 = sqrt(2) D theta_S,
//   eta = gamma_e dB / omega_a0.
struct LacParams {
  double theta_S = units::deg_to_rad(1.5);  // rad
  double D = kTwoPi * 2.87e9;               // rad/s
  double gamma_e = kTwoPi * 28.03e9;        // rad/s/T

  void validate() const;
  // The small-angle expansion is meant for theta_S << 1.
  bool large_angle() const noexcept { return theta_S > 0.2; }

  double omega_a0() const;
  double lac_field() const;  // D / gamma_e, tesla
  double eta(double delta_B) const;

  // theta_S giving a requested minimum gap omega_a0.
  static LacParams from_gap(double omega_a0, double D = kTwoPi * 2.87e9, double gamma_e = kTwoPi * 28.03e9);
};

struct PeakGridParams {
  double f_m = 86e6;  // Hz
  int l_max = 10;
  int k_max = 10;
  // Adds the k f_m / (2 l) nuclear-rotation frequencies (odd k) on each hyperbola.
  bool half_integer = false;

  void validate() const;
};

struct TripolarParams {
  double p_N = 1e-4;
  double nv_fraction = 0.01;  // n_S / n_S,P1
  double D = kTwoPi * 2.87e9;
  PhysicalConstants constants{};

  void validate() const;
};

double lac_frequency(const LacParams& params, double delta_B);

// f_l = omega_a / (2 pi l), Hz.
double hyperbola_frequency(const LacParams& params, double delta_B, int l);

// omega_en = sqrt(A_par^2 cos^2 + A_perp^2 sin^2), rad/s.
double hyperfine_splitting(const P1Params& params, double theta_B);

struct GridPeak {
  int k = 0;
  int l = 0;       // hyperbola index
  int numerator = 0;
  int denominator = 0;  // f = numerator / denominator * f_m
  double frequency = 0.0;  // Hz
  bool half_integer = false;
};

// f_{k,l} = (k/l) f_m over 1 <= k <= k_max, 1 <= l <= l_max. Equal ratios are
// collapsed onto the smallest l. Ordered by (l, k).
std::vector<GridPeak> peak_grid(const PeakGridParams& params);

enum class OmitReason { BelowHyperbolaMinimum };

struct PeakPosition {
  GridPeak peak;
  double delta_B_minus = 0.0;  // tesla, <= 0
  double delta_B_plus = 0.0;   // tesla, >= 0
};

struct OmittedPeak {
  GridPeak peak;
  OmitReason reason = OmitReason::BelowHyperbolaMinimum;
};

struct PeakPositions {
  std::vector<PeakPosition> found;
  std::vector<OmittedPeak> omitted;
};

std::string to_string(OmitReason reason);

// Field offsets where hyperbola l reaches f_{k,l}.
PeakPositions peak_field_positions(const LacParams& lac, const PeakGridParams& grid);
PeakPositions peak_field_positions(const LacParams& lac, const std::vector<GridPeak>& peaks);

// Rough second-order rate (n_P1 / n_D)^2 D of the P1-P1-NV transitions, rad/s.
double tripolar_rate(const TripolarParams& params);
double p1_density(const TripolarParams& params);      // cm^-3
double dipolar_density(const TripolarParams& params);  // n_D, cm^-3

// Angle between two lattice directions (e.g. acos(1/3) between <111> bonds).
double lattice_angle(const Vec3& a, const Vec3& b);

}  // namespace nvmpr
