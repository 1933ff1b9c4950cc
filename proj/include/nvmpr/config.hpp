#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nvmpr/resonance_atlas.hpp"
#include "nvmpr/spin_models.hpp"
#include "nvmpr/units.hpp"

namespace nvmpr {

enum class Mode { Transitions, Atlas, Sweep, OdeCheck, Coupling };

std::string to_string(Mode mode);
std::optional<Mode> mode_from_string(std::string_view name);

// Evenly spaced samples in I/O units.
struct LinearRange {
  double min = 0.0;
  double max = 1.0;
  int points = 2;

  std::vector<double> values() const;
};

enum class LSelection { Dominant, All };
enum class SweepQuantity { Ratio, Derivative };

struct TransitionsConfig {
  double B = 0.0;             // T
  double tilt = 0.0;          // rad, from [111] toward [1-10]
  P1Params p1;
};

struct AtlasConfig {
  LacParams lac;
  PeakGridParams peaks;
  TripolarParams tripolar;
  P1Params p1;
  double theta_B = 0.0;  // rad, for the hyperfine splitting report
};

struct SweepConfig {
  LinearRange B_S;   // mT
  LinearRange f_LA;  // MHz
  LacParams lac;
  double omega_c = 0.0;
  double gamma_c = 0.0;
  double gamma_2 = 0.0;
  double g = 0.0;
  double P_zs = 0.0;
  double beta_Delta0 = 0.0;
  double bessel_z = 0.0;
  int l_max = 10;
  LSelection l_selection = LSelection::Dominant;
  SweepQuantity quantity = SweepQuantity::Ratio;
};

// Time-domain check of the closed form at scaled damping rates. For each l
// and eta: omega_a = l omega_L + beta_al_per_eta eta gamma_2,
// omega_b = bessel_z_per_l l omega_L, omega_c = l omega_L,
// omega_Delta = beta_Delta0 eta / sqrt(1 + eta^2) sqrt(gamma_1 gamma_2).
struct OdeCheckConfig {
  double omega_L = 0.0;  // rad/s
  double gamma_1 = 0.0;
  double gamma_2 = 0.0;
  double gamma_c = 0.0;
  double g = 0.0;
  double P_zs = 0.0;
  std::vector<int> l_values;
  LinearRange eta;
  double beta_Delta0 = 0.0;
  double beta_al_per_eta = 0.0;
  double bessel_z_per_l = 0.0;
  double tolerance = 0.0;
  long max_periods = 0;
  double max_rel_error = 0.0;
};

struct CouplingConfig {
  std::string field_map;  // empty: built-in synthetic spiral map
  int synthetic_points = 41;
  double n_S = 0.0;       // cm^-3
  double P_z = 0.0;
  double omega_c = 0.0;
  Vec3 nv_axis = Vec3::UnitZ();
  bool refine = true;
  double gamma_2 = 0.0;   // for the cooperativity report
  double gamma_c = 0.0;
};

struct EchoEntry {
  std::string key;
  std::string value;
  int line = 0;  // 0: default
};

struct RunConfig {
  Mode mode = Mode::Sweep;
  PhysicalConstants constants;
  double D = 0.0;  // rad/s
  double E = 0.0;  // rad/s
  TransitionsConfig transitions;
  AtlasConfig atlas;
  SweepConfig sweep;
  OdeCheckConfig ode;
  CouplingConfig coupling;
  std::vector<EchoEntry> echo;  // every key of the mode, defaults included
};

struct ConfigKey {
  std::string name;
  std::vector<Mode> modes;  // empty: all modes
  std::optional<std::string> default_value;
  std::string description;
};

const std::vector<ConfigKey>& config_keys();

// Strict "key = value" document; '#' starts a comment. Unknown, duplicate,
// missing or out-of-range keys raise ParseError with line and key. When
// `mode` is given it must agree with any "mode" key in the text.
RunConfig parse_config(std::string_view text, std::optional<Mode> mode = std::nullopt);
RunConfig load_config(const std::string& path, std::optional<Mode> mode = std::nullopt);

inline constexpr std::string_view kArtifactVersion = "nvmpr 1.0.0";

}  // namespace nvmpr
