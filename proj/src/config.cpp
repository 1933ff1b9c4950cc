#include "nvmpr/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "nvmpr/errors.hpp"

namespace nvmpr {

namespace {

using M = Mode;

const std::vector<ConfigKey> kKeys = {
    {"mode", {}, std::nullopt, "transitions | atlas | sweep | ode-check | coupling"},
    {"D_MHz", {}, "2870", "zero-field splitting D/2pi"},
    {"E_MHz", {}, "0", "strain splitting E/2pi"},
    {"gamma_e_MHz_per_mT", {}, "28.03", "electron gyromagnetic ratio gamma_e/2pi"},

    {"B_mT", {M::Transitions}, std::nullopt, "field magnitude"},
    {"tilt_deg", {M::Transitions}, "0", "field tilt from [111] toward [1-10]"},
    {"A_par_MHz", {M::Transitions, M::Atlas}, "114.03", "P1 longitudinal hyperfine A_par/2pi"},
    {"A_perp_MHz", {M::Transitions, M::Atlas}, "81.33", "P1 transverse hyperfine A_perp/2pi"},

    {"theta_S_deg", {M::Atlas, M::Sweep}, "1.5", "angle between B_S and [111]"},
    {"f_m_MHz", {M::Atlas}, "86", "hyperfine beat frequency of the peak grid"},
    {"l_max", {M::Atlas, M::Sweep}, "10", "highest hyperbola order"},
    {"k_max", {M::Atlas}, "10", "highest peak-grid numerator"},
    {"half_integer", {M::Atlas}, "false", "also list k f_m / 2l peaks (odd k)"},
    {"p_N", {M::Atlas}, "1e-4", "relative nitrogen concentration"},
    {"nv_fraction", {M::Atlas}, "0.01", "NV to P1 density ratio"},
    {"theta_B_deg", {M::Atlas}, "70.528779365509308", "field angle for the P1 hyperfine splitting"},

    {"B_min_mT", {M::Sweep}, "92", "first B_S row"},
    {"B_max_mT", {M::Sweep}, "113", "last B_S row"},
    {"B_points", {M::Sweep}, "200", "number of B_S rows"},
    {"f_min_MHz", {M::Sweep}, "10", "first f_LA column"},
    {"f_max_MHz", {M::Sweep}, "300", "last f_LA column"},
    {"f_points", {M::Sweep}, "300", "number of f_LA columns"},
    {"omega_c_MHz", {M::Sweep, M::Coupling}, "276", "cavity frequency omega_c/2pi"},
    {"gamma_c_MHz", {M::Sweep, M::Coupling}, "2.87", "cavity damping gamma_c/2pi"},
    {"gamma_2_MHz", {M::Sweep, M::Coupling}, "30", "transverse spin damping gamma_2/2pi"},
    {"g_MHz", {M::Sweep}, "8", "spin-cavity coupling g/2pi"},
    {"P_zs", {M::Sweep}, "0.15", "steady polarization without drive"},
    {"beta_Delta0", {M::Sweep}, "10", "transverse coupling scale, beta_Delta = beta_Delta0 eta / sqrt(1 + eta^2)"},
    {"bessel_z", {M::Sweep}, "7", "longitudinal modulation index omega_b / omega_L"},
    {"l_selection", {M::Sweep}, "dominant", "dominant | all"},
    {"quantity", {M::Sweep}, "ratio", "ratio (P_z/P_zs) | derivative (d/df_LA per MHz)"},

    {"omega_L_per_s", {M::OdeCheck}, "1000", "drive angular frequency"},
    {"gamma_1_per_s", {M::OdeCheck}, "1", "longitudinal damping"},
    {"gamma_2_per_s", {M::OdeCheck}, "10", "transverse damping"},
    {"gamma_c_per_s", {M::OdeCheck}, "10", "cavity damping"},
    {"g_per_s", {M::OdeCheck}, "0", "spin-cavity coupling"},
    {"P_zs", {M::OdeCheck}, "0.5", "steady polarization without drive"},
    {"l_values", {M::OdeCheck}, "1,2,3", "superharmonic orders"},
    {"eta_min", {M::OdeCheck}, "-3", "first eta"},
    {"eta_max", {M::OdeCheck}, "3", "last eta"},
    {"eta_points", {M::OdeCheck}, "7", "number of eta values"},
    {"beta_Delta0", {M::OdeCheck}, "3", "transverse coupling scale"},
    {"beta_al_per_eta", {M::OdeCheck}, "0.5", "beta_al = beta_al_per_eta * eta"},
    {"bessel_z_per_l", {M::OdeCheck}, "1.5", "omega_b = bessel_z_per_l * l * omega_L"},
    {"tolerance", {M::OdeCheck}, "1e-9", "relative change of the period average"},
    {"max_periods", {M::OdeCheck}, "2000000", "integration budget in drive periods"},
    {"max_rel_error", {M::OdeCheck}, "0.02", "allowed |ode - closed form| / closed form"},

    {"field_map", {M::Coupling}, "", "field map file; empty selects the synthetic spiral map"},
    {"synthetic_points", {M::Coupling}, "41", "lattice points per axis of the synthetic map"},
    {"p_NV", {M::Coupling}, "1e-6", "NV concentration relative to carbon atoms"},
    {"P_z", {M::Coupling}, "0.15", "NV polarization"},
    {"nv_axis", {M::Coupling}, "1,1,1", "NV axis in map coordinates"},
    {"refine", {M::Coupling}, "true", "also report the decimated-lattice estimates"},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool applies(const ConfigKey& k, Mode mode) {
  return k.modes.empty() || std::find(k.modes.begin(), k.modes.end(), mode) != k.modes.end();
}

struct Raw {
  std::string value;
  int line = 0;
};

// Typed access to the merged (explicit + default) values of one mode.
class Values {
 public:
  Values(std::map<std::string, Raw> raw) : raw_(std::move(raw)) {}

  const Raw& raw(const std::string& key) const { return raw_.at(key); }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ParseError(msg, raw_.count(key) ? raw_.at(key).line : 0, key);
  }

  double number(const std::string& key) const {
    const std::string& s = raw(key).value;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) fail(key, "expected a finite number, got '" + s + "'");
    return v;
  }
  double positive(const std::string& key) const {
    const double v = number(key);
    if (!(v > 0.0)) fail(key, "must be positive");
    return v;
  }
  double non_negative(const std::string& key) const {
    const double v = number(key);
    if (!(v >= 0.0)) fail(key, "must be non-negative");
    return v;
  }
  long integer(const std::string& key) const {
    const std::string& s = raw(key).value;
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(key, "expected an integer, got '" + s + "'");
    return v;
  }
  long at_least(const std::string& key, long lo) const {
    const long v = integer(key);
    if (v < lo) fail(key, "must be at least " + std::to_string(lo));
    return v;
  }
  bool boolean(const std::string& key) const {
    const std::string& s = raw(key).value;
    if (s == "true") return true;
    if (s == "false") return false;
    fail(key, "expected true or false, got '" + s + "'");
  }
  std::string choice(const std::string& key, std::initializer_list<const char*> allowed) const {
    const std::string& s = raw(key).value;
    for (const char* a : allowed)
      if (s == a) return s;
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    fail(key, "expected one of " + list + ", got '" + s + "'");
  }
  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(raw(key).value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
        fail(key, "expected a comma-separated list of numbers");
      out.push_back(v);
    }
    if (out.empty()) fail(key, "list is empty");
    return out;
  }

  LinearRange range(const std::string& lo, const std::string& hi, const std::string& n) const {
    LinearRange r{number(lo), number(hi), static_cast<int>(at_least(n, 2))};
    if (!(r.max > r.min)) fail(hi, "must exceed " + lo);
    return r;
  }

 private:
  std::map<std::string, Raw> raw_;
};

void fill_transitions(RunConfig& c, const Values& v) {
  c.transitions.B = units::mt_to_tesla(v.non_negative("B_mT"));
  c.transitions.tilt = units::deg_to_rad(v.number("tilt_deg"));
  c.transitions.p1.A_par = units::mhz_to_rad(v.positive("A_par_MHz"));
  c.transitions.p1.A_perp = units::mhz_to_rad(v.positive("A_perp_MHz"));
}

void fill_atlas(RunConfig& c, const Values& v) {
  AtlasConfig& a = c.atlas;
  a.lac.theta_S = units::deg_to_rad(v.positive("theta_S_deg"));
  a.lac.D = c.D;
  a.lac.gamma_e = c.constants.gamma_e();
  a.peaks.f_m = v.positive("f_m_MHz") * 1e6;
  a.peaks.l_max = static_cast<int>(v.at_least("l_max", 1));
  a.peaks.k_max = static_cast<int>(v.at_least("k_max", 1));
  a.peaks.half_integer = v.boolean("half_integer");
  a.tripolar.p_N = v.non_negative("p_N");
  if (!(a.tripolar.p_N < 1.0)) v.fail("p_N", "must be below 1");
  a.tripolar.nv_fraction = v.positive("nv_fraction");
  a.tripolar.D = c.D;
  a.tripolar.constants = c.constants;
  a.p1.A_par = units::mhz_to_rad(v.positive("A_par_MHz"));
  a.p1.A_perp = units::mhz_to_rad(v.positive("A_perp_MHz"));
  a.theta_B = units::deg_to_rad(v.number("theta_B_deg"));
}

void fill_sweep(RunConfig& c, const Values& v) {
  SweepConfig& s = c.sweep;
  s.B_S = v.range("B_min_mT", "B_max_mT", "B_points");
  if (!(s.B_S.min >= 0.0)) v.fail("B_min_mT", "must be non-negative");
  s.f_LA = v.range("f_min_MHz", "f_max_MHz", "f_points");
  if (!(s.f_LA.min > 0.0)) v.fail("f_min_MHz", "must be positive");
  s.lac.theta_S = units::deg_to_rad(v.positive("theta_S_deg"));
  s.lac.D = c.D;
  s.lac.gamma_e = c.constants.gamma_e();
  s.omega_c = units::mhz_to_rad(v.positive("omega_c_MHz"));
  s.gamma_c = units::mhz_to_rad(v.positive("gamma_c_MHz"));
  s.gamma_2 = units::mhz_to_rad(v.positive("gamma_2_MHz"));
  s.g = units::mhz_to_rad(v.non_negative("g_MHz"));
  s.P_zs = v.number("P_zs");
  if (!(std::abs(s.P_zs) <= 1.0) || s.P_zs == 0.0) v.fail("P_zs", "must satisfy 0 < |P_zs| <= 1");
  s.beta_Delta0 = v.non_negative("beta_Delta0");
  s.bessel_z = v.non_negative("bessel_z");
  if (!(s.bessel_z < 50.0)) v.fail("bessel_z", "must be below 50");
  s.l_max = static_cast<int>(v.at_least("l_max", 1));
  s.l_selection = v.choice("l_selection", {"dominant", "all"}) == "all" ? LSelection::All : LSelection::Dominant;
  s.quantity = v.choice("quantity", {"ratio", "derivative"}) == "derivative" ? SweepQuantity::Derivative : SweepQuantity::Ratio;
  if (s.quantity == SweepQuantity::Derivative && s.f_LA.points < 3) v.fail("f_points", "derivative maps need at least 3 columns");
}

void fill_ode(RunConfig& c, const Values& v) {
  OdeCheckConfig& o = c.ode;
  o.omega_L = v.positive("omega_L_per_s");
  o.gamma_1 = v.positive("gamma_1_per_s");
  o.gamma_2 = v.positive("gamma_2_per_s");
  o.gamma_c = v.positive("gamma_c_per_s");
  o.g = v.non_negative("g_per_s");
  o.P_zs = v.number("P_zs");
  if (!(std::abs(o.P_zs) <= 1.0) || o.P_zs == 0.0) v.fail("P_zs", "must satisfy 0 < |P_zs| <= 1");
  for (double l : v.list("l_values")) {
    if (l != std::floor(l) || l < 1 || l > 1000) v.fail("l_values", "orders must be integers in [1, 1000]");
    o.l_values.push_back(static_cast<int>(l));
  }
  o.eta = v.range("eta_min", "eta_max", "eta_points");
  o.beta_Delta0 = v.non_negative("beta_Delta0");
  o.beta_al_per_eta = v.number("beta_al_per_eta");
  o.bessel_z_per_l = v.non_negative("bessel_z_per_l");
  o.tolerance = v.positive("tolerance");
  o.max_periods = v.at_least("max_periods", 1);
  o.max_rel_error = v.positive("max_rel_error");
}

void fill_coupling(RunConfig& c, const Values& v) {
  CouplingConfig& k = c.coupling;
  k.field_map = v.raw("field_map").value;
  k.synthetic_points = static_cast<int>(v.at_least("synthetic_points", 3));
  const double p_nv = v.non_negative("p_NV");
  if (!(p_nv <= 1.0)) v.fail("p_NV", "must not exceed 1");
  k.n_S = p_nv * lattice::kAtomDensity;
  k.P_z = v.number("P_z");
  if (!(std::abs(k.P_z) <= 1.0)) v.fail("P_z", "must satisfy |P_z| <= 1");
  k.omega_c = units::mhz_to_rad(v.positive("omega_c_MHz"));
  const auto axis = v.list("nv_axis");
  if (axis.size() != 3) v.fail("nv_axis", "expected three components");
  k.nv_axis = Vec3(axis[0], axis[1], axis[2]);
  if (!(k.nv_axis.norm() > 0.0)) v.fail("nv_axis", "must be non-zero");
  k.nv_axis.normalize();
  k.refine = v.boolean("refine");
  k.gamma_2 = units::mhz_to_rad(v.positive("gamma_2_MHz"));
  k.gamma_c = units::mhz_to_rad(v.positive("gamma_c_MHz"));
  if (!k.field_map.empty() && !std::ifstream(k.field_map)) v.fail("field_map", "file '" + k.field_map + "' does not exist");
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Transitions: return "transitions";
    case Mode::Atlas: return "atlas";
    case Mode::Sweep: return "sweep";
    case Mode::OdeCheck: return "ode-check";
    case Mode::Coupling: return "coupling";
  }
  return "?";
}

std::optional<Mode> mode_from_string(std::string_view name) {
  for (Mode m : {Mode::Transitions, Mode::Atlas, Mode::Sweep, Mode::OdeCheck, Mode::Coupling})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

std::vector<double> LinearRange::values() const {
  std::vector<double> v(points);
  const double step = (max - min) / (points - 1);
  for (int i = 0; i < points; ++i) v[i] = min + i * step;
  v.back() = max;
  return v;
}

const std::vector<ConfigKey>& config_keys() { return kKeys; }

RunConfig parse_config(std::string_view text, std::optional<Mode> mode_hint) {
  std::map<std::string, Raw> given;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no, "");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ParseError("missing key before '='", line_no, "");
    const bool known = std::any_of(kKeys.begin(), kKeys.end(), [&](const ConfigKey& k) { return k.name == key; });
    if (!known) throw ParseError("unknown key", line_no, key);
    if (given.count(key)) throw ParseError("duplicate key (first set on line " + std::to_string(given[key].line) + ")", line_no, key);
    given[key] = {value, line_no};
  }

  RunConfig c;
  if (given.count("mode")) {
    const auto m = mode_from_string(given["mode"].value);
    if (!m) throw ParseError("unknown mode '" + given["mode"].value + "'", given["mode"].line, "mode");
    if (mode_hint && *mode_hint != *m)
      throw ParseError("config is for mode '" + given["mode"].value + "' but '" + to_string(*mode_hint) + "' was requested",
                       given["mode"].line, "mode");
    c.mode = *m;
  } else if (mode_hint) {
    c.mode = *mode_hint;
    given["mode"] = {to_string(*mode_hint), 0};
  } else {
    throw ParseError("missing required key", 0, "mode");
  }

  std::map<std::string, Raw> merged;
  for (const auto& [key, raw] : given) {
    const bool ok = std::any_of(kKeys.begin(), kKeys.end(), [&](const ConfigKey& k) { return k.name == key && applies(k, c.mode); });
    if (!ok) throw ParseError("key is not used by mode '" + to_string(c.mode) + "'", raw.line, key);
  }
  for (const ConfigKey& k : kKeys) {
    if (!applies(k, c.mode)) continue;
    if (auto it = given.find(k.name); it != given.end()) {
      merged[k.name] = it->second;
    } else if (k.default_value) {
      merged[k.name] = {*k.default_value, 0};
    } else {
      throw ParseError("missing required key", 0, k.name);
    }
    c.echo.push_back({k.name, merged[k.name].value, merged[k.name].line});
  }

  const Values v(std::move(merged));
  const double gamma_e = units::mhz_to_rad(v.positive("gamma_e_MHz_per_mT")) * 1e3;
  c.constants = PhysicalConstants(gamma_e, PhysicalConstants{}.mu0(), PhysicalConstants{}.hbar());
  c.D = units::mhz_to_rad(v.positive("D_MHz"));
  c.E = units::mhz_to_rad(v.non_negative("E_MHz"));

  switch (c.mode) {
    case Mode::Transitions: fill_transitions(c, v); break;
    case Mode::Atlas: fill_atlas(c, v); break;
    case Mode::Sweep: fill_sweep(c, v); break;
    case Mode::OdeCheck: fill_ode(c, v); break;
    case Mode::Coupling: fill_coupling(c, v); break;
  }
  return c;
}

RunConfig load_config(const std::string& path, std::optional<Mode> mode) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config file '" + path + "'", 0, "");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), mode);
}

}  // namespace nvmpr
