#include "nvmpr/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

#include "nvmpr/cavity_bloch.hpp"
#include "nvmpr/errors.hpp"
#include "nvmpr/field_coupling.hpp"
#include "nvmpr/resonance_atlas.hpp"
#include "nvmpr/spin_models.hpp"

namespace nvmpr {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ojson cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> ojson {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return std::isfinite(v) ? ojson(v) : ojson(nullptr);
        else return ojson(v);
      },
      c);
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_double(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
        else return v;
      },
      c);
}

std::map<std::string, std::string> echo_metadata(const RunConfig& config) {
  std::map<std::string, std::string> m;
  for (const auto& e : config.echo) m["config." + e.key] = e.value;
  m["artifact_version"] = std::string(kArtifactVersion);
  return m;
}

struct CellResult {
  double value = kNaN;
  std::string reason;
};

CellResult guarded_cell(const SweepConfig& s, double B_mT, double f_MHz) {
  try {
    const double v = sweep_cell(s, B_mT, f_MHz);
    if (!std::isfinite(v)) return {kNaN, "non_finite"};
    return {v, {}};
  } catch (const UnsupportedRange&) {
    return {kNaN, "unsupported_range"};
  } catch (const InvalidParameter&) {
    return {kNaN, "invalid_parameter"};
  } catch (const ContractViolation&) {
    return {kNaN, "contract_violation"};
  }
}

double beta_al(const SweepConfig& s, double omega_a, double W, int l) { return (omega_a - l * W) / s.gamma_2; }

}  // namespace

int dominant_order(const SweepConfig& s, double B_mT, double f_MHz) {
  const double delta_B = units::mt_to_tesla(B_mT) - s.lac.lac_field();
  const double omega_a = lac_frequency(s.lac, delta_B);
  const double W = units::mhz_to_rad(f_MHz);
  int best = 1;
  for (int l = 2; l <= s.l_max; ++l)
    if (std::abs(beta_al(s, omega_a, W, l)) < std::abs(beta_al(s, omega_a, W, best))) best = l;
  return best;
}

double sweep_cell(const SweepConfig& s, double B_mT, double f_MHz) {
  const double delta_B = units::mt_to_tesla(B_mT) - s.lac.lac_field();
  const double eta = s.lac.eta(delta_B);
  const double omega_a = lac_frequency(s.lac, delta_B);
  const double W = units::mhz_to_rad(f_MHz);

  // g already contains the polarization (it scales with sqrt(n_S P_z)), so
  // kappa P_zs is the cooperativity built from g, with the sign of P_zs.
  const double kappa = cooperativity(s.g, s.gamma_2, s.gamma_c) / std::abs(s.P_zs);

  auto ratio_at = [&](int l) {
    SuperharmonicPoint p;
    p.l = l;
    p.beta_cl = (s.omega_c - l * W) / s.gamma_c;
    p.beta_al = beta_al(s, omega_a, W, l);
    p.beta_Delta = s.beta_Delta0 * eta / std::sqrt(1.0 + eta * eta);
    p.kappa = kappa;
    p.z = s.bessel_z;
    return closed_form_pz(p, s.P_zs);
  };

  if (s.l_selection == LSelection::Dominant) return ratio_at(dominant_order(s, B_mT, f_MHz));
  double product = 1.0;
  for (int l = 1; l <= s.l_max; ++l) product *= ratio_at(l);
  return product;
}

SweepGrid run_sweep(const RunConfig& config, int threads) {
  if (config.mode != Mode::Sweep) throw InvalidParameter("run_sweep: config mode is not sweep");
  if (threads < 1) throw InvalidParameter("run_sweep: threads must be >= 1");
  const SweepConfig& s = config.sweep;

  SweepGrid grid;
  grid.rows = {std::string(kFieldAxis), "mT", s.B_S.values()};
  grid.cols = {std::string(kFrequencyAxis), "MHz", s.f_LA.values()};
  const std::size_t nr = grid.rows.values.size(), nc = grid.cols.values.size();
  grid.values.assign(nr * nc, kNaN);
  grid.metadata = echo_metadata(config);
  grid.metadata["kappa"] = format_double(cooperativity(s.g, s.gamma_2, s.gamma_c));

  std::vector<std::vector<CellFlag>> row_flags(nr);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < nr; r = next++) {
      for (std::size_t c = 0; c < nc; ++c) {
        const CellResult res = guarded_cell(s, grid.rows.values[r], grid.cols.values[c]);
        grid.values[r * nc + c] = res.value;
        if (!res.reason.empty()) row_flags[r].push_back({r, c, res.reason});
      }
    }
  };
  const int n_workers = static_cast<int>(std::min<std::size_t>(threads, std::max<std::size_t>(nr, 1)));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& f : row_flags) grid.flags.insert(grid.flags.end(), f.begin(), f.end());

  if (s.quantity == SweepQuantity::Derivative) return derivative_map(grid);
  return grid;
}

Report run_transitions(const RunConfig& config) {
  const TransitionsConfig& t = config.transitions;
  Report r;
  r.mode = Mode::Transitions;
  r.metadata = echo_metadata(config);
  const Vec3 B = lattice::tilted(lattice::direction(1, 1, 1), lattice::direction(1, -1, 0), t.tilt, t.B);
  r.summary = {{"B_mT", units::tesla_to_mt(t.B)},
               {"tilt_deg", units::rad_to_deg(t.tilt)},
               {"lac_field_mT", units::tesla_to_mt(config.D / config.constants.gamma_e())}};
  r.columns = {"species", "orientation", "from", "to", "f_MHz", "ambiguous"};
  const TransitionSet nv = nv_orientation_transitions(config.D, config.E, B, config.constants);
  for (const auto& e : nv.entries)
    r.rows.push_back({std::string("NV"), static_cast<long long>(e.orientation_index), e.from_label, e.to_label,
                      units::rad_to_mhz(e.frequency), e.ambiguous});
  const auto axes = lattice::nv_axes();
  for (int i = 0; i < 4; ++i) {
    P1Params p1 = t.p1;
    p1.axis = axes[i];
    const TransitionSet set = p1_transitions(p1, B, config.constants, i);
    for (const auto& e : set.entries)
      r.rows.push_back({std::string("P1"), static_cast<long long>(i), e.from_label, e.to_label, units::rad_to_mhz(e.frequency),
                        e.ambiguous});
  }
  return r;
}

Report run_atlas(const RunConfig& config) {
  const AtlasConfig& a = config.atlas;
  Report r;
  r.mode = Mode::Atlas;
  r.metadata = echo_metadata(config);
  a.lac.validate();
  r.summary = {{"lac_field_mT", units::tesla_to_mt(a.lac.lac_field())},
               {"omega_a0_over_2pi_MHz", units::rad_to_mhz(a.lac.omega_a0())},
               {"large_angle_warning", a.lac.large_angle()},
               {"hyperfine_splitting_MHz", units::rad_to_mhz(hyperfine_splitting(a.p1, a.theta_B))},
               {"hyperfine_splitting_axial_MHz", units::rad_to_mhz(hyperfine_splitting(a.p1, 0.0))},
               {"n_D_cm3", dipolar_density(a.tripolar)},
               {"n_P1_cm3", p1_density(a.tripolar)},
               {"tripolar_rate_over_2pi_Hz", units::rad_to_hz(tripolar_rate(a.tripolar))}};
  r.columns = {"k", "l", "numerator", "denominator", "f_MHz", "half_integer", "delta_B_minus_mT", "delta_B_plus_mT", "status"};
  for (const GridPeak& p : peak_grid(a.peaks)) {
    const PeakPositions pos = peak_field_positions(a.lac, std::vector<GridPeak>{p});
    std::vector<Cell> row = {static_cast<long long>(p.k), static_cast<long long>(p.l), static_cast<long long>(p.numerator),
                             static_cast<long long>(p.denominator), p.frequency * 1e-6, p.half_integer};
    if (!pos.found.empty()) {
      row.insert(row.end(), {units::tesla_to_mt(pos.found[0].delta_B_minus), units::tesla_to_mt(pos.found[0].delta_B_plus),
                             std::string("found")});
    } else {
      row.insert(row.end(), {kNaN, kNaN, to_string(pos.omitted.at(0).reason)});
    }
    r.rows.push_back(std::move(row));
  }
  return r;
}

Report run_ode_check(const RunConfig& config) {
  const OdeCheckConfig& o = config.ode;
  Report r;
  r.mode = Mode::OdeCheck;
  r.metadata = echo_metadata(config);
  r.columns = {"l", "eta", "beta_al", "beta_Delta", "closed_form", "ode", "rel_error", "converged", "periods"};
  double worst = 0.0;
  bool all_converged = true;
  for (int l : o.l_values) {
    for (double eta : o.eta.values()) {
      BlochCavityParams p;
      p.omega_L = o.omega_L;
      p.gamma_1 = o.gamma_1;
      p.gamma_2 = o.gamma_2;
      p.gamma_c = o.gamma_c;
      p.omega_c = l * o.omega_L;
      p.g = o.g;
      p.omega_a = l * o.omega_L + o.beta_al_per_eta * eta * o.gamma_2;
      p.omega_b = o.bessel_z_per_l * l * o.omega_L;
      p.omega_Delta = o.beta_Delta0 * eta / std::sqrt(1.0 + eta * eta) * std::sqrt(o.gamma_1 * o.gamma_2);
      p.P_zs = o.P_zs;
      BlochCavityState s0;
      s0.P_z = o.P_zs;
      const SteadyStateReport ss = integrate_to_steady_state(p, s0, o.tolerance, o.max_periods);
      const SuperharmonicPoint pt = superharmonic_point(p, l);
      const double cf = closed_form_pz(pt, o.P_zs);
      const double ode = ss.mean_P_z / o.P_zs;
      const double rel = std::abs(ode - cf) / std::abs(cf);
      const bool ok = ss.converged && !ss.bounds_violated;
      all_converged = all_converged && ok;
      worst = std::max(worst, rel);
      r.rows.push_back({static_cast<long long>(l), eta, pt.beta_al, pt.beta_Delta, cf, ode, rel, ok,
                        static_cast<long long>(ss.periods)});
    }
  }
  const bool pass = all_converged && worst <= o.max_rel_error;
  r.summary = {{"points", static_cast<long long>(r.rows.size())},
               {"worst_rel_error", worst},
               {"all_converged", all_converged},
               {"pass", pass}};
  r.numerically_ok = pass;
  return r;
}

Report run_coupling(const RunConfig& config) {
  const CouplingConfig& k = config.coupling;
  Report r;
  r.mode = Mode::Coupling;
  r.metadata = echo_metadata(config);
  FieldMap field;
  if (k.field_map.empty()) {
    SyntheticSpiralSpec spec;
    spec.points_per_axis = k.synthetic_points;
    field = synthetic_spiral_map(spec);
  } else {
    field = read_field_map(k.field_map);
  }
  const EnsembleMap ensemble = EnsembleMap::uniform(field, k.n_S, k.P_z, k.nv_axis);
  const double g = coupling_g(field, ensemble, k.omega_c, config.constants);
  long long masked = std::count(field.mask.begin(), field.mask.end(), std::uint8_t{1});
  r.summary = {{"source", k.field_map.empty() ? std::string("synthetic") : k.field_map},
               {"nx", static_cast<long long>(field.grid.nx)},
               {"ny", static_cast<long long>(field.grid.ny)},
               {"nz", static_cast<long long>(field.grid.nz)},
               {"masked_points", masked},
               {"n_S_cm3", k.n_S},
               {"g_rad_per_s", g},
               {"g_over_2pi_MHz", units::rad_to_mhz(g)},
               {"kappa", cooperativity(g, k.gamma_2, k.gamma_c)}};
  if (k.refine) {
    const RefineReport ref = refine_check(field, ensemble, k.omega_c, config.constants);
    r.summary.push_back({"g_half_rad_per_s", ref.g_half});
    r.summary.push_back({"refine_rel_diff", ref.rel_diff});
    r.summary.push_back({"g_quarter_rad_per_s", ref.g_quarter.value_or(kNaN)});
    r.summary.push_back({"observed_order", ref.observed_order.value_or(kNaN)});
    r.summary.push_back({"slow_convergence", ref.slow_convergence});
  }
  return r;
}

std::string report_to_json(const Report& report) {
  ojson j;
  j["mode"] = to_string(report.mode);
  ojson summary = ojson::object();
  for (const auto& [k, v] : report.summary) summary[k] = cell_json(v);
  j["summary"] = summary;
  j["columns"] = report.columns;
  ojson rows = ojson::array();
  for (const auto& row : report.rows) {
    ojson out = ojson::array();
    for (const auto& c : row) out.push_back(cell_json(c));
    rows.push_back(out);
  }
  j["rows"] = rows;
  j["metadata"] = report.metadata;
  return j.dump(1) + "\n";
}

std::string report_to_csv(const Report& report) {
  std::string out;
  if (report.columns.empty()) {
    out = "key,value\n";
    for (const auto& [k, v] : report.summary) out += k + "," + cell_text(v) + "\n";
    return out;
  }
  for (const auto& [k, v] : report.summary) out += "# " + k + " = " + cell_text(v) + "\n";
  for (std::size_t i = 0; i < report.columns.size(); ++i) out += (i ? "," : "") + report.columns[i];
  out += "\n";
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
    out += "\n";
  }
  return out;
}

void write_report(const Report& report, const std::string& path, GridFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << (format == GridFormat::Json ? report_to_json(report) : report_to_csv(report));
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace nvmpr
