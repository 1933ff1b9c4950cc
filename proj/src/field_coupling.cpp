#include "nvmpr/field_coupling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nvmpr/errors.hpp"

namespace nvmpr {

namespace {

// Corner-averaging over cells reduces to half weights on boundary vertices.
double axis_weight(int i, int n) {
  if (n == 1) return 1.0;
  return (i == 0 || i == n - 1) ? 0.5 : 1.0;
}

double sin2_between(const CVec3& b, const Vec3& axis) {
  const double b2 = b.squaredNorm();
  if (b2 == 0.0) return 1.0;
  const CVec3 n = axis.cast<std::complex<double>>();
  return std::clamp(b.cross(n).squaredNorm() / b2, 0.0, 1.0);
}

bool decimatable(int n) { return n == 1 || (n >= 3 && n % 2 == 1); }

template <class T>
std::vector<T> decimate_values(const std::vector<T>& values, const GridSpec& grid) {
  std::vector<T> out;
  for (int k = 0; k < grid.nz; k += (grid.nz > 1 ? 2 : 1))
    for (int j = 0; j < grid.ny; j += (grid.ny > 1 ? 2 : 1))
      for (int i = 0; i < grid.nx; i += (grid.nx > 1 ? 2 : 1)) out.push_back(values[grid.index(i, j, k)]);
  return out;
}

GridSpec decimate_grid(const GridSpec& g) {
  auto half = [](int n) { return n == 1 ? 1 : (n + 1) / 2; };
  GridSpec out = g;
  out.nx = half(g.nx);
  out.ny = half(g.ny);
  out.nz = half(g.nz);
  out.dx = g.nx > 1 ? 2.0 * g.dx : g.dx;
  out.dy = g.ny > 1 ? 2.0 * g.dy : g.dy;
  out.dz = g.nz > 1 ? 2.0 * g.dz : g.dz;
  return out;
}

}  // namespace

void FieldMap::validate() const {
  if (grid.nx < 1 || grid.ny < 1 || grid.nz < 1) throw InvalidField("field map: grid dimensions must be >= 1");
  if (!(grid.dx > 0.0) || !(grid.dy > 0.0) || !(grid.dz > 0.0)) throw InvalidField("field map: spacings must be positive");
  if (B_c.size() != grid.size() || mask.size() != grid.size()) throw InvalidField("field map: array sizes do not match grid");
  bool any = false;
  for (std::size_t p = 0; p < B_c.size(); ++p) {
    if (!B_c[p].allFinite()) throw InvalidField("field map: non-finite field value");
    any = any || mask[p] != 0;
  }
  if (!any) throw InvalidField("field map: diamond mask is empty");
}

void EnsembleMap::validate(std::size_t points) const {
  if (n_S.size() != points || P_z.size() != points || phi.size() != points)
    throw InvalidParameter("ensemble map: array sizes do not match the field grid");
  for (std::size_t p = 0; p < points; ++p) {
    if (!(n_S[p] >= 0.0)) throw InvalidParameter("ensemble map: n_S must be non-negative");
    if (!(std::abs(P_z[p]) <= 1.0)) throw InvalidParameter("ensemble map: |P_z| must not exceed 1");
    if (!std::isfinite(phi[p])) throw InvalidParameter("ensemble map: phi must be finite");
  }
}

EnsembleMap EnsembleMap::uniform(const FieldMap& field, double n_S, double P_z, const Vec3& nv_axis) {
  const double norm = nv_axis.norm();
  if (!(norm > 0.0)) throw InvalidParameter("ensemble map: zero NV axis");
  const Vec3 axis = nv_axis / norm;
  EnsembleMap e;
  const std::size_t n = field.B_c.size();
  e.n_S.assign(n, n_S);
  e.P_z.assign(n, P_z);
  e.phi.resize(n);
  for (std::size_t p = 0; p < n; ++p) e.phi[p] = std::asin(std::sqrt(sin2_between(field.B_c[p], axis)));
  return e;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double coupling_g(const FieldMap& field, const EnsembleMap& ensemble, double omega_c, const PhysicalConstants& constants) {
  field.validate();
  ensemble.validate(field.grid.size());
  if (!(omega_c > 0.0)) throw InvalidParameter("coupling_g: omega_c must be positive");

  const GridSpec& g = field.grid;
  std::vector<double> num(g.size()), den(g.size());
  for (int k = 0; k < g.nz; ++k) {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t p = g.index(i, j, k);
        const double w = axis_weight(i, g.nx) * axis_weight(j, g.ny) * axis_weight(k, g.nz);
        const double b2 = field.B_c[p].squaredNorm();
        const double s = std::sin(ensemble.phi[p]);
        den[p] = w * b2;
        num[p] = field.mask[p] ? w * units::per_cm3_to_per_m3(ensemble.n_S[p]) * ensemble.P_z[p] * b2 * s * s : 0.0;
      }
    }
  }
  const double denominator = pairwise_sum(den);
  if (!(denominator > 0.0)) throw InvalidField("coupling_g: field energy integral is zero");
  const double numerator = pairwise_sum(num);

  const double ge = constants.gamma_e();
  const double g2 = ge * ge * constants.mu0() * constants.hbar() * omega_c * numerator / denominator;
  return std::sqrt(std::max(g2, 0.0));
}

FieldMap decimate(const FieldMap& field) {
  const GridSpec& g = field.grid;
  if (!decimatable(g.nx) || !decimatable(g.ny) || !decimatable(g.nz) || (g.nx == 1 && g.ny == 1 && g.nz == 1))
    throw InvalidParameter("decimate: grid dimensions must be odd and at least 3 (or 1)");
  FieldMap out;
  out.grid = decimate_grid(g);
  out.B_c = decimate_values(field.B_c, g);
  out.mask = decimate_values(field.mask, g);
  return out;
}

EnsembleMap decimate(const EnsembleMap& ensemble, const GridSpec& grid) {
  return {decimate_values(ensemble.n_S, grid), decimate_values(ensemble.P_z, grid), decimate_values(ensemble.phi, grid)};
}

RefineReport refine_check(const FieldMap& field, const EnsembleMap& ensemble, double omega_c,
                          const PhysicalConstants& constants) {
  RefineReport r;
  r.g_full = coupling_g(field, ensemble, omega_c, constants);
  const FieldMap half = decimate(field);
  const EnsembleMap half_e = decimate(ensemble, field.grid);
  r.g_half = coupling_g(half, half_e, omega_c, constants);
  r.rel_diff = r.g_full > 0.0 ? std::abs(r.g_full - r.g_half) / r.g_full : std::abs(r.g_half);

  const GridSpec& h = half.grid;
  const bool again = decimatable(h.nx) && decimatable(h.ny) && decimatable(h.nz) && !(h.nx == 1 && h.ny == 1 && h.nz == 1);
  if (again) {
    try {
      const FieldMap quarter = decimate(half);
      r.g_quarter = coupling_g(quarter, decimate(half_e, h), omega_c, constants);
      const double d1 = std::abs(r.g_full - r.g_half);
      const double d2 = std::abs(r.g_half - *r.g_quarter);
      if (d1 > 0.0 && d2 > 0.0) {
        r.observed_order = std::log2(d2 / d1);
        r.slow_convergence = *r.observed_order < 1.5;
      }
    } catch (const InvalidField&) {
      // the coarsest lattice lost every masked point; two levels are all we have
    }
  }
  return r;
}

FieldMap read_field_map(std::istream& in) {
  FieldMap f;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  std::size_t row = 0;
  auto fail = [&](const std::string& msg) {
    throw InvalidField("field map line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (!have_header) {
      GridSpec& g = f.grid;
      if (!(ls >> g.nx >> g.ny >> g.nz >> g.dx >> g.dy >> g.dz)) fail("expected header 'nx ny nz dx dy dz'");
      if (g.nx < 1 || g.ny < 1 || g.nz < 1 || !(g.dx > 0) || !(g.dy > 0) || !(g.dz > 0)) fail("invalid grid header");
      f.B_c.resize(g.size());
      f.mask.resize(g.size());
      have_header = true;
      continue;
    }
    if (row >= f.grid.size()) fail("more rows than nx*ny*nz");
    double x, y, z, bx, by, bz;
    int m;
    if (!(ls >> x >> y >> z >> bx >> by >> bz >> m)) fail("expected 'x y z Bx By Bz mask'");
    if (m != 0 && m != 1) fail("mask must be 0 or 1");
    const GridSpec& g = f.grid;
    const int i = static_cast<int>(row % g.nx);
    const int j = static_cast<int>((row / g.nx) % g.ny);
    const int k = static_cast<int>(row / (static_cast<std::size_t>(g.nx) * g.ny));
    if (row == 0) f.grid.origin = Vec3(x, y, z);
    const Vec3 expect = f.grid.position(i, j, k);
    const double tol = 1e-6 * std::min({g.dx, g.dy, g.dz});
    if ((expect - Vec3(x, y, z)).cwiseAbs().maxCoeff() > tol) fail("point is off the declared grid (x must vary fastest)");
    f.B_c[row] = CVec3(bx, by, bz);
    f.mask[row] = static_cast<std::uint8_t>(m);
    ++row;
  }
  if (!have_header) throw InvalidField("field map: missing header");
  if (row != f.grid.size()) throw InvalidField("field map: expected " + std::to_string(f.grid.size()) + " rows, got " + std::to_string(row));
  f.validate();
  return f;
}

FieldMap read_field_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open field map '" + path + "'");
  return read_field_map(in);
}

void write_field_map(std::ostream& out, const FieldMap& field) {
  const GridSpec& g = field.grid;
  out.precision(17);
  out << "# nx ny nz dx dy dz, then x y z Bx By Bz mask (SI units, x fastest)\n";
  out << g.nx << ' ' << g.ny << ' ' << g.nz << ' ' << g.dx << ' ' << g.dy << ' ' << g.dz << '\n';
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t p = g.index(i, j, k);
        const Vec3 r = g.position(i, j, k);
        const CVec3& b = field.B_c[p];
        out << r.x() << ' ' << r.y() << ' ' << r.z() << ' ' << b.x().real() << ' ' << b.y().real() << ' '
            << b.z().real() << ' ' << int(field.mask[p]) << '\n';
      }
}

FieldMap synthetic_spiral_map(const SyntheticSpiralSpec& s) {
  if (s.points_per_axis < 3) throw InvalidParameter("synthetic map: need at least 3 points per axis");
  const int n = s.points_per_axis;
  FieldMap f;
  f.grid.nx = f.grid.ny = f.grid.nz = n;
  f.grid.dx = f.grid.dy = 2.0 * s.half_width / (n - 1);
  f.grid.dz = 2.0 * s.half_height / (n - 1);
  f.grid.origin = Vec3(-s.half_width, -s.half_width, -s.half_height);
  f.B_c.resize(f.grid.size());
  f.mask.resize(f.grid.size());
  const Vec3 m = Vec3::UnitZ();
  const double a2 = s.coil_radius * s.coil_radius;
  const double eps = 1e-9 * std::min(f.grid.dx, f.grid.dz);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t p = f.grid.index(i, j, k);
        const Vec3 r = f.grid.position(i, j, k);
        const double r2 = r.squaredNorm();
        const double soft = std::pow(r2 + a2, 2.5);
        // softened dipole: (3 (m.r) r - (r^2 + a^2) m) / (r^2 + a^2)^{5/2}
        const Vec3 b = (3.0 * m.dot(r) * r - (r2 + a2) * m) / soft;
        f.B_c[p] = b.cast<std::complex<double>>();
        const bool inside = std::abs(r.x()) <= s.diamond_half_width + eps && std::abs(r.y()) <= s.diamond_half_width + eps &&
                            r.z() >= -eps && r.z() <= s.diamond_thickness + eps;
        f.mask[p] = inside ? 1 : 0;
      }
  return f;
}

}  // namespace nvmpr
