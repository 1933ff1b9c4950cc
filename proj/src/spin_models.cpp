#include "nvmpr/spin_models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "nvmpr/errors.hpp"

namespace nvmpr {

namespace {

using cd = std::complex<double>;

constexpr double kAxisTolerance = 1e-12;
constexpr double kStateOverlapFloor = 0.5;

void check_unit_axis(const Vec3& axis, const char* who) {
  if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > kAxisTolerance) {
    throw InvalidParameter(std::string(who) + ": axis must be a unit vector");
  }
}

void check_field(const Vec3& B) {
  if (!B.allFinite()) throw InvalidParameter("magnetic field must be finite");
}

struct SpinOps {
  CMatrix x, y, z;
};

// Spin-j operators in units of hbar, basis ordered from m = +j down to -j.
SpinOps spin_operators(int two_j) {
  const int n = two_j + 1;
  const double j = 0.5 * two_j;
  CMatrix plus = CMatrix::Zero(n, n);
  CMatrix z = CMatrix::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    const double m = j - r;
    z(r, r) = m;
    if (r > 0) {
      // S+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>
      plus(r - 1, r) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
  }
  const CMatrix minus = plus.adjoint();
  return {0.5 * (plus + minus), cd(0.0, -0.5) * (plus - minus), z};
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vec3 to_local(const lattice::Frame& f, const Vec3& v) { return {v.dot(f.x), v.dot(f.y), v.dot(f.z)}; }

double zeeman_sign(ZeemanSign s) { return s == ZeemanSign::Minus ? -1.0 : 1.0; }

std::string m_label(int two_m) {
  if (two_m == 0) return "0";
  const std::string sign = two_m > 0 ? "+" : "-";
  const int a = std::abs(two_m);
  return a % 2 == 0 ? sign + std::to_string(a / 2) : sign + std::to_string(a) + "/2";
}

// Eigenvectors of n.S for a spin-j ladder, ordered m = +j ... -j.
CMatrix projected_basis(const SpinOps& ops, const Vec3& n) {
  const CMatrix proj = n.x() * ops.x + n.y() * ops.y + n.z() * ops.z;
  const EigenDecomposition d = jacobi_eigh(proj);
  return d.vectors.rowwise().reverse();
}

bool has_degenerate_partner(const Eigen::VectorXd& values, Eigen::Index k) {
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (i != k && std::abs(values(i) - values(k)) <= 1e-9 * scale) return true;
  }
  return false;
}

}  // namespace

void NvParams::validate() const {
  if (!(D > 0.0)) throw InvalidParameter("NV: D must be positive");
  if (!(E >= 0.0)) throw InvalidParameter("NV: E must be non-negative");
  check_unit_axis(axis, "NV");
}

void P1Params::validate() const {
  if (!(A_par > 0.0) || !(A_perp > 0.0)) throw InvalidParameter("P1: hyperfine constants must be positive");
  check_unit_axis(axis, "P1");
}

SpinHamiltonian build_nv_hamiltonian(const NvParams& params, const Vec3& B, const PhysicalConstants& constants) {
  params.validate();
  check_field(B);
  const SpinOps s = spin_operators(2);
  const lattice::Frame frame = lattice::local_frame(params.axis, params.transverse_hint);
  const Vec3 b = to_local(frame, B);

  // S+^2 + S-^2 = 2 (Sx^2 - Sy^2)
  CMatrix h = params.D * s.z * s.z + params.E * (s.x * s.x - s.y * s.y);
  h += zeeman_sign(params.sign_convention) * constants.gamma_e() * (b.x() * s.x + b.y() * s.y + b.z() * s.z);
  return {h, {"m_S=+1", "m_S=0", "m_S=-1"}};
}

SpinHamiltonian build_p1_hamiltonian(const P1Params& params, const Vec3& B, const PhysicalConstants& constants) {
  params.validate();
  check_field(B);
  const SpinOps s = spin_operators(1);
  const SpinOps i = spin_operators(2);
  const CMatrix one3 = CMatrix::Identity(3, 3);
  const lattice::Frame frame = lattice::local_frame(params.axis, params.transverse_hint);
  const Vec3 b = to_local(frame, B);

  CMatrix h = zeeman_sign(params.sign_convention) * constants.gamma_e() *
              kron(b.x() * s.x + b.y() * s.y + b.z() * s.z, one3);
  h += params.A_perp * (kron(s.x, i.x) + kron(s.y, i.y));
  h += params.A_par * kron(s.z, i.z);

  std::vector<std::string> labels;
  for (int ms : {1, -1})
    for (int mi : {2, 0, -2}) labels.push_back("(m_S=" + m_label(ms) + ",m_I=" + m_label(mi) + ")");
  return {h, labels};
}

EigenDecomposition diagonalize(const SpinHamiltonian& h) { return jacobi_eigh(h.matrix); }

TransitionSet nv_transitions(const NvParams& params, const Vec3& B, const PhysicalConstants& constants,
                             int orientation_index) {
  const SpinHamiltonian h = build_nv_hamiltonian(params, B, constants);
  const EigenDecomposition d = diagonalize(h);

  // The E term does not touch m_S = 0, so the zero-field m_S = 0 state is basis row 1.
  std::array<double, 3> w0{}, wp{}, wm{};
  for (int k = 0; k < 3; ++k) {
    wp[k] = std::norm(d.vectors(0, k));
    w0[k] = std::norm(d.vectors(1, k));
    wm[k] = std::norm(d.vectors(2, k));
  }
  const int from = static_cast<int>(std::max_element(w0.begin(), w0.end()) - w0.begin());
  int a = (from + 1) % 3;
  int b = (from + 2) % 3;
  if (wm[a] + wp[b] < wm[b] + wp[a]) std::swap(a, b);  // a -> m_S=-1, b -> m_S=+1

  const bool from_weak = w0[from] < kStateOverlapFloor;
  TransitionSet out;
  out.entries.push_back({std::abs(d.values(a) - d.values(from)), h.basis_labels[1], h.basis_labels[2],
                         orientation_index, from_weak || wm[a] < kStateOverlapFloor});
  out.entries.push_back({std::abs(d.values(b) - d.values(from)), h.basis_labels[1], h.basis_labels[0],
                         orientation_index, from_weak || wp[b] < kStateOverlapFloor});
  std::sort(out.entries.begin(), out.entries.end(),
            [](const Transition& x, const Transition& y) { return x.frequency < y.frequency; });
  return out;
}

TransitionSet nv_orientation_transitions(double D, double E, const Vec3& B, const PhysicalConstants& constants) {
  TransitionSet all;
  const auto axes = lattice::nv_axes();
  for (int k = 0; k < 4; ++k) {
    NvParams p;
    p.D = D;
    p.E = E;
    p.axis = axes[static_cast<std::size_t>(k)];
    const TransitionSet one = nv_transitions(p, B, constants, k);
    all.entries.insert(all.entries.end(), one.entries.begin(), one.entries.end());
  }
  std::stable_sort(all.entries.begin(), all.entries.end(),
                   [](const Transition& x, const Transition& y) { return x.frequency < y.frequency; });
  return all;
}

TransitionSet p1_transitions(const P1Params& params, const Vec3& B, const PhysicalConstants& constants,
                             int orientation_index) {
  const SpinHamiltonian h = build_p1_hamiltonian(params, B, constants);
  const EigenDecomposition d = diagonalize(h);

  const lattice::Frame frame = lattice::local_frame(params.axis, params.transverse_hint);
  const double bmag = B.norm();
  const Vec3 b_hat = bmag > 0.0 ? Vec3(to_local(frame, B) / bmag) : Vec3::UnitZ();
  Vec3 n_hat(params.A_perp * b_hat.x(), params.A_perp * b_hat.y(), params.A_par * b_hat.z());
  n_hat.normalize();

  const CMatrix electron = projected_basis(spin_operators(1), b_hat);  // m_S = +1/2, -1/2
  const CMatrix nucleus = projected_basis(spin_operators(2), n_hat);   // m_I = +1, 0, -1

  // Reference product states, index = 3 * (electron row) + nucleus row.
  CMatrix ref(6, 6);
  for (int e = 0; e < 2; ++e)
    for (int n = 0; n < 3; ++n) ref.col(3 * e + n) = kron(electron.col(e), nucleus.col(n));

  const Eigen::MatrixXd overlap = (ref.adjoint() * d.vectors).cwiseAbs2();

  // Greedy assignment on the largest remaining overlaps.
  std::array<int, 6> state_of{};
  std::array<double, 6> weight{};
  std::array<bool, 6> ref_used{}, eig_used{};
  for (int step = 0; step < 6; ++step) {
    double best = -1.0;
    int bi = 0, bj = 0;
    for (int i = 0; i < 6; ++i) {
      if (ref_used[i]) continue;
      for (int j = 0; j < 6; ++j) {
        if (!eig_used[j] && overlap(i, j) > best) {
          best = overlap(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    ref_used[bi] = eig_used[bj] = true;
    state_of[bi] = bj;
    weight[bi] = best;
  }

  TransitionSet out;
  const char* mi_names[3] = {"+1", "0", "-1"};
  for (int n = 0; n < 3; ++n) {
    const int up = n;
    const int down = 3 + n;
    const int eu = state_of[up];
    const int ed = state_of[down];
    Transition t;
    t.frequency = std::abs(d.values(eu) - d.values(ed));
    t.from_label = std::string("(m_S=-1/2,m_I=") + mi_names[n] + ")";
    t.to_label = std::string("(m_S=+1/2,m_I=") + mi_names[n] + ")";
    t.orientation_index = orientation_index;
    t.ambiguous = weight[up] < kStateOverlapFloor || weight[down] < kStateOverlapFloor ||
                  has_degenerate_partner(d.values, eu) || has_degenerate_partner(d.values, ed);
    out.entries.push_back(t);
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const Transition& x, const Transition& y) { return x.frequency < y.frequency; });
  return out;
}

double p1_satellite_splitting(const TransitionSet& set) {
  if (set.entries.size() != 3) throw InvalidParameter("p1_satellite_splitting: expected three transitions");
  return 0.5 * (set.entries.back().frequency - set.entries.front().frequency);
}

}  // namespace nvmpr
