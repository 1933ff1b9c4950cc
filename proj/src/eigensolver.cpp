#include "nvmpr/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "nvmpr/errors.hpp"

namespace nvmpr {

namespace {

double off_diagonal_norm(const CMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

constexpr int kMaxSweeps = 64;

}  // namespace

double hermiticity_defect(const CMatrix& h) {
  const double scale = h.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
}

EigenDecomposition jacobi_eigh(const CMatrix& h, double rel_tol) {
  if (h.rows() != h.cols()) throw ContractViolation("jacobi_eigh: matrix is not square");
  if (!h.allFinite()) throw ContractViolation("jacobi_eigh: non-finite entries");
  if (hermiticity_defect(h) >= 1e-9) throw ContractViolation("jacobi_eigh: matrix is not Hermitian");

  const Eigen::Index n = h.rows();
  CMatrix a = 0.5 * (h + h.adjoint());
  CMatrix v = CMatrix::Identity(n, n);
  const double threshold = rel_tol * a.norm();

  int sweep = 0;
  while (sweep < kMaxSweeps && off_diagonal_norm(a) > threshold) {
    ++sweep;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const std::complex<double> apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;

        // U = diag(1, e^{-i phi}) * [[c, s], [-s, c]] zeroes a(p, q)
        const std::complex<double> phase = apq / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        const std::complex<double> upp = c;
        const std::complex<double> upq = s;
        const std::complex<double> uqp = -s * std::conj(phase);
        const std::complex<double> uqq = c * std::conj(phase);

        // a <- a U
        for (Eigen::Index k = 0; k < n; ++k) {
          const std::complex<double> akp = a(k, p);
          const std::complex<double> akq = a(k, q);
          a(k, p) = akp * upp + akq * uqp;
          a(k, q) = akp * upq + akq * uqq;
        }
        // a <- U^H a
        for (Eigen::Index k = 0; k < n; ++k) {
          const std::complex<double> apk = a(p, k);
          const std::complex<double> aqk = a(q, k);
          a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
          a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const std::complex<double> vkp = v(k, p);
          const std::complex<double> vkq = v(k, q);
          v(k, p) = vkp * upp + vkq * uqp;
          v(k, q) = vkp * upq + vkq * uqq;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]).real();
    out.vectors.col(k) = v.col(order[k]);
  }
  out.sweeps = sweep;
  return out;
}

}  // namespace nvmpr
