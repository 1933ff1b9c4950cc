#pragma once

#include <Eigen/Dense>

namespace nvmpr {

using CMatrix = Eigen::MatrixXcd;

struct EigenDecomposition {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // column k belongs to values(k)
  int sweeps = 0;
};

// max|H - H^dagger| relative to max|H| (0 for the zero matrix).
double hermiticity_defect(const CMatrix& h);

// Cyclic Jacobi diagonalization of a small dense complex Hermitian matrix.
// Each rotation removes the phase of the pivot and then applies a real plane
// rotation. Stops once the off-diagonal Frobenius norm drops below
// `rel_tol` times the Frobenius norm of the input.
// Throws ContractViolation if the input is not Hermitian within 1e-9.
EigenDecomposition jacobi_eigh(const CMatrix& h, double rel_tol = 1e-12);

}  // namespace nvmpr
