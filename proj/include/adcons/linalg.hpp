#pragma once

#include <Eigen/Dense>

namespace adcons {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // column k pairs with values(k)
};

/// Cyclic Jacobi eigen-decomposition of (M + M^T)/2.
///
/// Plain rotation sweeps until the off-diagonal Frobenius norm drops below
/// `tol` times the matrix norm. Quadratically convergent and accurate for the
/// small dense matrices used throughout (graph Laplacians, LMI blocks).
/// Throws NumericalError after `max_sweeps` sweeps without convergence.
SymmetricEigen jacobi_eigen(const Matrix& m, double tol = 1e-15, int max_sweeps = 100);

/// Eigenvalues only, ascending.
Vector symmetric_eigenvalues(const Matrix& m);

double max_symmetric_eigenvalue(const Matrix& m);
double min_symmetric_eigenvalue(const Matrix& m);

inline Matrix symmetric_part(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Largest absolute entry; 0 for empty matrices.
double max_abs(const Matrix& m);

/// Solves A^T X + X A + Q = 0 by Kronecker vectorisation. Intended for n up to
/// a few tens. Throws NumericalError when A has eigenvalues summing to zero.
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

}  // namespace adcons
