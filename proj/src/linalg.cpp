#include "adcons/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "adcons/errors.hpp"

namespace adcons {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Matrix& m, double tol, int max_sweeps) {
  if (m.rows() != m.cols()) throw std::invalid_argument("jacobi_eigen: matrix must be square");
  const Eigen::Index n = m.rows();
  Matrix a = symmetric_part(m);
  Matrix v = Matrix::Identity(n, n);

  const double scale = a.norm();
  int sweep = 0;
  while (scale > 0.0 && off_diagonal_norm(a) > tol * scale) {
    if (sweep++ >= max_sweeps) {
      throw NumericalError("jacobi_eigen: no convergence after " + std::to_string(max_sweeps) +
                           " sweeps");
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        // A <- J^T A J, J the (p,q) plane rotation [[c, s], [-s, c]].
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

Vector symmetric_eigenvalues(const Matrix& m) { return jacobi_eigen(m).values; }

double max_symmetric_eigenvalue(const Matrix& m) {
  const Vector ev = symmetric_eigenvalues(m);
  return ev.size() == 0 ? 0.0 : ev(ev.size() - 1);
}

double min_symmetric_eigenvalue(const Matrix& m) {
  const Vector ev = symmetric_eigenvalues(m);
  return ev.size() == 0 ? 0.0 : ev(0);
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n) {
    throw std::invalid_argument("solve_lyapunov: dimension mismatch");
  }
  const Matrix eye = Matrix::Identity(n, n);
  const Matrix at = a.transpose();
  Matrix kron(n * n, n * n);
  // vec(A^T X) = (I kron A^T) vec X ; vec(X A) = (A^T kron I) vec X
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      kron.block(i * n, j * n, n, n) = eye(i, j) * at + at(i, j) * eye;
    }
  }
  Eigen::FullPivLU<Matrix> lu(kron);
  if (!lu.isInvertible()) throw NumericalError("solve_lyapunov: singular Lyapunov operator");
  const Vector rhs = -Eigen::Map<const Vector>(Matrix(q).data(), n * n);
  Vector x = lu.solve(rhs);
  return Eigen::Map<Matrix>(x.data(), n, n);
}

}  // namespace adcons
