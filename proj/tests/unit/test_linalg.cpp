#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "adcons/errors.hpp"
#include "adcons/linalg.hpp"
#include "adcons/random.hpp"

using namespace adcons;

namespace {

Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("jacobi_eigen on a diagonal matrix returns sorted entries") {
  Matrix d = Eigen::Vector3d(3.0, -1.0, 2.0).asDiagonal();
  auto e = jacobi_eigen(d);
  CHECK(e.values(0) == -1.0);
  CHECK(e.values(1) == 2.0);
  CHECK(e.values(2) == 3.0);
}

TEST_CASE("jacobi_eigen agrees with a tridiagonal QR solver") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.next_u64() % 12);
    Matrix m = symmetric_part(random_matrix(rng, n, n));
    auto jac = jacobi_eigen(m);
    Eigen::SelfAdjointEigenSolver<Matrix> ref(m);
    const double scale = std::max(1.0, max_abs(m));
    CHECK(max_abs(jac.values - ref.eigenvalues()) <= 1e-12 * scale);
    // Orthonormal eigenvectors reconstructing m.
    CHECK(max_abs(jac.vectors.transpose() * jac.vectors - Matrix::Identity(n, n)) <= 1e-12);
    Matrix rebuilt = jac.vectors * jac.values.asDiagonal() * jac.vectors.transpose();
    CHECK(max_abs(rebuilt - m) <= 1e-12 * scale);
  }
}

TEST_CASE("jacobi_eigen uses the symmetric part") {
  Matrix m(2, 2);
  m << 1.0, 4.0, 0.0, 1.0;  // symmetric part [[1,2],[2,1]]
  auto v = symmetric_eigenvalues(m);
  CHECK(v(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(v(1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(max_symmetric_eigenvalue(m) == doctest::Approx(3.0));
  CHECK(min_symmetric_eigenvalue(m) == doctest::Approx(-1.0));
}

TEST_CASE("max_abs") {
  CHECK(max_abs(Matrix()) == 0.0);
  Matrix m(1, 3);
  m << 1.0, -5.0, 2.0;
  CHECK(max_abs(m) == 5.0);
}

TEST_CASE("solve_lyapunov residual on random stable matrices") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.next_u64() % 6);
    Matrix a = random_matrix(rng, n, n);
    // Shift to make it Hurwitz.
    const double shift = a.eigenvalues().real().maxCoeff() + 0.5;
    a -= shift * Matrix::Identity(n, n);
    Matrix q = Matrix::Identity(n, n);
    Matrix x = solve_lyapunov(a, q);
    CHECK(max_abs(a.transpose() * x + x * a + q) <= 1e-10 * std::max(1.0, max_abs(x)));
    CHECK(min_symmetric_eigenvalue(x) > 0.0);
  }
}

TEST_CASE("solve_lyapunov rejects singular operators") {
  Matrix a = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(solve_lyapunov(a, Matrix::Identity(2, 2)), NumericalError);
}

TEST_CASE("Rng is reproducible and in range") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  Rng c(3);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = c.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}
