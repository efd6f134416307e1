#include <doctest.h>

#include <cmath>

#include "adcons/dynamics.hpp"
#include "adcons/random.hpp"

using namespace adcons;

namespace {

LinearModel double_integrator() {
  Matrix a(2, 2), b(2, 1);
  a << 0, 1, 0, 0;
  b << 0, 1;
  return LinearModel(a, b);
}

}  // namespace

TEST_CASE("linear_drift examples") {
  LinearModel m0(Matrix::Zero(3, 3), Matrix::Identity(3, 3));
  CHECK(linear_drift(m0, Vector::Constant(3, 4.5), Vector::Zero(3)) == Vector::Zero(3));

  auto di = double_integrator();
  CHECK(linear_drift(di, Eigen::Vector2d(1, 0), Vector::Zero(1)) == Vector::Zero(2));

  Vector u(1);
  u << 2;
  CHECK(linear_drift(di, Eigen::Vector2d(0, 1), u) == Eigen::Vector2d(1, 2));
}

TEST_CASE("model shape validation") {
  CHECK_THROWS_AS(LinearModel(Matrix::Zero(2, 3), Matrix::Zero(2, 1)), std::invalid_argument);
  CHECK_THROWS_AS(LinearModel(Matrix::Zero(2, 2), Matrix::Zero(3, 1)), std::invalid_argument);
  auto di = double_integrator();
  CHECK_THROWS_AS(linear_drift(di, Vector::Zero(3), Vector::Zero(1)), std::invalid_argument);
  CHECK_THROWS_AS(linear_drift(di, Vector::Zero(2), Vector::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(NonlinearModel(di, Matrix::Zero(3, 1), linear_nonlinearity(Matrix::Zero(1, 2)), 1.0),
                  std::invalid_argument);
}

TEST_CASE("nonlinear_drift rejects an f of the wrong length") {
  NonlinearModel m(double_integrator(), Matrix::Identity(2, 2),
                   [](const Vector&) { return Vector::Zero(3); }, 1.0);
  CHECK_THROWS_AS(nonlinear_drift(m, Vector::Zero(2), Vector::Zero(1)), std::invalid_argument);
}

TEST_CASE("manipulator model entries") {
  auto m = manipulator_model();
  CHECK(m.n() == 4);
  CHECK(m.p() == 1);
  CHECK(m.m() == 4);
  CHECK(m.linear.A(1, 0) == -48.6);
  CHECK(m.linear.A(1, 1) == -1.25);
  CHECK(m.linear.A(1, 2) == 48.6);
  CHECK(m.linear.A(2, 3) == 10.0);
  CHECK(m.linear.A(3, 0) == 1.95);
  CHECK(m.linear.A(3, 2) == -1.95);
  CHECK(m.linear.B(1, 0) == 21.6);
  CHECK(m.gamma == 0.333);
  CHECK(m.D1 == Matrix::Identity(4, 4));
}

TEST_CASE("manipulator nonlinear drift") {
  auto m = manipulator_model();
  CHECK(nonlinear_drift(m, Vector::Zero(4), Vector::Zero(1)) == Vector::Zero(4));

  Vector x = Vector::Zero(4);
  x(2) = M_PI / 2.0;
  Vector d = nonlinear_drift(m, x, Vector::Zero(1));
  // Independent scalar evaluation.
  CHECK(d(0) == 0.0);
  CHECK(std::abs(d(1) - 76.34070148223198) <= 1e-12);
  CHECK(d(2) == 0.0);
  CHECK(std::abs(d(3) - (-3.3960528372500485)) <= 1e-12);
}

TEST_CASE("nonlinear drift with zero D1 equals linear drift exactly") {
  Rng rng(5);
  auto di = double_integrator();
  NonlinearModel m(di, Matrix::Zero(2, 2), sine_nonlinearity(Matrix::Identity(2, 2)), 3.0);
  for (int k = 0; k < 200; ++k) {
    Vector x(2), u(1);
    x << rng.normal(), rng.normal();
    u << rng.normal();
    CHECK(nonlinear_drift(m, x, u) == linear_drift(di, x, u));
  }
}

TEST_CASE("linear drift is linear") {
  Rng rng(9);
  auto m = manipulator_model().linear;
  for (int k = 0; k < 200; ++k) {
    Vector x1(4), x2(4), u1(1), u2(1);
    for (int i = 0; i < 4; ++i) {
      x1(i) = rng.normal();
      x2(i) = rng.normal();
    }
    u1 << rng.normal();
    u2 << rng.normal();
    Vector lhs = linear_drift(m, x1 + x2, u1 + u2);
    Vector rhs = linear_drift(m, x1, u1) + linear_drift(m, x2, u2);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + lhs.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("check_lipschitz on the manipulator") {
  auto m = manipulator_model();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto r = check_lipschitz(m, 100000, 10.0, seed);
    CHECK(r.pass);
    CHECK(r.max_ratio <= 0.333 + 1e-9);
    CHECK(r.max_ratio > 0.0);
  }
}

TEST_CASE("check_lipschitz detects an understated constant") {
  auto di = double_integrator();
  NonlinearModel m(di, Matrix::Identity(2, 2), linear_nonlinearity(2.0 * Matrix::Identity(2, 2)), 1.0);
  auto r = check_lipschitz(m, 1000, 10.0, 1);
  CHECK_FALSE(r.pass);
  CHECK(r.max_ratio == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("check_lipschitz on a constant map") {
  auto di = double_integrator();
  NonlinearModel m(di, Matrix::Identity(2, 2), [](const Vector&) { return Eigen::Vector2d(1, -3); },
                   0.5);
  auto r = check_lipschitz(m, 1000, 10.0, 1);
  CHECK(r.pass);
  CHECK(r.max_ratio == 0.0);
}
