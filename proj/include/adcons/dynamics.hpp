#pragma once

#include <cstdint>
#include <functional>

#include "adcons/linalg.hpp"

namespace adcons {

/// x' = A x + B u.
struct LinearModel {
  Matrix A;
  Matrix B;

  /// Validates shapes (A square, B with matching rows, n >= 1, p >= 1).
  LinearModel(Matrix a, Matrix b);

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index p() const { return B.cols(); }
};

using Nonlinearity = std::function<Vector(const Vector&)>;

/// x' = A x + D1 f(x) + B u, with f Lipschitz with constant gamma.
struct NonlinearModel {
  LinearModel linear;
  Matrix D1;  // n x m
  Nonlinearity f;
  double gamma;

  NonlinearModel(LinearModel lin, Matrix d1, Nonlinearity fn, double lipschitz);

  Eigen::Index n() const { return linear.n(); }
  Eigen::Index p() const { return linear.p(); }
  Eigen::Index m() const { return D1.cols(); }
};

Vector linear_drift(const LinearModel& model, const Vector& x, const Vector& u);

/// Throws std::invalid_argument on a shape mismatch, including an f that
/// returns a vector whose length is not D1.cols().
Vector nonlinear_drift(const NonlinearModel& model, const Vector& x, const Vector& u);

struct LipschitzReport {
  double max_ratio = 0.0;
  bool pass = true;
};

/// Samples pairs uniformly in the ball of the given radius and reports the
/// largest ||f(x) - f(y)|| / ||x - y||. Passes iff max_ratio <= gamma (1 + 1e-9).
LipschitzReport check_lipschitz(const NonlinearModel& model, int n_samples, double radius,
                                std::uint64_t seed);

/// Single-link manipulator with a flexible joint driven by a DC motor.
/// f(x) = (0, 0, 0, -0.333 sin x3), D1 = I4, gamma = 0.333.
NonlinearModel manipulator_model();

/// f(x) = M * sin(x) (elementwise sine). Lipschitz with constant ||M||_2.
Nonlinearity sine_nonlinearity(Matrix m);

/// f(x) = M * x.
Nonlinearity linear_nonlinearity(Matrix m);

}  // namespace adcons
