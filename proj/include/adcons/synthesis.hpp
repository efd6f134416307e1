#pragma once

#include <complex>
#include <vector>

#include "adcons/dynamics.hpp"
#include "adcons/graph.hpp"
#include "adcons/linalg.hpp"

namespace adcons {

struct SolverOptions {
  double tol_pd = 1e-8;          // required min eigenvalue of P / Q
  double tol_neg = 1e-8;         // required -max eigenvalue of the LMI
  int max_iterations = 10000;    // alternating-projection budget
  double care_tolerance = 1e-10; // Riccati residual target (max-abs)

  /// Throws std::invalid_argument unless every tolerance and the budget are positive.
  void validate() const;
};

/// Gains for the linear adaptive protocol: F = -B^T P^{-1}, Gamma = F^T F.
struct ConsensusGain {
  Matrix P;
  Matrix F;
  Matrix Gamma;
};

/// Gains for the Lipschitz adaptive protocol: F = -B^T Q^{-1}, Gamma = F^T F.
struct LipschitzGain {
  Matrix Q;
  double tau = 0.0;
  Vector T;  // diagonal of the scaling matrix
  Matrix F;
  Matrix Gamma;
  int iterations = 0;  // alternating-projection steps used
};

struct ConsensusMargins {
  double lmi_max_eig = 0.0;     // max eig of AP + PA^T - 2BB^T
  double p_min_eig = 0.0;
  double gamma_residual = 0.0;  // ||Gamma - F^T F||_max
};

struct LipschitzMargins {
  double block_max_eig = 0.0;
  double q_min_eig = 0.0;
  double tau = 0.0;
  double t_min = 0.0;
  double gamma_residual = 0.0;
};

struct StabilizabilityReport {
  bool stabilizable = true;
  /// Eigenvalues of A with nonnegative real part that fail the PBH rank test.
  std::vector<std::complex<double>> uncontrollable_modes;
};

/// PBH test: rank [A - lambda I, B] = n for every eigenvalue with Re >= 0.
StabilizabilityReport check_stabilizable(const Matrix& a, const Matrix& b);

struct CareSolution {
  Matrix W;
  double residual = 0.0;  // ||A^T W + W A - W B B^T W + I||_max
  int refinement_steps = 0;
};

/// Stabilising solution of A^T W + W A - W B B^T W + I = 0.
///
/// The stable invariant subspace of the Hamiltonian [[A, -BB^T], [-I, -A^T]]
/// is read off an ordered complex Schur form, then Newton-Kleinman steps
/// polish W until the residual meets opts.care_tolerance (relative to
/// max(1, ||W||_max)) or stops improving. Throws NumericalError when the
/// Hamiltonian has imaginary-axis eigenvalues or the residual stays large.
CareSolution solve_care(const Matrix& a, const Matrix& b, const SolverOptions& opts = {});

Matrix care_residual(const Matrix& a, const Matrix& b, const Matrix& w);

/// Linear-case gains via the Riccati route; P = W^{-1}.
/// Throws SynthesisError when (A, B) is not stabilizable.
ConsensusGain solve_linear_gain(const LinearModel& model, const SolverOptions& opts = {});

/// [[A Q + Q A^T - tau B B^T + gamma^2 D1 T D1^T, Q], [Q, -T]].
Matrix lipschitz_block(const NonlinearModel& model, const Matrix& q, double tau, const Vector& t);

/// Feasibility of the Lipschitz block LMI by alternating projections.
/// Throws SynthesisError with the best margin reached when no strictly
/// feasible point is found within opts.max_iterations.
LipschitzGain solve_lipschitz_gain(const NonlinearModel& model, const SolverOptions& opts = {});

ConsensusMargins verify_consensus_gain(const LinearModel& model, const ConsensusGain& gain);
LipschitzMargins verify_lipschitz_gain(const NonlinearModel& model, const LipschitzGain& gain);

/// ||Gamma - F^T F||_max.
double gamma_consistency(const Matrix& f, const Matrix& gamma);

/// 1 / lambda_2: the smallest coupling for the static protocol.
/// Throws std::domain_error for a disconnected graph.
double static_coupling_bound(const SpectralInfo& spectrum);

}  // namespace adcons
