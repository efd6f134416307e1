#include "adcons/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "adcons/errors.hpp"

namespace adcons {

namespace {

using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

// Swaps the adjacent 1x1 diagonal blocks k, k+1 of an upper-triangular T,
// updating the unitary factor U so that U T U^H is unchanged.
void swap_schur_pair(CMatrix& t, CMatrix& u, Eigen::Index k) {
  const Complex t11 = t(k, k);
  const Complex t22 = t(k + 1, k + 1);
  Eigen::Vector2cd v(t(k, k + 1), t22 - t11);
  const double norm = v.norm();
  if (norm == 0.0) return;
  v /= norm;
  // Columns: eigenvector of the 2x2 block for t22, and its orthogonal complement.
  Eigen::Matrix2cd g;
  g << v(0), -std::conj(v(1)), v(1), std::conj(v(0));
  t.middleRows(k, 2) = g.adjoint() * t.middleRows(k, 2);
  t.middleCols(k, 2) = t.middleCols(k, 2) * g;
  u.middleCols(k, 2) = u.middleCols(k, 2) * g;
  t(k + 1, k) = 0.0;
  t(k, k) = t22;
  t(k + 1, k + 1) = t11;
}

// Moves all eigenvalues with negative real part to the leading block.
Eigen::Index order_stable_first(CMatrix& t, CMatrix& u) {
  const Eigen::Index size = t.rows();
  Eigen::Index placed = 0;
  for (Eigen::Index k = 0; k < size; ++k) {
    if (t(k, k).real() < 0.0) {
      for (Eigen::Index j = k; j > placed; --j) swap_schur_pair(t, u, j - 1);
      ++placed;
    }
  }
  return placed;
}

Matrix symmetric_inverse(const Matrix& m) {
  const Eigen::Index n = m.rows();
  Matrix inv = Eigen::PartialPivLU<Matrix>(m).solve(Matrix::Identity(n, n));
  return symmetric_part(inv);
}

std::string modes_text(const std::vector<Complex>& modes) {
  std::ostringstream os;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (k) os << ", ";
    os << modes[k].real();
    if (modes[k].imag() != 0.0) os << (modes[k].imag() > 0 ? "+" : "") << modes[k].imag() << "i";
  }
  return os.str();
}

// Parameter layout for the Lipschitz LMI: upper triangle of Q (row-major),
// then tau, then diag(T).
struct LmiParams {
  Eigen::Index n;

  Eigen::Index size() const { return n * (n + 1) / 2 + 1 + n; }

  Vector pack(const Matrix& q, double tau, const Vector& t) const {
    Vector theta(size());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) theta(k++) = q(i, j);
    }
    theta(k++) = tau;
    theta.tail(n) = t;
    return theta;
  }

  Matrix q(const Vector& theta) const {
    Matrix out(n, n);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        out(i, j) = theta(k);
        out(j, i) = theta(k);
        ++k;
      }
    }
    return out;
  }

  double tau(const Vector& theta) const { return theta(n * (n + 1) / 2); }
  Vector t(const Vector& theta) const { return theta.tail(n); }
};

// blockdiag(M(Q, tau, T), -Q, -tau): negative definite iff the LMI holds with
// Q > 0 and tau > 0.
Matrix augmented_block(const NonlinearModel& model, const LmiParams& layout, const Vector& theta) {
  const Eigen::Index n = layout.n;
  const Matrix q = layout.q(theta);
  const double tau = layout.tau(theta);
  Matrix out = Matrix::Zero(3 * n + 1, 3 * n + 1);
  out.topLeftCorner(2 * n, 2 * n) = lipschitz_block(model, q, tau, layout.t(theta));
  out.block(2 * n, 2 * n, n, n) = -q;
  out(3 * n, 3 * n) = -tau;
  return out;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(tol_pd > 0.0) || !(tol_neg > 0.0) || !(care_tolerance > 0.0) || max_iterations < 1) {
    throw std::invalid_argument("SolverOptions: tolerances and max_iterations must be positive");
  }
}

StabilizabilityReport check_stabilizable(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows();
  const double a_norm = spectral_norm(a);
  const double rank_tol = 1e-9 * std::max({a_norm, spectral_norm(b), 1.0});
  const double unstable_tol = -1e-9 * std::max(a_norm, 1.0);

  StabilizabilityReport report;
  const Eigen::VectorXcd eig = Eigen::EigenSolver<Matrix>(a, false).eigenvalues();
  for (Eigen::Index k = 0; k < eig.size(); ++k) {
    const Complex lambda = eig(k);
    if (lambda.real() < unstable_tol) continue;
    CMatrix pbh(n, n + b.cols());
    pbh.leftCols(n) = a.cast<Complex>() - lambda * CMatrix::Identity(n, n);
    pbh.rightCols(b.cols()) = b.cast<Complex>();
    const Eigen::VectorXd sv = Eigen::JacobiSVD<CMatrix>(pbh).singularValues();
    const auto rank = (sv.array() > rank_tol).count();
    if (rank < n) {
      report.stabilizable = false;
      report.uncontrollable_modes.push_back(lambda);
    }
  }
  return report;
}

Matrix care_residual(const Matrix& a, const Matrix& b, const Matrix& w) {
  const Eigen::Index n = a.rows();
  return a.transpose() * w + w * a - w * b * b.transpose() * w + Matrix::Identity(n, n);
}

CareSolution solve_care(const Matrix& a, const Matrix& b, const SolverOptions& opts) {
  opts.validate();
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n) throw std::invalid_argument("solve_care: dimension mismatch");

  Matrix h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = a;
  h.topRightCorner(n, n) = -b * b.transpose();
  h.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  h.bottomRightCorner(n, n) = -a.transpose();

  Eigen::ComplexSchur<CMatrix> schur(h.cast<Complex>());
  if (schur.info() != Eigen::Success) throw NumericalError("solve_care: Schur decomposition failed");
  CMatrix t = schur.matrixT();
  CMatrix u = schur.matrixU();

  const double h_scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < 2 * n; ++k) {
    if (std::abs(t(k, k).real()) <= 1e-10 * h_scale) {
      throw NumericalError("solve_care: Hamiltonian has eigenvalues on the imaginary axis");
    }
  }
  if (order_stable_first(t, u) != n) {
    throw NumericalError("solve_care: stable invariant subspace has the wrong dimension");
  }

  const CMatrix x1 = u.topLeftCorner(n, n);
  const CMatrix x2 = u.bottomLeftCorner(n, n);
  // W X1 = X2  <=>  X1^T W^T = X2^T
  Eigen::PartialPivLU<CMatrix> lu(x1.transpose());
  const CMatrix w_complex = lu.solve(x2.transpose()).transpose();
  CareSolution sol;
  sol.W = symmetric_part(w_complex.real());
  sol.residual = max_abs(care_residual(a, b, sol.W));

  // Newton-Kleinman: (A - B K)^T W+ + W+ (A - B K) + I + K^T K = 0, K = B^T W.
  const Matrix eye = Matrix::Identity(n, n);
  for (int step = 0; step < 50; ++step) {
    if (sol.residual <= opts.care_tolerance * std::max(1.0, max_abs(sol.W))) break;
    const Matrix k = b.transpose() * sol.W;
    Matrix next;
    try {
      next = symmetric_part(solve_lyapunov(a - b * k, eye + k.transpose() * k));
    } catch (const NumericalError&) {
      break;
    }
    const double res = max_abs(care_residual(a, b, next));
    if (!(res < sol.residual)) break;
    sol.W = next;
    sol.residual = res;
    sol.refinement_steps = step + 1;
  }

  if (!std::isfinite(sol.residual) || sol.residual > 1e-6 * std::max(1.0, max_abs(sol.W))) {
    throw NumericalError("solve_care: Riccati residual " + std::to_string(sol.residual) +
                         " did not converge");
  }
  return sol;
}

ConsensusGain solve_linear_gain(const LinearModel& model, const SolverOptions& opts) {
  opts.validate();
  const auto stab = check_stabilizable(model.A, model.B);
  if (!stab.stabilizable) {
    throw SynthesisError(
        "(A, B) is not stabilizable (PBH rank test fails for eigenvalue(s) " +
        modes_text(stab.uncontrollable_modes) +
        "); a P > 0 solving AP + PA^T - 2BB^T < 0 exists if and only if (A, B) is stabilizable");
  }
  const CareSolution care = solve_care(model.A, model.B, opts);

  ConsensusGain gain;
  gain.P = symmetric_inverse(care.W);
  gain.F = -model.B.transpose() * symmetric_inverse(gain.P);
  gain.Gamma = gain.F.transpose() * gain.F;

  const ConsensusMargins margins = verify_consensus_gain(model, gain);
  if (margins.p_min_eig < opts.tol_pd || margins.lmi_max_eig > -opts.tol_neg) {
    throw SynthesisError("Riccati solution fails the LMI margin check (max eig " +
                             std::to_string(margins.lmi_max_eig) + ", min eig(P) " +
                             std::to_string(margins.p_min_eig) + ")",
                         margins.lmi_max_eig);
  }
  return gain;
}

Matrix lipschitz_block(const NonlinearModel& model, const Matrix& q, double tau, const Vector& t) {
  const Eigen::Index n = model.n();
  if (q.rows() != n || q.cols() != n || t.size() != model.m() || model.m() != n) {
    throw std::invalid_argument("lipschitz_block: dimension mismatch (requires D1 with n columns)");
  }
  const Matrix& a = model.linear.A;
  const Matrix& b = model.linear.B;
  const Matrix& d = model.D1;
  Matrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = a * q + q * a.transpose() - tau * b * b.transpose() +
                            model.gamma * model.gamma * d * t.asDiagonal() * d.transpose();
  out.topRightCorner(n, n) = q;
  out.bottomLeftCorner(n, n) = q;
  out.bottomRightCorner(n, n) = -Matrix(t.asDiagonal());
  return out;
}

LipschitzGain solve_lipschitz_gain(const NonlinearModel& model, const SolverOptions& opts) {
  opts.validate();
  const Eigen::Index n = model.n();
  if (model.m() != n) {
    throw SynthesisError("Lipschitz LMI needs D1 with n columns (got " +
                         std::to_string(model.m()) + ", n = " + std::to_string(n) + ")");
  }
  const LmiParams layout{n};
  const Matrix& a = model.linear.A;
  const Matrix& b = model.linear.B;

  // Deterministic start: Q = P from the Riccati route, tau = 2, T = t I with
  // t picked from a fixed ladder around the scale that makes the D1 = 0 block
  // feasible outright.
  Matrix q0 = Matrix::Identity(n, n);
  std::vector<double> t_ladder{1.0};
  if (check_stabilizable(a, b).stabilizable) {
    try {
      const CareSolution care = solve_care(a, b, opts);
      q0 = symmetric_inverse(care.W);
      const Matrix r = symmetric_part(
          q0 * (Matrix::Identity(n, n) + care.W * b * b.transpose() * care.W) * q0);
      Eigen::SelfAdjointEigenSolver<Matrix> es(r);
      const Matrix r_inv_sqrt = es.operatorInverseSqrt();
      const double t_star =
          2.0 * max_symmetric_eigenvalue(r_inv_sqrt * q0 * q0 * r_inv_sqrt);
      for (int k = -6; k <= 2; ++k) t_ladder.push_back(t_star * std::pow(10.0, k));
    } catch (const NumericalError&) {
      q0 = Matrix::Identity(n, n);
    }
  }

  auto max_eig = [](const Matrix& m) {
    return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  };

  Vector theta;
  double best = std::numeric_limits<double>::infinity();
  for (double t_scale : t_ladder) {
    const Vector candidate = layout.pack(q0, 2.0, Vector::Constant(n, t_scale));
    const double margin = max_eig(augmented_block(model, layout, candidate));
    if (margin < best) {
      best = margin;
      theta = candidate;
    }
  }

  // Linear map theta -> vec(augmented block); projection onto its range is a
  // least-squares solve.
  const Eigen::Index dim = 3 * n + 1;
  Matrix basis(dim * dim, layout.size());
  for (Eigen::Index k = 0; k < layout.size(); ++k) {
    const Matrix blk = augmented_block(model, layout, Vector::Unit(layout.size(), k));
    basis.col(k) = Eigen::Map<const Vector>(blk.data(), dim * dim);
  }
  const Eigen::CompleteOrthogonalDecomposition<Matrix> projector(basis);

  double shift = 0.0;
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(augmented_block(model, layout, theta),
                                             Eigen::EigenvaluesOnly);
    shift = 1e-4 * es.eigenvalues().cwiseAbs().maxCoeff();
  }

  int iteration = 0;
  bool feasible = false;
  for (; iteration <= opts.max_iterations; ++iteration) {
    const Matrix x = augmented_block(model, layout, theta);
    Eigen::SelfAdjointEigenSolver<Matrix> es(x);
    const double margin = es.eigenvalues().maxCoeff();
    best = std::min(best, margin);
    const double q_min = Eigen::SelfAdjointEigenSolver<Matrix>(layout.q(theta), Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .minCoeff();
    if (margin <= -opts.tol_neg && q_min >= opts.tol_pd) {
      feasible = true;
      break;
    }
    if (iteration == opts.max_iterations) break;
    const Vector clipped = es.eigenvalues().cwiseMin(-shift);
    const Matrix y = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
    theta = projector.solve(Eigen::Map<const Vector>(y.data(), dim * dim));
  }

  if (!feasible) {
    throw SynthesisError(
        "Lipschitz LMI: no strictly feasible (Q, tau, T) after " +
            std::to_string(opts.max_iterations) + " alternating projections (best max eigenvalue " +
            std::to_string(best) +
            "); the LMI is known to be feasible when the distance to unobservability of (A, B) "
            "exceeds gamma",
        best);
  }

  LipschitzGain gain;
  gain.Q = layout.q(theta);
  gain.tau = layout.tau(theta);
  gain.T = layout.t(theta);
  gain.F = -b.transpose() * symmetric_inverse(gain.Q);
  gain.Gamma = gain.F.transpose() * gain.F;
  gain.iterations = iteration;

  const LipschitzMargins check = verify_lipschitz_gain(model, gain);
  if (check.block_max_eig > -opts.tol_neg || check.q_min_eig < opts.tol_pd || !(check.tau > 0.0) ||
      !(check.t_min > 0.0)) {
    throw SynthesisError("Lipschitz LMI solution failed independent re-verification (max eig " +
                             std::to_string(check.block_max_eig) + ")",
                         check.block_max_eig);
  }
  return gain;
}

ConsensusMargins verify_consensus_gain(const LinearModel& model, const ConsensusGain& gain) {
  const Matrix& a = model.A;
  const Matrix& b = model.B;
  const Matrix& p = gain.P;
  if (p.rows() != model.n() || p.cols() != model.n()) {
    throw std::invalid_argument("verify_consensus_gain: P has the wrong shape");
  }
  ConsensusMargins out;
  out.lmi_max_eig = max_symmetric_eigenvalue(a * p + p * a.transpose() - 2.0 * b * b.transpose());
  out.p_min_eig = min_symmetric_eigenvalue(p);
  out.gamma_residual = gamma_consistency(gain.F, gain.Gamma);
  return out;
}

LipschitzMargins verify_lipschitz_gain(const NonlinearModel& model, const LipschitzGain& gain) {
  LipschitzMargins out;
  out.block_max_eig = max_symmetric_eigenvalue(lipschitz_block(model, gain.Q, gain.tau, gain.T));
  out.q_min_eig = min_symmetric_eigenvalue(gain.Q);
  out.tau = gain.tau;
  out.t_min = gain.T.size() ? gain.T.minCoeff() : 0.0;
  out.gamma_residual = gamma_consistency(gain.F, gain.Gamma);
  return out;
}

double gamma_consistency(const Matrix& f, const Matrix& gamma) {
  if (gamma.rows() != f.cols() || gamma.cols() != f.cols()) {
    throw std::invalid_argument("gamma_consistency: Gamma must be n x n for F p x n");
  }
  return max_abs(gamma - f.transpose() * f);
}

double static_coupling_bound(const SpectralInfo& spectrum) {
  if (!(spectrum.fiedler > 1e-9)) {
    throw std::domain_error("static coupling bound needs a connected graph (lambda_2 = " +
                            std::to_string(spectrum.fiedler) + ")");
  }
  return 1.0 / spectrum.fiedler;
}

}  // namespace adcons
