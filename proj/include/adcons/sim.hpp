#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adcons/dynamics.hpp"
#include "adcons/graph.hpp"
#include "adcons/protocol.hpp"
#include "adcons/synthesis.hpp"

namespace adcons {

struct SimConfig {
  double dt = 1e-3;
  double t_final = 20.0;
  std::uint64_t seed = 0;
  double init_state_scale = 1.0;
  double init_coupling_low = 0.0;
  double init_coupling_high = 1.0;
  int record_stride = 1;
  double kappa = 1.0;  // kappa_ij on every edge unless edge_kappa is given

  // Optional overrides of the seeded draws.
  std::optional<Matrix> initial_states;     // N x n
  std::optional<Vector> initial_couplings;  // one per edge, Topology::edges() order
  std::optional<Vector> edge_kappa;         // one per edge

  /// Throws ConfigError on dt <= 0, t_final < dt, an inverted coupling range,
  /// a non-positive kappa, or record_stride < 1.
  void validate() const;
};

struct Trajectory {
  std::size_t n_agents = 0;
  Eigen::Index state_dim = 0;
  std::vector<Edge> edges;
  bool has_leader = false;

  std::vector<double> times;
  std::vector<Matrix> states;            // N x n per sample
  std::vector<Vector> couplings;         // one weight per edge per sample
  std::vector<Vector> leader_couplings;  // c_i per sample (leader runs)
  std::vector<Vector> leader_states;     // x_0 per sample (leader runs)
  std::vector<Vector> tracking_errors;   // ||x_i - x_0|| per sample (leader runs)
  /// max_i ||x_i - mean||, or max_i ||x_i - x_0|| for leader runs.
  std::vector<double> consensus_error;
  /// V1 with alpha = 1/lambda_2; filled for linear adaptive runs only.
  std::vector<double> lyapunov;

  std::vector<std::string> warnings;

  std::size_t size() const { return times.size(); }
};

struct ConsensusVerdict {
  bool achieved = false;
  double final_error = 0.0;
  double error_threshold = 0.0;
  /// Largest change of any coupling weight over the final 10% of the horizon.
  double weight_drift = 0.0;
};

Trajectory simulate_adaptive(const LinearModel& model, const ConsensusGain& gain, const Topology& t,
                             const SimConfig& cfg);
Trajectory simulate_adaptive(const NonlinearModel& model, const LipschitzGain& gain,
                             const Topology& t, const SimConfig& cfg);

/// Static protocol u_i = c K sum_j a_ij (x_i - x_j); no coupling channel.
Trajectory simulate_static(const LinearModel& model, const Matrix& k, double c, const Topology& t,
                           const SimConfig& cfg);

/// Leader-follower protocol; the leader runs open loop (u_0 = 0). Empty
/// lc.leader_state / lc.c_leader are drawn from the seeded generator, empty
/// lc.kappa_leader defaults to 1. Throws ConfigError when no d_i is positive.
Trajectory simulate_leader(const LinearModel& model, const ConsensusGain& gain, const Topology& t,
                           const LeaderCoupling& lc, const SimConfig& cfg);
Trajectory simulate_leader(const NonlinearModel& model, const LipschitzGain& gain,
                           const Topology& t, const LeaderCoupling& lc, const SimConfig& cfg);

/// max_i ||x_i - mean_j x_j||_2 for N x n states.
double consensus_error(const Matrix& states);

/// sum_i e_i^T P^{-1} e_i + sum over ordered adjacent pairs of (c_ij - alpha)^2 / (2 kappa_ij).
/// `couplings` and `kappa` are per edge. Throws NumericalError for singular P.
double lyapunov_v1(const Matrix& states, const Topology& t, const Vector& couplings,
                   const Matrix& p, double alpha, const Vector& kappa);

ConsensusVerdict verdict(const Trajectory& traj, double error_threshold);

}  // namespace adcons
