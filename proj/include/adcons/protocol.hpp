#pragma once

#include "adcons/graph.hpp"
#include "adcons/linalg.hpp"

namespace adcons {

/// Time-varying edge weights c_ij and adaptation gains kappa_ij, stored densely.
/// Only entries with a_ij = 1 are read.
struct CouplingState {
  Matrix c;
  Matrix kappa;

  /// c_ij = c0 and kappa_ij = kappa on every pair.
  static CouplingState uniform(std::size_t n_agents, double c0, double kappa = 1.0);
};

struct LeaderCoupling {
  Vector d;             // pin gains, d_i > 0 for followers that see the leader
  Vector c_leader;      // c_i
  Vector kappa_leader;  // kappa_i
  Vector leader_state;  // x_0
};

// `states` is N x n with one agent per row; controls come back N x p.

/// u_i = c K sum_j a_ij (x_i - x_j).
Matrix static_control(const Matrix& k, double c, const Topology& t, const Matrix& states);

/// u_i = F sum_j c_ij a_ij (x_i - x_j).
Matrix adaptive_control(const Matrix& f, const CouplingState& cs, const Topology& t,
                        const Matrix& states);

/// c'_ij = kappa_ij a_ij (x_i - x_j)^T Gamma (x_i - x_j); symmetric, zero off the edge set.
Matrix adaptive_weight_rates(const Matrix& gamma, const CouplingState& cs, const Topology& t,
                             const Matrix& states);

/// u_i = F (sum_j c_ij a_ij (x_i - x_j) + c_i d_i (x_i - x_0)).
Matrix leader_control(const Matrix& f, const CouplingState& cs, const LeaderCoupling& lc,
                      const Topology& t, const Matrix& states);

struct LeaderRates {
  Matrix edge;    // N x N
  Vector leader;  // c'_i = kappa_i d_i (x_i - x_0)^T Gamma (x_i - x_0)
};

LeaderRates leader_weight_rates(const Matrix& gamma, const CouplingState& cs,
                                const LeaderCoupling& lc, const Topology& t, const Matrix& states);

}  // namespace adcons
