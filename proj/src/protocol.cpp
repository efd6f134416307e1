#include "adcons/protocol.hpp"

#include <stdexcept>

namespace adcons {

namespace {

void check_states(const Topology& t, const Matrix& states, Eigen::Index n) {
  if (states.rows() != static_cast<Eigen::Index>(t.n_agents()) || states.cols() != n) {
    throw std::invalid_argument("states must be N x n");
  }
}

void check_coupling(const CouplingState& cs, const Topology& t) {
  const auto n = static_cast<Eigen::Index>(t.n_agents());
  if (cs.c.rows() != n || cs.c.cols() != n || cs.kappa.rows() != n || cs.kappa.cols() != n) {
    throw std::invalid_argument("coupling state must be N x N");
  }
}

void check_leader(const LeaderCoupling& lc, const Topology& t, Eigen::Index n) {
  const auto agents = static_cast<Eigen::Index>(t.n_agents());
  if (lc.d.size() != agents || lc.c_leader.size() != agents || lc.kappa_leader.size() != agents ||
      lc.leader_state.size() != n) {
    throw std::invalid_argument("leader coupling has the wrong dimensions");
  }
}

// Row i: sum_j w_ij a_ij (x_i - x_j).
template <class Weight>
Matrix weighted_disagreement(const Topology& t, const Matrix& states, Weight weight) {
  Matrix out = Matrix::Zero(states.rows(), states.cols());
  for (const Edge& e : t.edges()) {
    const auto i = static_cast<Eigen::Index>(e.i);
    const auto j = static_cast<Eigen::Index>(e.j);
    const double w = weight(i, j);
    out.row(i) += w * (states.row(i) - states.row(j));
    out.row(j) += w * (states.row(j) - states.row(i));
  }
  return out;
}

}  // namespace

CouplingState CouplingState::uniform(std::size_t n_agents, double c0, double kappa) {
  const auto n = static_cast<Eigen::Index>(n_agents);
  return {Matrix::Constant(n, n, c0), Matrix::Constant(n, n, kappa)};
}

Matrix static_control(const Matrix& k, double c, const Topology& t, const Matrix& states) {
  check_states(t, states, k.cols());
  return c * weighted_disagreement(t, states, [](Eigen::Index, Eigen::Index) { return 1.0; }) *
         k.transpose();
}

Matrix adaptive_control(const Matrix& f, const CouplingState& cs, const Topology& t,
                        const Matrix& states) {
  check_states(t, states, f.cols());
  check_coupling(cs, t);
  return weighted_disagreement(t, states, [&](Eigen::Index i, Eigen::Index j) { return cs.c(i, j); }) *
         f.transpose();
}

Matrix adaptive_weight_rates(const Matrix& gamma, const CouplingState& cs, const Topology& t,
                             const Matrix& states) {
  check_states(t, states, gamma.rows());
  check_coupling(cs, t);
  if (gamma.cols() != gamma.rows()) throw std::invalid_argument("Gamma must be square");
  const auto n = static_cast<Eigen::Index>(t.n_agents());
  Matrix rates = Matrix::Zero(n, n);
  for (const Edge& e : t.edges()) {
    const auto i = static_cast<Eigen::Index>(e.i);
    const auto j = static_cast<Eigen::Index>(e.j);
    const Vector diff = (states.row(i) - states.row(j)).transpose();
    const double r = cs.kappa(i, j) * diff.dot(gamma * diff);
    rates(i, j) = r;
    rates(j, i) = r;
  }
  return rates;
}

Matrix leader_control(const Matrix& f, const CouplingState& cs, const LeaderCoupling& lc,
                      const Topology& t, const Matrix& states) {
  check_states(t, states, f.cols());
  check_coupling(cs, t);
  check_leader(lc, t, f.cols());
  Matrix z = weighted_disagreement(t, states, [&](Eigen::Index i, Eigen::Index j) { return cs.c(i, j); });
  for (Eigen::Index i = 0; i < states.rows(); ++i) {
    if (lc.d(i) != 0.0) {
      z.row(i) += lc.c_leader(i) * lc.d(i) * (states.row(i) - lc.leader_state.transpose());
    }
  }
  return z * f.transpose();
}

LeaderRates leader_weight_rates(const Matrix& gamma, const CouplingState& cs,
                                const LeaderCoupling& lc, const Topology& t, const Matrix& states) {
  check_leader(lc, t, gamma.rows());
  LeaderRates out{adaptive_weight_rates(gamma, cs, t, states), Vector::Zero(states.rows())};
  for (Eigen::Index i = 0; i < states.rows(); ++i) {
    if (lc.d(i) == 0.0) continue;
    const Vector diff = states.row(i).transpose() - lc.leader_state;
    out.leader(i) = lc.kappa_leader(i) * lc.d(i) * diff.dot(gamma * diff);
  }
  return out;
}

}  // namespace adcons
