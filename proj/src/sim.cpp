#include "adcons/sim.hpp"

#include <cmath>
#include <sstream>

#include "adcons/errors.hpp"
#include "adcons/random.hpp"

namespace adcons {

namespace {

enum class Protocol { Static, Adaptive, Leader };

// Agent model seen by the integrator: A x + B u (+ D1 f(x)).
struct AgentDynamics {
  const Matrix* a;
  const Matrix* b;
  const Matrix* d1 = nullptr;
  const Nonlinearity* f = nullptr;

  Vector f_of(const Vector& x) const { return (*f)(x); }
};

AgentDynamics dynamics_of(const LinearModel& m) { return {&m.A, &m.B}; }

AgentDynamics dynamics_of(const NonlinearModel& m) {
  return {&m.linear.A, &m.linear.B, &m.D1, &m.f};
}

// Stacked state layout: [r | e_1 .. e_N | c_e (one per edge) | c_i (leader)].
//
// Agents are carried as offsets e_i = x_i - r from a reference r: the agent
// mean for leaderless runs, the leader state x_0 otherwise. Relative states
// then never come from subtracting large absolute coordinates, so the
// disagreement stays resolvable while the common motion grows under an
// unstable A.
class ClosedLoop {
 public:
  ClosedLoop(AgentDynamics dyn, Protocol protocol, const Topology& topo, Matrix feedback,
             Matrix gamma, Vector edge_kappa, double static_c = 0.0, Vector pin = {},
             Vector leader_kappa = {})
      : dyn_(dyn),
        protocol_(protocol),
        topo_(topo),
        feedback_(std::move(feedback)),
        gamma_(std::move(gamma)),
        edge_kappa_(std::move(edge_kappa)),
        static_c_(static_c),
        pin_(std::move(pin)),
        leader_kappa_(std::move(leader_kappa)),
        agents_(static_cast<Eigen::Index>(topo.n_agents())),
        n_(dyn.a->rows()),
        edges_(static_cast<Eigen::Index>(topo.n_edges())),
        acc_(agents_ * n_),
        u_(agents_ * dyn.b->cols()),
        diff_(n_) {}

  Eigen::Index reference_offset() const { return 0; }
  Eigen::Index agent_offset() const { return n_; }
  Eigen::Index edge_offset() const { return n_ + agents_ * n_; }
  Eigen::Index leader_weight_offset() const { return edge_offset() + edges_; }

  Eigen::Index size() const {
    Eigen::Index s = n_ + agents_ * n_;
    if (protocol_ != Protocol::Static) s += edges_;
    if (protocol_ == Protocol::Leader) s += agents_;
    return s;
  }

  void derivative(const Vector& z, Vector& dz) {
    dz.setZero(z.size());
    acc_.setZero();
    const bool adaptive = protocol_ != Protocol::Static;
    const bool leader = protocol_ == Protocol::Leader;
    const Eigen::Index p = dyn_.b->cols();
    const auto& edges = topo_.edges();
    for (Eigen::Index k = 0; k < edges_; ++k) {
      const auto i = static_cast<Eigen::Index>(edges[static_cast<std::size_t>(k)].i);
      const auto j = static_cast<Eigen::Index>(edges[static_cast<std::size_t>(k)].j);
      diff_ = offset(z, i) - offset(z, j);
      const double w = adaptive ? z(edge_offset() + k) : 1.0;
      acc_.segment(i * n_, n_) += w * diff_;
      acc_.segment(j * n_, n_) -= w * diff_;
      if (adaptive) dz(edge_offset() + k) = edge_kappa_(k) * diff_.dot(gamma_ * diff_);
    }
    if (leader) {
      for (Eigen::Index i = 0; i < agents_; ++i) {
        if (pin_(i) == 0.0) continue;
        diff_ = offset(z, i);
        acc_.segment(i * n_, n_) += z(leader_weight_offset() + i) * pin_(i) * diff_;
        dz(leader_weight_offset() + i) = leader_kappa_(i) * pin_(i) * diff_.dot(gamma_ * diff_);
      }
    }
    const double gain_scale = protocol_ == Protocol::Static ? static_c_ : 1.0;
    Vector u_mean = Vector::Zero(p);
    for (Eigen::Index i = 0; i < agents_; ++i) {
      u_.segment(i * p, p).noalias() = gain_scale * (feedback_ * acc_.segment(i * n_, n_));
      u_mean += u_.segment(i * p, p);
    }
    u_mean /= static_cast<double>(agents_);

    const auto r = z.segment(reference_offset(), n_);
    auto dr = dz.segment(reference_offset(), n_);
    dr.noalias() = (*dyn_.a) * r;
    // The leader runs open loop; the mean moves with the mean input.
    if (!leader) dr.noalias() += (*dyn_.b) * u_mean;
    Vector f_ref;
    if (dyn_.d1) {
      if (leader) {
        f_ref = dyn_.f_of(r);
      } else {
        f_ref = Vector::Zero(dyn_.d1->cols());
        for (Eigen::Index i = 0; i < agents_; ++i) f_ref += dyn_.f_of(r + offset(z, i));
        f_ref /= static_cast<double>(agents_);
      }
      dr.noalias() += (*dyn_.d1) * f_ref;
    }
    for (Eigen::Index i = 0; i < agents_; ++i) {
      auto de = dz.segment(agent_offset() + i * n_, n_);
      de.noalias() = (*dyn_.a) * offset(z, i);
      if (leader) {
        de.noalias() += (*dyn_.b) * u_.segment(i * p, p);
      } else {
        de.noalias() += (*dyn_.b) * (u_.segment(i * p, p) - u_mean);
      }
      if (dyn_.d1) de.noalias() += (*dyn_.d1) * (dyn_.f_of(r + offset(z, i)) - f_ref);
    }
  }

  /// Moves the offset mean into the reference (leaderless runs only); x_i is unchanged.
  void recentre(Vector& z) const {
    if (protocol_ == Protocol::Leader) return;
    Vector mean = Vector::Zero(n_);
    for (Eigen::Index i = 0; i < agents_; ++i) mean += offset(z, i);
    mean /= static_cast<double>(agents_);
    z.segment(reference_offset(), n_) += mean;
    for (Eigen::Index i = 0; i < agents_; ++i) z.segment(agent_offset() + i * n_, n_) -= mean;
  }

  Protocol protocol() const { return protocol_; }
  Eigen::Index agents() const { return agents_; }
  Eigen::Index state_dim() const { return n_; }
  Eigen::Index edge_count() const { return edges_; }

 private:
  Eigen::VectorBlock<const Vector> offset(const Vector& z, Eigen::Index i) const {
    return z.segment(agent_offset() + i * n_, n_);
  }

  AgentDynamics dyn_;
  Protocol protocol_;
  const Topology& topo_;
  Matrix feedback_;
  Matrix gamma_;
  Vector edge_kappa_;
  double static_c_;
  Vector pin_;
  Vector leader_kappa_;
  Eigen::Index agents_;
  Eigen::Index n_;
  Eigen::Index edges_;
  Vector acc_;
  Vector u_;
  Vector diff_;
};

struct Diagnostics {
  const Matrix* p = nullptr;  // enables V1
  double alpha = 0.0;
};

Vector edge_kappa_of(const SimConfig& cfg, const Topology& t) {
  if (cfg.edge_kappa) {
    if (cfg.edge_kappa->size() != static_cast<Eigen::Index>(t.n_edges())) {
      throw ConfigError("edge_kappa needs one entry per edge");
    }
    if ((cfg.edge_kappa->array() <= 0.0).any()) throw ConfigError("kappa_ij must be positive");
    return *cfg.edge_kappa;
  }
  return Vector::Constant(static_cast<Eigen::Index>(t.n_edges()), cfg.kappa);
}

Trajectory integrate(ClosedLoop& loop, const Topology& topo, const SimConfig& cfg, Vector z,
                     const Diagnostics& diag, const Vector& edge_kappa) {
  const Eigen::Index agents = loop.agents();
  const Eigen::Index n = loop.state_dim();
  const bool adaptive = loop.protocol() != Protocol::Static;
  const bool leader = loop.protocol() == Protocol::Leader;

  Trajectory traj;
  traj.n_agents = topo.n_agents();
  traj.state_dim = n;
  traj.edges = topo.edges();
  traj.has_leader = leader;

  auto record = [&](double time) {
    const Vector r = z.segment(loop.reference_offset(), n);
    Matrix offsets(agents, n);
    for (Eigen::Index i = 0; i < agents; ++i) {
      offsets.row(i) = z.segment(loop.agent_offset() + i * n, n).transpose();
    }
    Matrix states = offsets.rowwise() + r.transpose();
    traj.times.push_back(time);
    if (adaptive) traj.couplings.push_back(z.segment(loop.edge_offset(), loop.edge_count()));
    if (leader) {
      traj.leader_couplings.push_back(z.segment(loop.leader_weight_offset(), agents));
      traj.leader_states.push_back(r);
      Vector track = offsets.rowwise().norm();
      traj.consensus_error.push_back(agents ? track.maxCoeff() : 0.0);
      traj.tracking_errors.push_back(std::move(track));
    } else {
      traj.consensus_error.push_back(consensus_error(offsets));
    }
    if (diag.p) {
      traj.lyapunov.push_back(
          lyapunov_v1(offsets, topo, traj.couplings.back(), *diag.p, diag.alpha, edge_kappa));
    }
    traj.states.push_back(std::move(states));
  };

  const auto steps = static_cast<long long>(std::llround(cfg.t_final / cfg.dt));
  const double dt = cfg.dt;
  Vector k1(z.size()), k2(z.size()), k3(z.size()), k4(z.size()), tmp(z.size());

  record(0.0);
  for (long long s = 1; s <= steps; ++s) {
    loop.derivative(z, k1);
    tmp = z + (0.5 * dt) * k1;
    loop.derivative(tmp, k2);
    tmp = z + (0.5 * dt) * k2;
    loop.derivative(tmp, k3);
    tmp = z + dt * k3;
    loop.derivative(tmp, k4);
    z += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    loop.recentre(z);

    const double time = static_cast<double>(s) * dt;
    if (!z.allFinite()) {
      std::ostringstream os;
      os << "closed-loop state became non-finite at t = " << time;
      throw DivergenceError(os.str(), time);
    }
    if (s % cfg.record_stride == 0 || s == steps) record(time);
  }
  return traj;
}

Matrix draw_states(Rng& rng, Eigen::Index agents, Eigen::Index n, double scale) {
  Matrix x(agents, n);
  for (Eigen::Index i = 0; i < agents; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) x(i, k) = rng.uniform(-scale, scale);
  }
  return x;
}

Vector draw_couplings(Rng& rng, Eigen::Index count, const SimConfig& cfg) {
  Vector c(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    c(k) = rng.uniform(cfg.init_coupling_low, cfg.init_coupling_high);
  }
  return c;
}

// Writes reference r and offsets x_i - r.
void set_agents(const ClosedLoop& loop, Vector& z, const Matrix& x, const Vector& r) {
  const Eigen::Index n = loop.state_dim();
  z.segment(loop.reference_offset(), n) = r;
  for (Eigen::Index i = 0; i < loop.agents(); ++i) {
    z.segment(loop.agent_offset() + i * n, n) = x.row(i).transpose() - r;
  }
}

// Initial agent states and edge couplings, in draw order: states, then edges.
Vector initial_stack(ClosedLoop& loop, const SimConfig& cfg, Rng& rng, Matrix* states = nullptr) {
  const Eigen::Index agents = loop.agents();
  const Eigen::Index n = loop.state_dim();
  Vector z = Vector::Zero(loop.size());

  Matrix x0 = draw_states(rng, agents, n, cfg.init_state_scale);
  if (cfg.initial_states) {
    if (cfg.initial_states->rows() != agents || cfg.initial_states->cols() != n) {
      throw ConfigError("initial_states must be N x n");
    }
    x0 = *cfg.initial_states;
  }
  set_agents(loop, z, x0, x0.colwise().mean().transpose());
  if (states) *states = x0;

  if (loop.protocol() != Protocol::Static) {
    Vector c0 = draw_couplings(rng, loop.edge_count(), cfg);
    if (cfg.initial_couplings) {
      if (cfg.initial_couplings->size() != loop.edge_count()) {
        throw ConfigError("initial_couplings needs one entry per edge");
      }
      c0 = *cfg.initial_couplings;
    }
    z.segment(loop.edge_offset(), loop.edge_count()) = c0;
  }
  return z;
}

void check_dims(const Matrix& f, const Matrix& gamma, Eigen::Index n, Eigen::Index p) {
  if (f.rows() != p || f.cols() != n) throw std::invalid_argument("F must be p x n");
  if (gamma.rows() != n || gamma.cols() != n) throw std::invalid_argument("Gamma must be n x n");
}

void warn_if_disconnected(const Topology& t, Trajectory& traj) {
  if (!is_connected(t)) {
    traj.warnings.push_back("communication graph is disconnected; consensus is not guaranteed");
  }
}

Trajectory run_adaptive(AgentDynamics dyn, const Matrix& f, const Matrix& gamma, const Topology& t,
                        const SimConfig& cfg, const Matrix* p) {
  cfg.validate();
  check_dims(f, gamma, dyn.a->rows(), dyn.b->cols());
  const Vector kappa = edge_kappa_of(cfg, t);
  ClosedLoop loop(dyn, Protocol::Adaptive, t, f, gamma, kappa);
  Rng rng(cfg.seed);
  Vector z = initial_stack(loop, cfg, rng);

  Diagnostics diag;
  const bool connected = is_connected(t);
  if (p && connected && t.n_agents() > 1) {
    diag.p = p;
    diag.alpha = 1.0 / spectral_info(t).fiedler;
  }
  Trajectory traj = integrate(loop, t, cfg, std::move(z), diag, kappa);
  warn_if_disconnected(t, traj);
  return traj;
}

Trajectory run_leader(AgentDynamics dyn, const Matrix& f, const Matrix& gamma, const Topology& t,
                      const LeaderCoupling& lc, const SimConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = dyn.a->rows();
  check_dims(f, gamma, n, dyn.b->cols());
  const auto agents = static_cast<Eigen::Index>(t.n_agents());
  if (lc.d.size() != agents) throw ConfigError("pin gains d need one entry per follower");
  if ((lc.d.array() < 0.0).any()) throw ConfigError("pin gains d_i must be nonnegative");
  if (!(lc.d.array() > 0.0).any()) {
    throw ConfigError(
        "leader-follower tracking requires at least one follower with access to the leader's "
        "state (some d_i > 0)");
  }
  Vector leader_kappa = lc.kappa_leader.size() ? lc.kappa_leader : Vector::Ones(agents);
  if (leader_kappa.size() != agents || (leader_kappa.array() <= 0.0).any()) {
    throw ConfigError("kappa_i must be positive, one per follower");
  }

  const Vector kappa = edge_kappa_of(cfg, t);
  ClosedLoop loop(dyn, Protocol::Leader, t, f, gamma, kappa, 0.0, lc.d, leader_kappa);
  Rng rng(cfg.seed);
  Matrix x;
  Vector z = initial_stack(loop, cfg, rng, &x);

  Vector x0 = draw_states(rng, 1, n, cfg.init_state_scale).row(0).transpose();
  if (lc.leader_state.size()) {
    if (lc.leader_state.size() != n) throw ConfigError("leader_state must have n entries");
    x0 = lc.leader_state;
  }
  Vector c_leader = draw_couplings(rng, agents, cfg);
  if (lc.c_leader.size()) {
    if (lc.c_leader.size() != agents) throw ConfigError("c_leader needs one entry per follower");
    c_leader = lc.c_leader;
  }
  z.segment(loop.leader_weight_offset(), agents) = c_leader;
  set_agents(loop, z, x, x0);

  Trajectory traj = integrate(loop, t, cfg, std::move(z), {}, kappa);
  warn_if_disconnected(t, traj);
  return traj;
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(t_final >= dt) || !std::isfinite(t_final)) throw ConfigError("t_final must be >= dt");
  if (!(init_coupling_low <= init_coupling_high)) {
    throw ConfigError("init_coupling_low must not exceed init_coupling_high");
  }
  if (!(init_state_scale >= 0.0)) throw ConfigError("init_state_scale must be nonnegative");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (record_stride < 1) throw ConfigError("record_stride must be >= 1");
}

Trajectory simulate_adaptive(const LinearModel& model, const ConsensusGain& gain, const Topology& t,
                             const SimConfig& cfg) {
  return run_adaptive(dynamics_of(model), gain.F, gain.Gamma, t, cfg, &gain.P);
}

Trajectory simulate_adaptive(const NonlinearModel& model, const LipschitzGain& gain,
                             const Topology& t, const SimConfig& cfg) {
  return run_adaptive(dynamics_of(model), gain.F, gain.Gamma, t, cfg, nullptr);
}

Trajectory simulate_static(const LinearModel& model, const Matrix& k, double c, const Topology& t,
                           const SimConfig& cfg) {
  cfg.validate();
  if (k.rows() != model.p() || k.cols() != model.n()) throw std::invalid_argument("K must be p x n");
  if (!(c >= 0.0)) throw ConfigError("static coupling c must be nonnegative");
  ClosedLoop loop(dynamics_of(model), Protocol::Static, t, k, Matrix::Zero(model.n(), model.n()),
                  Vector(), c);
  Rng rng(cfg.seed);
  Vector z = initial_stack(loop, cfg, rng);
  Trajectory traj = integrate(loop, t, cfg, std::move(z), {}, Vector());
  warn_if_disconnected(t, traj);
  return traj;
}

Trajectory simulate_leader(const LinearModel& model, const ConsensusGain& gain, const Topology& t,
                           const LeaderCoupling& lc, const SimConfig& cfg) {
  return run_leader(dynamics_of(model), gain.F, gain.Gamma, t, lc, cfg);
}

Trajectory simulate_leader(const NonlinearModel& model, const LipschitzGain& gain,
                           const Topology& t, const LeaderCoupling& lc, const SimConfig& cfg) {
  return run_leader(dynamics_of(model), gain.F, gain.Gamma, t, lc, cfg);
}

double consensus_error(const Matrix& states) {
  if (states.rows() == 0) return 0.0;
  const Eigen::RowVectorXd mean = states.colwise().mean();
  return (states.rowwise() - mean).rowwise().norm().maxCoeff();
}

double lyapunov_v1(const Matrix& states, const Topology& t, const Vector& couplings,
                   const Matrix& p, double alpha, const Vector& kappa) {
  const auto edges = static_cast<Eigen::Index>(t.n_edges());
  if (couplings.size() != edges || kappa.size() != edges) {
    throw std::invalid_argument("lyapunov_v1: couplings and kappa need one entry per edge");
  }
  Eigen::LLT<Matrix> llt(symmetric_part(p));
  if (llt.info() != Eigen::Success) throw NumericalError("lyapunov_v1: P is not positive definite");

  const Eigen::RowVectorXd mean = states.colwise().mean();
  const Matrix e = (states.rowwise() - mean).transpose();  // n x N
  double v = (e.array() * llt.solve(e).array()).sum();
  for (Eigen::Index k = 0; k < edges; ++k) {
    const double dc = couplings(k) - alpha;
    v += dc * dc / kappa(k);  // (i,j) and (j,i) each contribute dc^2 / (2 kappa)
  }
  return v;
}

ConsensusVerdict verdict(const Trajectory& traj, double error_threshold) {
  if (traj.times.empty()) throw std::invalid_argument("verdict: empty trajectory");
  ConsensusVerdict out;
  out.final_error = traj.consensus_error.back();
  out.error_threshold = error_threshold;
  out.achieved = out.final_error <= error_threshold;

  const double t_end = traj.times.back();
  std::size_t start = traj.times.size() - 1;
  while (start > 0 && traj.times[start - 1] >= 0.9 * t_end) --start;
  auto drift = [&](const std::vector<Vector>& series) {
    if (series.empty() || series.back().size() == 0) return 0.0;
    return (series.back() - series[start]).cwiseAbs().maxCoeff();
  };
  out.weight_drift = std::max(drift(traj.couplings), drift(traj.leader_couplings));
  return out;
}

}  // namespace adcons
