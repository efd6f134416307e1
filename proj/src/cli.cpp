#include "adcons/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "adcons/csv.hpp"
#include "adcons/errors.hpp"
#include "adcons/gain_io.hpp"
#include "adcons/svg.hpp"
#include "adcons/synthesis.hpp"

namespace adcons {

using nlohmann::json;

namespace {

bool uses_lipschitz_gain(const Scenario& sc) {
  return sc.nonlinear.has_value() &&
         (sc.variant == Variant::AdaptiveNonlinear || sc.variant == Variant::Leader);
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

void print_matrix(std::ostream& out, const char* name, const Matrix& m) {
  out << name << " =\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << "  ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << format_number(m(i, j));
    out << '\n';
  }
}

GainDocument obtain_gain(const Scenario& sc) {
  if (sc.gains_path) {
    GainDocument doc = gain_from_json(read_json(*sc.gains_path));
    const bool lipschitz = std::holds_alternative<LipschitzGain>(doc);
    if (lipschitz != uses_lipschitz_gain(sc)) {
      throw ConfigError("gain document kind does not match the scenario variant");
    }
    const Eigen::Index n = std::visit([](const auto& g) { return g.F.cols(); }, doc);
    const Eigen::Index p = std::visit([](const auto& g) { return g.F.rows(); }, doc);
    if (n != sc.linear.n() || p != sc.linear.p()) {
      throw ConfigError("gain document dimensions do not match the model");
    }
    return doc;
  }
  if (uses_lipschitz_gain(sc)) return solve_lipschitz_gain(*sc.nonlinear);
  return solve_linear_gain(sc.linear);
}

LeaderCoupling leader_coupling(const Scenario& sc) {
  const auto agents = static_cast<Eigen::Index>(sc.topology.n_agents());
  LeaderCoupling lc;
  lc.d = Vector::Zero(agents);
  for (const Pin& p : sc.pins) lc.d(static_cast<Eigen::Index>(p.agent)) = p.d;
  lc.kappa_leader = Vector::Constant(agents, sc.kappa_leader);
  if (sc.leader_state) lc.leader_state = *sc.leader_state;
  return lc;
}

void write_charts(const Scenario& sc, const Trajectory& traj) {
  const Eigen::Index n = traj.state_dim;
  for (Eigen::Index k = 0; k < n; ++k) {
    LineChart chart;
    chart.title = "x_i" + std::to_string(k + 1) + " (" + variant_name(sc.variant) + ")";
    chart.y_label = "x_i" + std::to_string(k + 1);
    chart.x = traj.times;
    for (std::size_t i = 0; i < traj.n_agents; ++i) {
      LineSeries s{"agent " + std::to_string(i + 1), {}};
      s.y.reserve(traj.size());
      for (const Matrix& x : traj.states) s.y.push_back(x(static_cast<Eigen::Index>(i), k));
      chart.series.push_back(std::move(s));
    }
    if (traj.has_leader) {
      LineSeries s{"leader", {}};
      for (const Vector& x0 : traj.leader_states) s.y.push_back(x0(k));
      chart.series.push_back(std::move(s));
    }
    write_svg(sc.output_dir / ("states_x" + std::to_string(k + 1) + ".svg"), chart);
  }
  if (!traj.couplings.empty() || traj.has_leader) {
    LineChart chart;
    chart.title = "coupling weights";
    chart.y_label = "c";
    chart.x = traj.times;
    for (std::size_t e = 0; e < traj.edges.size() && !traj.couplings.empty(); ++e) {
      LineSeries s{"c_" + std::to_string(traj.edges[e].i + 1) + "_" + std::to_string(traj.edges[e].j + 1), {}};
      for (const Vector& c : traj.couplings) s.y.push_back(c(static_cast<Eigen::Index>(e)));
      chart.series.push_back(std::move(s));
    }
    if (traj.has_leader) {
      for (std::size_t i = 0; i < traj.n_agents; ++i) {
        LineSeries s{"c0_" + std::to_string(i + 1), {}};
        for (const Vector& c : traj.leader_couplings) s.y.push_back(c(static_cast<Eigen::Index>(i)));
        chart.series.push_back(std::move(s));
      }
    }
    write_svg(sc.output_dir / "weights.svg", chart);
  }
}

template <class Fn>
int guarded(std::ostream& err, Fn fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TopologyError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SynthesisError& e) {
    err << "synthesis failed: " << e.what() << '\n';
    return kExitSynthesis;
  } catch (const NumericalError& e) {
    err << "synthesis failed: " << e.what() << '\n';
    return kExitSynthesis;
  }
}

}  // namespace

void apply_overrides(Scenario& sc, const CliOverrides& o) {
  if (o.seed) sc.sim.seed = *o.seed;
  if (o.dt) sc.sim.dt = *o.dt;
  if (o.t_final) sc.sim.t_final = *o.t_final;
  if (o.threshold) {
    if (!(*o.threshold > 0.0)) throw ConfigError("--threshold must be positive");
    sc.threshold = *o.threshold;
  }
  if (o.out) sc.output_dir = *o.out;
  if (o.svg) sc.svg = true;
  sc.sim.validate();
}

int run_synth(const Scenario& sc, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::filesystem::create_directories(sc.output_dir);
    json report;
    json doc;
    if (uses_lipschitz_gain(sc)) {
      const LipschitzGain g = solve_lipschitz_gain(*sc.nonlinear);
      const LipschitzMargins m = verify_lipschitz_gain(*sc.nonlinear, g);
      doc = gain_to_json(g, m);
      report = {{"kind", "lipschitz"},
                {"block_max_eig", m.block_max_eig},
                {"q_min_eig", m.q_min_eig},
                {"tau", m.tau},
                {"T", vector_json(g.T)},
                {"gamma_residual", m.gamma_residual},
                {"iterations", g.iterations}};
      out << "Lipschitz LMI feasible after " << g.iterations << " projection steps\n"
          << "  block max eigenvalue: " << format_number(m.block_max_eig) << '\n'
          << "  min eig(Q): " << format_number(m.q_min_eig) << '\n'
          << "  tau: " << format_number(m.tau) << '\n'
          << "  diag(T):";
      for (Eigen::Index k = 0; k < g.T.size(); ++k) out << ' ' << format_number(g.T(k));
      out << "\n  ||Gamma - F^T F||_max: " << format_number(m.gamma_residual) << '\n';
      print_matrix(out, "F", g.F);
      print_matrix(out, "Gamma", g.Gamma);
    } else {
      const ConsensusGain g = solve_linear_gain(sc.linear);
      const ConsensusMargins m = verify_consensus_gain(sc.linear, g);
      doc = gain_to_json(g, m);
      report = {{"kind", "consensus"},
                {"lmi_max_eig", m.lmi_max_eig},
                {"p_min_eig", m.p_min_eig},
                {"gamma_residual", m.gamma_residual}};
      out << "Riccati-based LMI solution verified\n"
          << "  max eig(AP + PA^T - 2BB^T): " << format_number(m.lmi_max_eig) << '\n'
          << "  min eig(P): " << format_number(m.p_min_eig) << '\n'
          << "  ||Gamma - F^T F||_max: " << format_number(m.gamma_residual) << '\n';
      print_matrix(out, "F", g.F);
      print_matrix(out, "Gamma", g.Gamma);
    }
    write_json(sc.output_dir / "gains.json", doc);
    write_json(sc.output_dir / "synth_report.json", report);
    out << "wrote " << (sc.output_dir / "gains.json").string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int run_simulate(const Scenario& sc, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    std::filesystem::create_directories(sc.output_dir);
    const GainDocument gain = obtain_gain(sc);

    json summary = {{"variant", variant_name(sc.variant)},
                    {"model", sc.model_name},
                    {"topology", sc.topology_name},
                    {"agents", sc.topology.n_agents()},
                    {"seed", sc.sim.seed},
                    {"dt", sc.sim.dt},
                    {"t_final", sc.sim.t_final},
                    {"threshold", sc.threshold}};

    const auto start = std::chrono::steady_clock::now();
    Trajectory traj;
    try {
      switch (sc.variant) {
        case Variant::Static: {
          const auto& g = std::get<ConsensusGain>(gain);
          double c = 0.0;
          if (sc.static_c) {
            c = *sc.static_c;
          } else {
            c = static_coupling_bound(spectral_info(sc.topology));
          }
          summary["c"] = c;
          traj = simulate_static(sc.linear, g.F, c, sc.topology, sc.sim);
          break;
        }
        case Variant::Adaptive:
          traj = simulate_adaptive(sc.linear, std::get<ConsensusGain>(gain), sc.topology, sc.sim);
          break;
        case Variant::AdaptiveNonlinear:
          traj = simulate_adaptive(*sc.nonlinear, std::get<LipschitzGain>(gain), sc.topology, sc.sim);
          break;
        case Variant::Leader:
          if (sc.nonlinear) {
            traj = simulate_leader(*sc.nonlinear, std::get<LipschitzGain>(gain), sc.topology,
                                   leader_coupling(sc), sc.sim);
          } else {
            traj = simulate_leader(sc.linear, std::get<ConsensusGain>(gain), sc.topology,
                                   leader_coupling(sc), sc.sim);
          }
          break;
      }
    } catch (const DivergenceError& e) {
      summary["achieved"] = false;
      summary["diverged"] = true;
      summary["blowup_time"] = e.time();
      summary["runtime_seconds"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      write_json(sc.output_dir / "summary.json", summary);
      err << "simulation diverged: " << e.what() << '\n';
      return kExitDivergence;
    } catch (const std::domain_error& e) {
      throw ConfigError(e.what());
    }
    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const ConsensusVerdict v = verdict(traj, sc.threshold);
    write_states_csv(sc.output_dir / "states.csv", traj);
    write_weights_csv(sc.output_dir / "weights.csv", traj);
    if (sc.svg) write_charts(sc, traj);

    summary["achieved"] = v.achieved;
    summary["diverged"] = false;
    summary["final_error"] = v.final_error;
    summary["weight_drift"] = v.weight_drift;
    summary["runtime_seconds"] = runtime;
    summary["samples"] = traj.size();
    if (!traj.couplings.empty()) summary["final_couplings"] = vector_json(traj.couplings.back());
    if (traj.has_leader) {
      summary["final_leader_couplings"] = vector_json(traj.leader_couplings.back());
      summary["final_tracking_errors"] = vector_json(traj.tracking_errors.back());
    }
    summary["warnings"] = traj.warnings;
    write_json(sc.output_dir / "summary.json", summary);

    for (const auto& w : traj.warnings) err << "warning: " << w << '\n';
    out << variant_name(sc.variant) << ": " << (v.achieved ? "consensus reached" : "no consensus")
        << " (final error " << format_number(v.final_error) << ", threshold "
        << format_number(sc.threshold) << ", weight drift " << format_number(v.weight_drift)
        << ", " << runtime << " s)\n"
        << "wrote " << sc.output_dir.string() << '\n';
    return kExitOk;
  });
}

int run_spectrum(const Topology& t, std::ostream& out) {
  const SpectralInfo s = spectral_info(t);
  const bool connected = is_connected(t);
  out << "agents: " << t.n_agents() << '\n'
      << "edges: " << t.n_edges() << '\n'
      << "connected: " << (connected ? "true" : "false") << '\n';
  if (t.n_agents() > 1) out << "lambda2: " << format_number(s.fiedler) << '\n';
  if (connected) out << "static_bound: " << format_number(static_coupling_bound(s)) << '\n';
  out << "eigenvalues:";
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) out << ' ' << format_number(s.eigenvalues(k));
  out << '\n';
  return kExitOk;
}

int cmd_synth(const std::filesystem::path& scenario, const CliOverrides& o, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    Scenario sc = load_scenario(scenario);
    apply_overrides(sc, o);
    return run_synth(sc, out, err);
  });
}

int cmd_simulate(const std::filesystem::path& scenario, const CliOverrides& o, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    Scenario sc = load_scenario(scenario);
    apply_overrides(sc, o);
    return run_simulate(sc, out, err);
  });
}

int cmd_spectrum(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const json doc = read_json(scenario);
    if (!doc.is_object() || !doc.contains("topology")) {
      throw ConfigError(scenario.string() + ": \"topology\" is required");
    }
    return run_spectrum(parse_topology(doc.at("topology")).first, out);
  });
}

int cmd_demo(const std::string& name, const CliOverrides& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Scenario sc = parse_scenario(builtin_scenario(name));
    apply_overrides(sc, o);
    return run_simulate(sc, out, err);
  });
}

int cmd_batch(const std::vector<std::filesystem::path>& scenarios, const CliOverrides& o,
              unsigned jobs, std::ostream& out, std::ostream& err) {
  const std::size_t count = scenarios.size();
  std::vector<std::string> outs(count), errs(count);
  std::vector<int> codes(count, kExitOk);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      std::ostringstream so, se;
      CliOverrides local = o;
      // One directory per scenario when a shared --out is given.
      if (o.out) local.out = *o.out / scenarios[k].stem();
      codes[k] = cmd_simulate(scenarios[k], local, so, se);
      outs[k] = so.str();
      errs[k] = se.str();
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  int worst = kExitOk;
  for (std::size_t k = 0; k < count; ++k) {
    out << "[" << scenarios[k].string() << "] " << outs[k];
    err << errs[k];
    worst = std::max(worst, codes[k]);
  }
  return worst;
}

int run_command_line(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive consensus: gain synthesis and closed-loop simulation"};
  app.name("adcons");
  app.require_subcommand(1);

  CliOverrides overrides;
  std::uint64_t seed = 0;
  double dt = 0.0;
  double t_final = 0.0;
  double threshold = 0.0;
  std::string out_dir;

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Seed for initial conditions");
    cmd->add_option("--dt", dt, "Integration step (s)");
    cmd->add_option("--t-final", t_final, "Horizon (s)");
    cmd->add_option("--threshold", threshold, "Consensus error threshold");
    cmd->add_option("--out", out_dir, "Output directory");
    cmd->add_flag("--svg", overrides.svg, "Also write SVG line charts");
  };

  std::string scenario;
  auto* synth = app.add_subcommand("synth", "Synthesize and verify feedback gains");
  synth->add_option("scenario", scenario, "Scenario JSON file")->required();
  add_run_flags(synth);

  auto* simulate = app.add_subcommand("simulate", "Run a closed-loop simulation");
  simulate->add_option("scenario", scenario, "Scenario JSON file")->required();
  add_run_flags(simulate);

  auto* spectrum = app.add_subcommand("spectrum", "Report Laplacian spectrum and static bound");
  spectrum->add_option("scenario", scenario, "Scenario JSON file")->required();

  std::string demo_name = "manipulator";
  auto* demo = app.add_subcommand("demo", "Run a built-in scenario (manipulator, leader)");
  demo->add_option("name", demo_name, "Built-in scenario name");
  add_run_flags(demo);

  std::vector<std::string> batch_files;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* batch = app.add_subcommand("batch", "Simulate several scenarios in parallel");
  batch->add_option("scenarios", batch_files, "Scenario JSON files")->required();
  batch->add_option("--jobs", jobs, "Worker threads");
  add_run_flags(batch);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitConfig;
  }

  for (CLI::App* cmd : {synth, simulate, demo, batch}) {
    if (!cmd->parsed()) continue;
    if (cmd->count("--seed")) overrides.seed = seed;
    if (cmd->count("--dt")) overrides.dt = dt;
    if (cmd->count("--t-final")) overrides.t_final = t_final;
    if (cmd->count("--threshold")) overrides.threshold = threshold;
    if (cmd->count("--out")) overrides.out = out_dir;
  }

  if (synth->parsed()) return cmd_synth(scenario, overrides, out, err);
  if (simulate->parsed()) return cmd_simulate(scenario, overrides, out, err);
  if (spectrum->parsed()) return cmd_spectrum(scenario, out, err);
  if (demo->parsed()) return cmd_demo(demo_name, overrides, out, err);
  std::vector<std::filesystem::path> files(batch_files.begin(), batch_files.end());
  return cmd_batch(files, overrides, jobs, out, err);
}

}  // namespace adcons
