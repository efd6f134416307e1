#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "adcons/cli.hpp"
#include "adcons/dynamics.hpp"
#include "adcons/errors.hpp"
#include "adcons/graph.hpp"
#include "adcons/protocol.hpp"
#include "adcons/sim.hpp"
#include "adcons/synthesis.hpp"

namespace py = pybind11;
using namespace adcons;

namespace {

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

EdgeList edge_list(const Topology& t) {
  EdgeList out;
  for (const Edge& e : t.edges()) out.emplace_back(e.i, e.j);
  return out;
}

// Stacks per-sample vectors into a (samples, width) array.
py::array_t<double> stack(const std::vector<Vector>& rows) {
  const py::ssize_t width = rows.empty() ? 0 : rows.front().size();
  py::array_t<double> out({static_cast<py::ssize_t>(rows.size()), width});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (py::ssize_t j = 0; j < width; ++j) view(k, j) = rows[k](j);
  return out;
}

py::array_t<double> stack_states(const Trajectory& tr) {
  const auto n_agents = static_cast<py::ssize_t>(tr.n_agents);
  const auto dim = static_cast<py::ssize_t>(tr.state_dim);
  py::array_t<double> out({static_cast<py::ssize_t>(tr.size()), n_agents, dim});
  auto view = out.mutable_unchecked<3>();
  for (std::size_t k = 0; k < tr.states.size(); ++k)
    for (py::ssize_t i = 0; i < n_agents; ++i)
      for (py::ssize_t j = 0; j < dim; ++j) view(k, i, j) = tr.states[k](i, j);
  return out;
}

py::array_t<double> as_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

LeaderCoupling make_leader(const Vector& d, const std::optional<Vector>& c_leader,
                           const std::optional<Vector>& kappa_leader,
                           const std::optional<Vector>& leader_state) {
  LeaderCoupling lc;
  lc.d = d;
  if (c_leader) lc.c_leader = *c_leader;
  if (kappa_leader) lc.kappa_leader = *kappa_leader;
  if (leader_state) lc.leader_state = *leader_state;
  return lc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adaptive consensus: graphs, gain synthesis and closed-loop simulation";

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<TopologyError> topology_error(m, "TopologyError", PyExc_ValueError);
  static py::exception<SynthesisError> synthesis_error(m, "SynthesisError", PyExc_RuntimeError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
  static py::exception<DivergenceError> divergence_error(m, "DivergenceError",
                                                         PyExc_ArithmeticError);
  // Carry best_margin / time as attributes of the raised instance.
  py::register_exception_translator([](std::exception_ptr p) {
    auto raise = [](const py::object& type, const char* what) {
      py::object inst = type(what);
      PyErr_SetObject(type.ptr(), inst.ptr());
      return inst;
    };
    try {
      if (p) std::rethrow_exception(p);
    } catch (const SynthesisError& e) {
      py::object type = synthesis_error;
      py::object inst = type(e.what());
      inst.attr("best_margin") = e.best_margin();
      PyErr_SetObject(type.ptr(), inst.ptr());
    } catch (const DivergenceError& e) {
      py::object type = divergence_error;
      py::object inst = type(e.what());
      inst.attr("time") = e.time();
      PyErr_SetObject(type.ptr(), inst.ptr());
    } catch (const ConfigError& e) {
      raise(config_error, e.what());
    } catch (const TopologyError& e) {
      raise(topology_error, e.what());
    } catch (const NumericalError& e) {
      raise(numerical_error, e.what());
    }
  });

  py::class_<Topology>(m, "Topology")
      .def(py::init<std::size_t, const EdgeList&>(), py::arg("n_agents"), py::arg("edges"))
      .def_property_readonly("n_agents", &Topology::n_agents)
      .def_property_readonly("n_edges", &Topology::n_edges)
      .def_property_readonly("edges", &edge_list)
      .def("adjacent", &Topology::adjacent)
      .def("degree", &Topology::degree)
      .def("adjacency", &Topology::adjacency)
      .def("is_connected", [](const Topology& t) { return is_connected(t); })
      .def("__repr__", [](const Topology& t) {
        return "Topology(n_agents=" + std::to_string(t.n_agents()) +
               ", n_edges=" + std::to_string(t.n_edges()) + ")";
      });

  m.def("ring_topology", &ring_topology, py::arg("n"));
  m.def("complete_topology", &complete_topology, py::arg("n"));
  m.def("path_topology", &path_topology, py::arg("n"));
  m.def("star_topology", &star_topology, py::arg("n"));
  m.def("benchmark_topology", &benchmark_topology);
  m.def("laplacian", &laplacian, py::arg("topology"));
  m.def(
      "spectrum",
      [](const Topology& t) {
        const SpectralInfo s = spectral_info(t);
        return py::make_tuple(s.eigenvalues, s.fiedler);
      },
      py::arg("topology"), "Ascending Laplacian eigenvalues and lambda_2.");
  m.def(
      "static_coupling_bound",
      [](const Topology& t) { return static_coupling_bound(spectral_info(t)); },
      py::arg("topology"));

  py::class_<LinearModel>(m, "LinearModel")
      .def(py::init<Matrix, Matrix>(), py::arg("A"), py::arg("B"))
      .def_readonly("A", &LinearModel::A)
      .def_readonly("B", &LinearModel::B)
      .def_property_readonly("n", &LinearModel::n)
      .def_property_readonly("p", &LinearModel::p);

  py::class_<NonlinearModel>(m, "NonlinearModel")
      .def(py::init([](const Matrix& a, const Matrix& b, const Matrix& d1, Nonlinearity f,
                       double gamma) {
             return NonlinearModel(LinearModel(a, b), d1, std::move(f), gamma);
           }),
           py::arg("A"), py::arg("B"), py::arg("D1"), py::arg("f"), py::arg("gamma"))
      .def_property_readonly("A", [](const NonlinearModel& md) { return md.linear.A; })
      .def_property_readonly("B", [](const NonlinearModel& md) { return md.linear.B; })
      .def_readonly("D1", &NonlinearModel::D1)
      .def_readonly("gamma", &NonlinearModel::gamma)
      .def_property_readonly("linear", [](const NonlinearModel& md) { return md.linear; })
      .def("f", [](const NonlinearModel& md, const Vector& x) { return md.f(x); }, py::arg("x"));

  m.def("manipulator_model", &manipulator_model);
  m.def(
      "check_lipschitz",
      [](const NonlinearModel& md, int n_samples, double radius, std::uint64_t seed) {
        const LipschitzReport r = check_lipschitz(md, n_samples, radius, seed);
        return py::make_tuple(r.pass, r.max_ratio);
      },
      py::arg("model"), py::arg("n_samples") = 100000, py::arg("radius") = 10.0,
      py::arg("seed") = 0, "Returns (pass, max_ratio).");

  m.def(
      "check_stabilizable",
      [](const Matrix& a, const Matrix& b) {
        const StabilizabilityReport r = check_stabilizable(a, b);
        return py::make_tuple(r.stabilizable, r.uncontrollable_modes);
      },
      py::arg("A"), py::arg("B"), "Returns (stabilizable, uncontrollable_modes).");

  py::class_<ConsensusGain>(m, "ConsensusGain")
      .def(py::init([](const Matrix& p, const Matrix& f, const Matrix& gamma) {
             return ConsensusGain{p, f, gamma};
           }),
           py::arg("P"), py::arg("F"), py::arg("Gamma"))
      .def_readonly("P", &ConsensusGain::P)
      .def_readonly("F", &ConsensusGain::F)
      .def_readonly("Gamma", &ConsensusGain::Gamma);

  py::class_<LipschitzGain>(m, "LipschitzGain")
      .def_readonly("Q", &LipschitzGain::Q)
      .def_readonly("tau", &LipschitzGain::tau)
      .def_readonly("T", &LipschitzGain::T)
      .def_readonly("F", &LipschitzGain::F)
      .def_readonly("Gamma", &LipschitzGain::Gamma)
      .def_readonly("iterations", &LipschitzGain::iterations);

  m.def(
      "solve_care",
      [](const Matrix& a, const Matrix& b) {
        const CareSolution s = solve_care(a, b);
        return py::make_tuple(s.W, s.residual);
      },
      py::arg("A"), py::arg("B"), "Stabilising Riccati solution W and its residual.");
  m.def(
      "solve_linear_gain", [](const LinearModel& md) { return solve_linear_gain(md); },
      py::arg("model"));
  m.def(
      "solve_lipschitz_gain",
      [](const NonlinearModel& md, int max_iterations) {
        SolverOptions opts;
        opts.max_iterations = max_iterations;
        return solve_lipschitz_gain(md, opts);
      },
      py::arg("model"), py::arg("max_iterations") = SolverOptions{}.max_iterations);
  m.def(
      "verify_consensus_gain",
      [](const LinearModel& md, const ConsensusGain& g) {
        const ConsensusMargins r = verify_consensus_gain(md, g);
        return py::dict(py::arg("lmi_max_eig") = r.lmi_max_eig, py::arg("p_min_eig") = r.p_min_eig,
                        py::arg("gamma_residual") = r.gamma_residual);
      },
      py::arg("model"), py::arg("gain"));
  m.def(
      "verify_lipschitz_gain",
      [](const NonlinearModel& md, const LipschitzGain& g) {
        const LipschitzMargins r = verify_lipschitz_gain(md, g);
        return py::dict(py::arg("block_max_eig") = r.block_max_eig,
                        py::arg("q_min_eig") = r.q_min_eig, py::arg("tau") = r.tau,
                        py::arg("t_min") = r.t_min, py::arg("gamma_residual") = r.gamma_residual);
      },
      py::arg("model"), py::arg("gain"));
  m.def("gamma_consistency", &gamma_consistency, py::arg("F"), py::arg("Gamma"));

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("dt", &SimConfig::dt)
      .def_readwrite("t_final", &SimConfig::t_final)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("init_state_scale", &SimConfig::init_state_scale)
      .def_readwrite("init_coupling_low", &SimConfig::init_coupling_low)
      .def_readwrite("init_coupling_high", &SimConfig::init_coupling_high)
      .def_readwrite("record_stride", &SimConfig::record_stride)
      .def_readwrite("kappa", &SimConfig::kappa)
      .def_readwrite("initial_states", &SimConfig::initial_states)
      .def_readwrite("initial_couplings", &SimConfig::initial_couplings)
      .def_readwrite("edge_kappa", &SimConfig::edge_kappa)
      .def("validate", &SimConfig::validate);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("n_agents", &Trajectory::n_agents)
      .def_readonly("state_dim", &Trajectory::state_dim)
      .def_readonly("has_leader", &Trajectory::has_leader)
      .def_readonly("warnings", &Trajectory::warnings)
      .def_property_readonly("edges",
                             [](const Trajectory& tr) {
                               EdgeList out;
                               for (const Edge& e : tr.edges) out.emplace_back(e.i, e.j);
                               return out;
                             })
      .def_property_readonly("times", [](const Trajectory& tr) { return as_array(tr.times); })
      .def_property_readonly("states", &stack_states, "(samples, agents, state_dim)")
      .def_property_readonly("couplings",
                             [](const Trajectory& tr) { return stack(tr.couplings); })
      .def_property_readonly("leader_couplings",
                             [](const Trajectory& tr) { return stack(tr.leader_couplings); })
      .def_property_readonly("leader_states",
                             [](const Trajectory& tr) { return stack(tr.leader_states); })
      .def_property_readonly("tracking_errors",
                             [](const Trajectory& tr) { return stack(tr.tracking_errors); })
      .def_property_readonly("consensus_error",
                             [](const Trajectory& tr) { return as_array(tr.consensus_error); })
      .def_property_readonly("lyapunov",
                             [](const Trajectory& tr) { return as_array(tr.lyapunov); })
      .def("__len__", &Trajectory::size);

  py::class_<ConsensusVerdict>(m, "Verdict")
      .def_readonly("achieved", &ConsensusVerdict::achieved)
      .def_readonly("final_error", &ConsensusVerdict::final_error)
      .def_readonly("error_threshold", &ConsensusVerdict::error_threshold)
      .def_readonly("weight_drift", &ConsensusVerdict::weight_drift)
      .def("__bool__", [](const ConsensusVerdict& v) { return v.achieved; });

  // Linear runs do not call back into Python, so the interpreter lock is released.
  m.def(
      "simulate_adaptive",
      py::overload_cast<const LinearModel&, const ConsensusGain&, const Topology&,
                        const SimConfig&>(&simulate_adaptive),
      py::arg("model"), py::arg("gain"), py::arg("topology"), py::arg("config") = SimConfig{},
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "simulate_adaptive",
      py::overload_cast<const NonlinearModel&, const LipschitzGain&, const Topology&,
                        const SimConfig&>(&simulate_adaptive),
      py::arg("model"), py::arg("gain"), py::arg("topology"), py::arg("config") = SimConfig{});
  m.def("simulate_static", &simulate_static, py::arg("model"), py::arg("K"), py::arg("c"),
        py::arg("topology"), py::arg("config") = SimConfig{},
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "simulate_leader",
      [](const LinearModel& md, const ConsensusGain& g, const Topology& t, const Vector& d,
         const SimConfig& cfg, const std::optional<Vector>& c_leader,
         const std::optional<Vector>& kappa_leader, const std::optional<Vector>& leader_state) {
        const LeaderCoupling lc = make_leader(d, c_leader, kappa_leader, leader_state);
        py::gil_scoped_release release;
        return simulate_leader(md, g, t, lc, cfg);
      },
      py::arg("model"), py::arg("gain"), py::arg("topology"), py::arg("d"),
      py::arg("config") = SimConfig{}, py::arg("c_leader") = py::none(),
      py::arg("kappa_leader") = py::none(), py::arg("leader_state") = py::none());
  m.def(
      "simulate_leader",
      [](const NonlinearModel& md, const LipschitzGain& g, const Topology& t, const Vector& d,
         const SimConfig& cfg, const std::optional<Vector>& c_leader,
         const std::optional<Vector>& kappa_leader, const std::optional<Vector>& leader_state) {
        return simulate_leader(md, g, t, make_leader(d, c_leader, kappa_leader, leader_state),
                               cfg);
      },
      py::arg("model"), py::arg("gain"), py::arg("topology"), py::arg("d"),
      py::arg("config") = SimConfig{}, py::arg("c_leader") = py::none(),
      py::arg("kappa_leader") = py::none(), py::arg("leader_state") = py::none());

  m.def("consensus_error", &consensus_error, py::arg("states"));
  m.def("verdict", &verdict, py::arg("trajectory"), py::arg("threshold"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run_command_line(args, out, err);
        }
        py::module_ sys = py::module_::import("sys");
        sys.attr("stdout").attr("write")(out.str());
        sys.attr("stderr").attr("write")(err.str());
        return code;
      },
      py::arg("args"), "Runs the adcons command line and returns its exit code.");
}
