#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "adcons/csv.hpp"
#include "adcons/errors.hpp"
#include "adcons/gain_io.hpp"
#include "adcons/graph.hpp"
#include "adcons/scenario.hpp"
#include "adcons/svg.hpp"

using namespace adcons;
using nlohmann::json;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("format_number round-trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 1e-17}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(0.5) == "0.5");
}

TEST_CASE("matrix json conversion") {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6.25;
  json j = matrix_to_json(m);
  CHECK(j.dump() == "[[1.0,2.0,3.0],[4.0,5.0,6.25]]");
  CHECK(matrix_from_json(j, "m") == m);
  CHECK(matrix_from_json(json::parse("[1, 2]"), "v") == Matrix(Eigen::Vector2d(1, 2)));
  CHECK_THROWS_AS(matrix_from_json(json::parse("[[1, 2], [3]]"), "m"), ConfigError);
  CHECK_THROWS_AS(matrix_from_json(json::parse("[[1, \"x\"]]"), "m"), ConfigError);
  CHECK_THROWS_AS(matrix_from_json(json::parse("3"), "m"), ConfigError);
}

TEST_CASE("gain documents round-trip") {
  ConsensusGain c{Matrix::Identity(2, 2) * 0.1, Matrix::Constant(1, 2, 1.0 / 3.0), Matrix::Zero(2, 2)};
  c.Gamma = c.F.transpose() * c.F;
  auto cj = gain_to_json(c, ConsensusMargins{-1.0, 0.1, 0.0});
  CHECK(cj.at("kind") == "consensus");
  auto back = std::get<ConsensusGain>(gain_from_json(json::parse(cj.dump())));
  CHECK(back.P == c.P);
  CHECK(back.F == c.F);
  CHECK(back.Gamma == c.Gamma);

  LipschitzGain l;
  l.Q = Matrix::Identity(2, 2) * 0.7;
  l.tau = 2.125;
  l.T = Eigen::Vector2d(1e-3, 3.5);
  l.F = Matrix::Constant(1, 2, -0.1);
  l.Gamma = l.F.transpose() * l.F;
  auto lj = gain_to_json(l, LipschitzMargins{});
  CHECK(lj.at("kind") == "lipschitz");
  auto lb = std::get<LipschitzGain>(gain_from_json(json::parse(lj.dump())));
  CHECK(lb.Q == l.Q);
  CHECK(lb.tau == l.tau);
  CHECK(lb.T == l.T);
  CHECK(lb.F == l.F);

  CHECK_THROWS_AS(gain_from_json(json::parse(R"({"kind": "other"})")), ConfigError);
  CHECK_THROWS_AS(gain_from_json(json::parse(R"({"kind": "consensus", "P": [[1]]})")), ConfigError);
}

TEST_CASE("scenario parsing: builtins") {
  auto m = parse_scenario(builtin_scenario("manipulator"));
  CHECK(m.variant == Variant::AdaptiveNonlinear);
  CHECK(m.nonlinear.has_value());
  CHECK(m.topology.n_agents() == 8);
  CHECK(m.sim.t_final == 20.0);
  CHECK(m.threshold == 1e-3);

  auto l = parse_scenario(builtin_scenario("leader"));
  CHECK(l.variant == Variant::Leader);
  REQUIRE(l.pins.size() == 1);
  CHECK(l.pins[0].agent == 0);
  CHECK(l.pins[0].d == 1.0);
  CHECK(l.topology.n_agents() == 5);
}

TEST_CASE("scenario parsing: inline model and topology forms") {
  auto doc = json::parse(R"({
    "model": {"A": [[1]], "B": [[1]]},
    "topology": {"n": 3, "edges": [[0, 1], [1, 2]]},
    "protocol": {"variant": "static", "c": 2.5},
    "sim": {"dt": 0.01, "t_final": 1, "seed": 4, "record_stride": 5},
    "output": "runs/x"
  })");
  auto sc = parse_scenario(doc, "/base");
  CHECK(sc.variant == Variant::Static);
  CHECK(sc.static_c == 2.5);
  CHECK(sc.topology.n_edges() == 2);
  CHECK(sc.sim.seed == 4);
  CHECK(sc.sim.record_stride == 5);
  CHECK(sc.output_dir == std::filesystem::path("/base/runs/x"));

  auto nl = json::parse(R"({
    "model": {"A": [[0, 1], [0, 0]], "B": [[0], [1]], "D1": [[0], [1]], "gamma": 0.5,
              "f": {"kind": "sin", "M": [[0.5, 0]]}},
    "topology": {"family": "ring", "n": 4}
  })");
  auto ns = parse_scenario(nl);
  CHECK(ns.variant == Variant::AdaptiveNonlinear);
  CHECK(ns.nonlinear->m() == 1);
  CHECK(ns.topology.n_edges() == 4);
}

TEST_CASE("scenario parsing: errors") {
  auto bad = [](const char* text) { return parse_scenario(json::parse(text)); };
  CHECK_THROWS_AS(bad(R"({"model": "manipulator", "topology": "benchmark", "extra": 1})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": "nope", "topology": "benchmark"})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"topology": "benchmark"})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": "double_integrator", "topology": {"n": 3, "edges": [[0, 0]]}})"),
                  ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": "double_integrator", "topology": "benchmark",
                          "protocol": {"variant": "leader"}})"),
                  ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": "double_integrator", "topology": "benchmark",
                          "protocol": {"variant": "leader", "pins": [{"agent": 0, "d": 0}]}})"),
                  ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": "manipulator", "topology": "benchmark",
                          "protocol": {"variant": "adaptive"}})"),
                  ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": {"A": [[1, 0]], "B": [[1]]}, "topology": "benchmark"})"),
                  ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": "double_integrator", "topology": "benchmark",
                          "sim": {"dt": -1}})"),
                  ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": "double_integrator", "topology": {"family": "torus", "n": 4}})"),
                  ConfigError);
}

TEST_CASE("csv layout") {
  Trajectory traj;
  traj.n_agents = 2;
  traj.state_dim = 2;
  traj.edges = {Edge{0, 1}};
  traj.times = {0.0, 0.1};
  traj.states = {Matrix::Zero(2, 2), Matrix::Constant(2, 2, 1.0 / 3.0)};
  traj.couplings = {Vector::Constant(1, 0.5), Vector::Constant(1, 0.75)};
  traj.consensus_error = {0.0, 0.0};

  std::ostringstream states, weights;
  write_states_csv(states, traj);
  write_weights_csv(weights, traj);
  CHECK(first_line(states.str()) == "time,x1_1,x1_2,x2_1,x2_2");
  CHECK(first_line(weights.str()) == "time,c_1_2");
  CHECK(states.str().find("0.10000000000000001,0.33333333333333331,") != std::string::npos);
  CHECK(weights.str().find("0.10000000000000001,0.75\n") != std::string::npos);

  traj.has_leader = true;
  traj.leader_states = {Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2)};
  traj.leader_couplings = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)};
  std::ostringstream ls, lw;
  write_states_csv(ls, traj);
  write_weights_csv(lw, traj);
  CHECK(first_line(ls.str()) == "time,x1_1,x1_2,x2_1,x2_2,x0_1,x0_2");
  CHECK(first_line(lw.str()) == "time,c_1_2,c0_1,c0_2");
}

TEST_CASE("svg charts are well-formed") {
  LineChart chart;
  chart.title = "weights <c_ij> & more";
  chart.x = {0.0, 1.0, 2.0};
  chart.series = {{"a", {0.0, 1.0, 4.0}}, {"b", {1.0, std::nan(""), 0.5}}};
  std::ostringstream os;
  write_svg(os, chart);
  const std::string s = os.str();
  CHECK(s.find("<svg") != std::string::npos);
  CHECK(s.rfind("</svg>") != std::string::npos);
  CHECK(count(s, "<polyline") == 2);
  CHECK(s.find("&lt;c_ij&gt; &amp; more") != std::string::npos);
  CHECK(count(s, "<text") == count(s, "</text>"));
  CHECK(count(s, "<g") == count(s, "</g>"));
  CHECK(s.find("nan") == std::string::npos);

  chart.series[0].y.pop_back();
  std::ostringstream bad;
  CHECK_THROWS_AS(write_svg(bad, chart), std::invalid_argument);
}
