#include <doctest.h>

#include <cmath>
#include <string>

#include "adcons/errors.hpp"
#include "adcons/graph.hpp"
#include "adcons/random.hpp"

using namespace adcons;

TEST_CASE("topology construction") {
  auto t = build_topology(2, {{0, 1}});
  CHECK(t.n_agents() == 2);
  CHECK(t.n_edges() == 1);
  CHECK(t.adjacent(0, 1));
  CHECK(t.adjacent(1, 0));

  auto ring = ring_topology(8);
  CHECK(ring.n_edges() == 8);
  for (std::size_t i = 0; i < 8; ++i) CHECK(ring.degree(i) == 2);
}

TEST_CASE("edges are normalised and sorted") {
  auto t = build_topology(4, {{3, 2}, {1, 0}, {2, 0}});
  REQUIRE(t.n_edges() == 3);
  CHECK(t.edges()[0] == Edge{0, 1});
  CHECK(t.edges()[1] == Edge{0, 2});
  CHECK(t.edges()[2] == Edge{2, 3});
  CHECK(t.edge_index(3, 2) == 2u);
  CHECK(t.edge_index(2, 3) == 2u);
  CHECK_FALSE(t.edge_index(1, 3).has_value());
}

TEST_CASE("topology errors name the offending pair") {
  auto message = [](auto fn) {
    try {
      fn();
    } catch (const TopologyError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const auto self = message([] { build_topology(3, {{0, 1}, {1, 1}}); });
  CHECK(self.find("self-loop") != std::string::npos);
  CHECK(self.find("(1, 1)") != std::string::npos);

  const auto dup = message([] { build_topology(3, {{0, 1}, {1, 0}}); });
  CHECK(dup.find("duplicate") != std::string::npos);
  CHECK(dup.find("(1, 0)") != std::string::npos);

  const auto range = message([] { build_topology(3, {{0, 3}}); });
  CHECK(range.find("(0, 3)") != std::string::npos);
}

TEST_CASE("laplacian examples") {
  Matrix k2(2, 2);
  k2 << 1, -1, -1, 1;
  CHECK(laplacian(complete_topology(2)) == k2);

  Matrix p3(3, 3);
  p3 << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK(laplacian(path_topology(3)) == p3);

  CHECK(laplacian(build_topology(3, {})) == Matrix::Zero(3, 3));
}

TEST_CASE("complete graph spectrum") {
  for (std::size_t n : {2u, 3u, 5u, 8u, 12u}) {
    auto s = spectral_info(complete_topology(n));
    CHECK(std::abs(s.eigenvalues(0)) <= 1e-12);
    for (Eigen::Index k = 1; k < s.eigenvalues.size(); ++k)
      CHECK(s.eigenvalues(k) == doctest::Approx(static_cast<double>(n)).epsilon(1e-13));
    CHECK(s.fiedler == doctest::Approx(static_cast<double>(n)).epsilon(1e-13));
  }
}

TEST_CASE("8-cycle fiedler value matches the circulant closed form") {
  const double expected = 2.0 * (1.0 - std::cos(2.0 * M_PI / 8.0));
  auto s = spectral_info(ring_topology(8));
  CHECK(std::abs(s.fiedler - expected) <= 1e-9);
  CHECK(std::abs(s.fiedler - 0.5857864376269049) <= 1e-12);
  // Full circulant spectrum 2 - 2 cos(2 pi k / 8).
  std::vector<double> ref;
  for (int k = 0; k < 8; ++k) ref.push_back(2.0 - 2.0 * std::cos(2.0 * M_PI * k / 8.0));
  std::sort(ref.begin(), ref.end());
  for (int k = 0; k < 8; ++k) CHECK(std::abs(s.eigenvalues(k) - ref[k]) <= 1e-12);
}

TEST_CASE("disconnected graph has zero fiedler value") {
  auto t = build_topology(4, {{0, 1}, {2, 3}});
  auto s = spectral_info(t);
  CHECK(std::abs(s.fiedler) <= 1e-12);
  CHECK_FALSE(is_connected(t));
}

TEST_CASE("single agent") {
  auto t = build_topology(1, {});
  CHECK(is_connected(t));
  CHECK(std::isinf(spectral_info(t).fiedler));
}

TEST_CASE("is_connected examples") {
  CHECK(is_connected(path_topology(3)));
  CHECK(is_connected(star_topology(6)));
  CHECK(is_connected(benchmark_topology()));
  CHECK_FALSE(is_connected(build_topology(3, {{0, 1}})));
}

TEST_CASE("benchmark topology layout") {
  auto t = benchmark_topology();
  CHECK(t.n_agents() == 8);
  CHECK(t.n_edges() == 10);
  CHECK(t.adjacent(0, 4));
  CHECK(t.adjacent(1, 5));
  CHECK(t.adjacent(7, 0));
}

TEST_CASE("random graphs: connectivity, PSD, kernel") {
  Rng rng(2024);
  int connected_count = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 12;
    const double density = rng.uniform(0.05, 0.6);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.uniform() < density) edges.emplace_back(i, j);
    auto t = build_topology(n, edges);
    auto s = spectral_info(t);
    const bool traversal = is_connected(t);
    const bool spectral = n == 1 || s.fiedler > 1e-9;
    CHECK(traversal == spectral);
    connected_count += traversal ? 1 : 0;
    CHECK(s.eigenvalues(0) >= -1e-12);
    CHECK(max_abs(s.laplacian * Vector::Ones(static_cast<Eigen::Index>(n))) == 0.0);
    CHECK(s.laplacian == s.laplacian.transpose());
  }
  // Both branches exercised.
  CHECK(connected_count > 100);
  CHECK(connected_count < 900);
}
