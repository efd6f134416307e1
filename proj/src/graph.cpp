#include "adcons/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <string>

#include "adcons/errors.hpp"

namespace adcons {

namespace {

std::string pair_text(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace

Topology::Topology(std::size_t n_agents,
                   const std::vector<std::pair<std::size_t, std::size_t>>& edge_list)
    : n_agents_(n_agents), neighbors_(n_agents) {
  if (n_agents == 0) throw TopologyError("topology needs at least one agent");
  std::set<Edge> seen;
  for (const auto& [a, b] : edge_list) {
    if (a >= n_agents || b >= n_agents) {
      throw TopologyError("edge " + pair_text(a, b) + " has an index out of range [0, " +
                          std::to_string(n_agents) + ")");
    }
    if (a == b) throw TopologyError("edge " + pair_text(a, b) + " is a self-loop");
    const Edge e{std::min(a, b), std::max(a, b)};
    if (!seen.insert(e).second) throw TopologyError("edge " + pair_text(a, b) + " is a duplicate");
  }
  edges_.assign(seen.begin(), seen.end());
  for (const Edge& e : edges_) {
    neighbors_[e.i].push_back(e.j);
    neighbors_[e.j].push_back(e.i);
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
}

bool Topology::adjacent(std::size_t i, std::size_t j) const {
  const auto& nb = neighbors_.at(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::optional<std::size_t> Topology::edge_index(std::size_t i, std::size_t j) const {
  const Edge key{std::min(i, j), std::max(i, j)};
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

Matrix Topology::adjacency() const {
  const auto n = static_cast<Eigen::Index>(n_agents_);
  Matrix a = Matrix::Zero(n, n);
  for (const Edge& e : edges_) {
    a(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j)) = 1.0;
    a(static_cast<Eigen::Index>(e.j), static_cast<Eigen::Index>(e.i)) = 1.0;
  }
  return a;
}

Topology build_topology(std::size_t n_agents,
                        const std::vector<std::pair<std::size_t, std::size_t>>& edge_list) {
  return Topology(n_agents, edge_list);
}

Matrix laplacian(const Topology& t) {
  Matrix l = -t.adjacency();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    l(i, i) = static_cast<double>(t.degree(static_cast<std::size_t>(i)));
  }
  return l;
}

SpectralInfo spectral_info(const Topology& t) {
  SpectralInfo info;
  info.laplacian = laplacian(t);
  info.eigenvalues = symmetric_eigenvalues(info.laplacian);
  info.fiedler = info.eigenvalues.size() > 1 ? info.eigenvalues(1)
                                             : std::numeric_limits<double>::infinity();
  return info;
}

bool is_connected(const Topology& t) {
  const std::size_t n = t.n_agents();
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t visited = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (const std::size_t v : t.neighbors(u)) {
      if (!seen[v]) {
        seen[v] = true;
        ++visited;
        frontier.push(v);
      }
    }
  }
  return visited == n;
}

Topology ring_topology(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  if (n == 2) e.emplace_back(0, 1);
  if (n > 2) {
    for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  }
  return Topology(n, e);
}

Topology complete_topology(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  }
  return Topology(n, e);
}

Topology path_topology(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Topology(n, e);
}

Topology star_topology(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 1; i < n; ++i) e.emplace_back(0, i);
  return Topology(n, e);
}

Topology benchmark_topology() {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < 8; ++i) e.emplace_back(i, (i + 1) % 8);
  e.emplace_back(0, 4);
  e.emplace_back(1, 5);
  return Topology(8, e);
}

}  // namespace adcons
