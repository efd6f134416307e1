#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "adcons/linalg.hpp"

namespace adcons {

/// Undirected edge, stored with i < j.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;

  auto operator<=>(const Edge&) const = default;
};

/// Undirected, unweighted communication graph on agents 0..N-1.
///
/// Immutable after construction. Edges are kept sorted lexicographically;
/// that order is the canonical edge indexing used by coupling-weight vectors,
/// CSV columns, and the simulator.
class Topology {
 public:
  /// Throws TopologyError on a self-loop, duplicate edge (in either
  /// orientation), or out-of-range index; the message names the pair.
  Topology(std::size_t n_agents, const std::vector<std::pair<std::size_t, std::size_t>>& edge_list);

  std::size_t n_agents() const noexcept { return n_agents_; }
  std::size_t n_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  bool adjacent(std::size_t i, std::size_t j) const;
  std::size_t degree(std::size_t i) const { return neighbors_.at(i).size(); }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighbors_.at(i); }

  /// Index into edges() of {i, j}, either orientation.
  std::optional<std::size_t> edge_index(std::size_t i, std::size_t j) const;

  /// 0/1 adjacency matrix a_ij.
  Matrix adjacency() const;

 private:
  std::size_t n_agents_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

struct SpectralInfo {
  Matrix laplacian;
  Vector eigenvalues;  // ascending
  /// Second-smallest Laplacian eigenvalue; +infinity for a single agent.
  double fiedler = 0.0;
};

Topology build_topology(std::size_t n_agents,
                        const std::vector<std::pair<std::size_t, std::size_t>>& edge_list);

/// L = D - A.
Matrix laplacian(const Topology& t);

/// Full Laplacian spectrum via cyclic Jacobi.
SpectralInfo spectral_info(const Topology& t);

/// Breadth-first traversal; exact, independent of the spectrum.
bool is_connected(const Topology& t);

// Named families.
Topology ring_topology(std::size_t n);
Topology complete_topology(std::size_t n);
Topology path_topology(std::size_t n);
Topology star_topology(std::size_t n);

/// Eight-agent benchmark network: the 8-cycle plus chords (0,4) and (1,5).
Topology benchmark_topology();

}  // namespace adcons
