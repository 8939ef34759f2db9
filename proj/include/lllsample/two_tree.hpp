#pragma once

#include <cstdint>
#include <vector>

namespace lllsample {

/// Simple undirected graph on vertices 0..n-1.
class Graph {
 public:
  explicit Graph(std::size_t n = 0) : adj_(n) {}

  void add_edge(std::uint32_t u, std::uint32_t v);
  std::size_t num_vertices() const { return adj_.size(); }
  const std::vector<std::uint32_t>& neighbors(std::uint32_t v) const {
    return adj_[v];
  }
  bool adjacent(std::uint32_t u, std::uint32_t v) const;
  std::size_t max_degree() const;

  /// BFS distances from `source`; UINT32_MAX for unreachable vertices.
  std::vector<std::uint32_t> distances(std::uint32_t source) const;

 private:
  std::vector<std::vector<std::uint32_t>> adj_;
};

/// Pairwise distance >= 2 and connected once every pair at distance <= 2 is
/// joined (checked with union-find).
bool is_2tree(const Graph& g, const std::vector<std::uint32_t>& set);

/// Number of 2-trees of size ell containing root, by exhaustive scan of the
/// vertex subsets. Requires at most 20 vertices.
std::uint64_t count_2trees(const Graph& g, std::uint32_t root, std::size_t ell);

/// (e Delta^2)^(ell-1) / 2, the bound on the 2-tree count.
double two_tree_bound(std::size_t max_degree, std::size_t ell);

/// The greedy construction: start from {v}; repeatedly add the smallest
/// vertex of the subgraph at distance exactly 2 from the current set and
/// not yet dominated. The subgraph must be connected and contain v.
std::vector<std::uint32_t> greedy_2tree(const Graph& g,
                                        const std::vector<std::uint32_t>& subgraph,
                                        std::uint32_t v);

}  // namespace lllsample
