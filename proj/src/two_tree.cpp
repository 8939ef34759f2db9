#include "lllsample/two_tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace lllsample {

void Graph::add_edge(std::uint32_t u, std::uint32_t v) {
  if (u >= adj_.size() || v >= adj_.size() || u == v) {
    throw std::invalid_argument("bad edge");
  }
  if (adjacent(u, v)) return;
  adj_[u].push_back(v);
  adj_[v].push_back(u);
}

bool Graph::adjacent(std::uint32_t u, std::uint32_t v) const {
  return std::find(adj_[u].begin(), adj_[u].end(), v) != adj_[u].end();
}

std::size_t Graph::max_degree() const {
  std::size_t d = 0;
  for (const auto& a : adj_) d = std::max(d, a.size());
  return d;
}

std::vector<std::uint32_t> Graph::distances(std::uint32_t source) const {
  std::vector<std::uint32_t> dist(adj_.size(), UINT32_MAX);
  std::deque<std::uint32_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (auto w : adj_[u]) {
      if (dist[w] == UINT32_MAX) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

bool is_2tree_with(const std::vector<std::vector<std::uint32_t>>& dist,
                   const std::vector<std::uint32_t>& set) {
  UnionFind uf(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      const auto d = dist[set[i]][set[j]];
      if (d < 2) return false;
      if (d == 2) uf.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
  }
  for (std::size_t i = 1; i < set.size(); ++i) {
    if (uf.find(static_cast<std::uint32_t>(i)) != uf.find(0)) return false;
  }
  return true;
}

}  // namespace

bool is_2tree(const Graph& g, const std::vector<std::uint32_t>& set) {
  if (set.empty()) return false;
  std::vector<std::vector<std::uint32_t>> dist(g.num_vertices());
  for (auto v : set) dist[v] = g.distances(v);
  return is_2tree_with(dist, set);
}

std::uint64_t count_2trees(const Graph& g, std::uint32_t root, std::size_t ell) {
  const std::size_t n = g.num_vertices();
  if (n > 20) throw std::invalid_argument("count_2trees needs <= 20 vertices");
  if (root >= n) throw std::invalid_argument("root out of range");
  if (ell == 0) return 0;
  std::vector<std::vector<std::uint32_t>> dist(n);
  for (std::uint32_t v = 0; v < n; ++v) dist[v] = g.distances(v);
  std::uint64_t count = 0;
  const std::uint32_t full = 1u << n;
  std::vector<std::uint32_t> set;
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    if (!(mask >> root & 1u)) continue;
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != ell) continue;
    set.clear();
    for (std::uint32_t v = 0; v < n; ++v) {
      if (mask >> v & 1u) set.push_back(v);
    }
    if (is_2tree_with(dist, set)) ++count;
  }
  return count;
}

double two_tree_bound(std::size_t max_degree, std::size_t ell) {
  const double d = static_cast<double>(max_degree);
  return std::pow(std::exp(1.0) * d * d, static_cast<double>(ell) - 1.0) / 2.0;
}

std::vector<std::uint32_t> greedy_2tree(const Graph& g,
                                        const std::vector<std::uint32_t>& subgraph,
                                        std::uint32_t v) {
  if (std::find(subgraph.begin(), subgraph.end(), v) == subgraph.end()) {
    throw std::invalid_argument("subgraph does not contain v");
  }
  std::vector<std::uint32_t> members = subgraph;
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());

  // dist_to_tree[u] = d_G(T, u), maintained as vertices join T.
  std::vector<std::uint32_t> dist_to_tree = g.distances(v);
  std::vector<std::uint32_t> tree{v};
  while (true) {
    std::uint32_t next = UINT32_MAX;
    for (auto u : members) {
      if (dist_to_tree[u] == 2) {
        next = u;
        break;
      }
    }
    if (next == UINT32_MAX) break;
    tree.push_back(next);
    const auto d = g.distances(next);
    for (std::size_t u = 0; u < d.size(); ++u) {
      dist_to_tree[u] = std::min(dist_to_tree[u], d[u]);
    }
  }
  return tree;
}

}  // namespace lllsample
