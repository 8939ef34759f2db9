#include "lllsample/corpus.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "lllsample/formats.hpp"
#include "lllsample/rng.hpp"

namespace lllsample {

namespace {

using Partition = ProjectionScheme::Partition;

AtomicCSP cnf(std::string_view text) { return parse_dimacs(text).csp; }

// Binary scheme: the listed variables are fully projected, the rest keep
// their identity.
ProjectionScheme marking(const AtomicCSP& csp, const std::set<VarId>& marked) {
  std::vector<Partition> parts;
  for (VarId v = 0; v < csp.num_vars(); ++v) {
    const auto a = csp.alphabet_size(v);
    parts.push_back(ProjectionScheme::contiguous_partition(
        a, marked.count(v) ? 1u : a));
  }
  return ProjectionScheme(csp.alphabet_sizes(), parts);
}

ProjectionScheme with_blocks(const AtomicCSP& csp, std::vector<Partition> parts) {
  return ProjectionScheme(csp.alphabet_sizes(), parts);
}

BundledInstance cnf3_chain() {
  auto csp = cnf(
      "p cnf 3 2\n"
      "1 2 0\n"
      "-2 3 0\n");
  auto scheme = ProjectionScheme::identity(csp);
  return {"cnf3-chain", csp, scheme};
}

BundledInstance cnf4_2sat() {
  auto csp = cnf(
      "p cnf 4 3\n"
      "1 2 0\n"
      "-2 3 0\n"
      "-3 -4 0\n");
  return {"cnf4-2sat", csp, marking(csp, {1})};
}

BundledInstance cnf5_3sat() {
  auto csp = cnf(
      "p cnf 5 4\n"
      "1 2 3 0\n"
      "-1 4 5 0\n"
      "-2 -4 5 0\n"
      "3 -5 1 0\n");
  return {"cnf5-3sat", csp, marking(csp, {0, 3})};
}

BundledInstance cnf6_3sat() {
  auto csp = cnf(
      "p cnf 6 6\n"
      "1 -2 3 0\n"
      "2 4 -5 0\n"
      "-3 5 6 0\n"
      "-1 -4 -6 0\n"
      "2 3 6 0\n"
      "-5 1 4 0\n");
  return {"cnf6-3sat", csp, ProjectionScheme::identity(csp)};
}

BundledInstance cnf8_4sat() {
  auto csp = cnf(
      "p cnf 8 6\n"
      "1 2 -3 4 0\n"
      "-2 5 6 -7 0\n"
      "3 -4 7 8 0\n"
      "-1 -5 -6 8 0\n"
      "2 4 6 8 0\n"
      "-1 -3 5 -7 0\n");
  return {"cnf8-4sat", csp, marking(csp, {0, 2, 4, 6})};
}

BundledInstance cnf9_3sat() {
  auto csp = cnf(
      "p cnf 9 6\n"
      "1 2 3 0\n"
      "-3 4 5 0\n"
      "-5 6 7 0\n"
      "-7 8 9 0\n"
      "-9 -1 4 0\n"
      "-2 6 -8 0\n");
  return {"cnf9-3sat", csp, marking(csp, {1, 4, 7})};
}

BundledInstance cnf12_4sat() {
  auto csp = cnf(
      "p cnf 12 6\n"
      "1 2 3 4 0\n"
      "-4 5 6 7 0\n"
      "-7 8 9 10 0\n"
      "-10 11 12 -1 0\n"
      "2 -5 -8 11 0\n"
      "3 -6 9 -12 0\n");
  return {"cnf12-4sat", csp, marking(csp, {0, 3, 6, 9})};
}

BundledInstance hyp5_3col() {
  Hypergraph h{5, {{0, 1, 2}, {2, 3, 4}, {0, 3, 4}}};
  auto csp = build_coloring_csp(h, 3);
  // (1,2) partitions with the singleton rotating over the colours.
  std::vector<Partition> parts;
  for (VarId v = 0; v < 5; ++v) {
    const Value s = v % 3;
    Partition p{{s}, {}};
    for (Value c = 0; c < 3; ++c) {
      if (c != s) p[1].push_back(c);
    }
    parts.push_back(p);
  }
  return {"hyp5-3col", csp, with_blocks(csp, parts)};
}

BundledInstance hyp4_4col() {
  Hypergraph h{4, {{0, 1, 2}, {1, 2, 3}}};
  auto csp = build_coloring_csp(h, 4);
  std::vector<Partition> parts(4, ProjectionScheme::contiguous_partition(4, 2));
  return {"hyp4-4col", csp, with_blocks(csp, parts)};
}

BundledInstance mixed7() {
  const std::vector<std::uint32_t> alphabets{2, 3, 4, 5, 2, 3, 4};
  std::vector<AtomicConstraint> cons{
      {{0, 1, 2}, {0, 1, 3}},
      {{1, 2, 3}, {2, 0, 4}},
      {{2, 3, 4}, {1, 2, 1}},
      {{3, 4, 5}, {0, 0, 2}},
      {{4, 5, 6}, {1, 1, 0}},
      {{0, 5, 6}, {1, 0, 3}},
      {{1, 3, 6}, {0, 3, 2}},
      {{0, 2}, {1, 0}},
  };
  AtomicCSP csp(alphabets, cons);
  std::vector<Partition> parts{
      {{0}, {1}},
      {{0}, {1, 2}},
      {{0, 1}, {2, 3}},
      {{0, 1, 2}, {3, 4}},
      {{0, 1}},
      {{1}, {0, 2}},
      {{0, 3}, {1, 2}},
  };
  return {"mixed7", csp, with_blocks(csp, parts)};
}

// Marginal-bound instances.

BundledInstance cnf9_5sat_marked() {
  auto csp = cnf(
      "p cnf 9 3\n"
      "1 2 3 4 5 0\n"
      "-5 6 -7 8 1 0\n"
      "-8 9 2 -6 -3 0\n");
  // Four marked variables per clause, b = 1/16 and Delta = 3.
  return {"cnf9-5sat-marked", csp, marking(csp, {0, 1, 2, 3, 5, 6, 7})};
}

BundledInstance hyp4_16col_halves() {
  Hypergraph h{4, {{0, 1, 2}, {1, 2, 3}}};
  auto csp = build_coloring_csp(h, 16);
  std::vector<Partition> parts(4, ProjectionScheme::contiguous_partition(16, 2));
  return {"hyp4-16col-halves", csp, with_blocks(csp, parts)};
}

BundledInstance hyp3_64col_marked() {
  Hypergraph h{3, {{0, 1, 2}}};
  auto csp = build_coloring_csp(h, 64);
  return {"hyp3-64col-marked", csp,
          ProjectionScheme::full_marking(csp)};
}

BundledInstance free4_31() {
  AtomicCSP csp({4, 4}, {});
  std::vector<Partition> parts(2, Partition{{0, 1, 2}, {3}});
  return {"free4-31", csp, with_blocks(csp, parts)};
}

}  // namespace

std::vector<BundledInstance> sampling_corpus() {
  return {cnf3_chain(), cnf4_2sat(), cnf5_3sat(),  cnf6_3sat(),  cnf8_4sat(),
          cnf9_3sat(),  cnf12_4sat(), hyp5_3col(), hyp4_4col(), mixed7()};
}

std::vector<BundledInstance> conditional_corpus() {
  return {cnf3_chain(), cnf4_2sat(), cnf5_3sat(), hyp4_4col()};
}

std::vector<BundledInstance> marginal_bound_corpus() {
  return {cnf9_5sat_marked(), hyp4_16col_halves(), hyp3_64col_marked(),
          free4_31()};
}

BundledInstance bundled_instance(const std::string& name) {
  for (auto* corpus : {&sampling_corpus, &conditional_corpus,
                       &marginal_bound_corpus}) {
    for (auto& inst : (*corpus)()) {
      if (inst.name == name) return inst;
    }
  }
  throw std::invalid_argument("no bundled instance named '" + name + "'");
}

AtomicCSP hub_instance(std::uint32_t alphabet, std::size_t k, std::size_t delta,
                       std::uint64_t seed) {
  if (k < 2 || delta < 1) throw std::invalid_argument("hub needs k >= 2");
  Rng rng(seed);
  const std::size_t n = 1 + delta * (k - 1);
  std::vector<AtomicConstraint> cons;
  VarId next = 1;
  for (std::size_t c = 0; c < delta; ++c) {
    AtomicConstraint con;
    con.vars.push_back(0);
    for (std::size_t i = 1; i < k; ++i) con.vars.push_back(next++);
    for (std::size_t i = 0; i < k; ++i) {
      con.forbidden.push_back(static_cast<Value>(rng.below(alphabet)));
    }
    cons.push_back(std::move(con));
  }
  return AtomicCSP(std::vector<std::uint32_t>(n, alphabet), cons);
}

AtomicCSP random_uniform_instance(std::size_t n, std::size_t m, std::size_t k,
                                  std::uint32_t alphabet, std::uint64_t seed) {
  if (k > n) throw std::invalid_argument("width exceeds variable count");
  Rng rng(seed);
  std::vector<VarId> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  std::vector<AtomicConstraint> cons;
  for (std::size_t c = 0; c < m; ++c) {
    // Partial Fisher-Yates for k distinct variables.
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(ids[i], ids[i + rng.below(n - i)]);
    }
    AtomicConstraint con;
    con.vars.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(con.vars.begin(), con.vars.end());
    for (std::size_t i = 0; i < k; ++i) {
      con.forbidden.push_back(static_cast<Value>(rng.below(alphabet)));
    }
    cons.push_back(std::move(con));
  }
  return AtomicCSP(std::vector<std::uint32_t>(n, alphabet), cons);
}

AtomicCSP random_sparse_3cnf(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<VarId> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  std::vector<AtomicConstraint> cons;
  auto clause = [&](VarId a, VarId b, VarId c) {
    AtomicConstraint con;
    con.vars = {a, b, c};
    for (int i = 0; i < 3; ++i) con.forbidden.push_back(static_cast<Value>(rng.below(2)));
    cons.push_back(std::move(con));
  };
  // Groups of five variables carry two clauses sharing the middle variable;
  // a trailing group of three or four carries a single clause.
  std::size_t i = 0;
  for (; i + 5 <= n; i += 5) {
    clause(perm[i], perm[i + 1], perm[i + 2]);
    clause(perm[i + 2], perm[i + 3], perm[i + 4]);
  }
  if (n - i >= 3) clause(perm[i], perm[i + 1], perm[i + 2]);
  return AtomicCSP(std::vector<std::uint32_t>(n, 2), cons);
}

}  // namespace lllsample
