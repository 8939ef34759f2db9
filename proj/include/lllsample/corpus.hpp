#pragma once

#include <string>
#include <vector>

#include "lllsample/csp.hpp"
#include "lllsample/projection.hpp"

namespace lllsample {

/// A small instance shipped with the library, with a hand-picked projection
/// scheme. Every bundled instance is satisfiable and enumerable.
struct BundledInstance {
  std::string name;
  AtomicCSP csp;
  ProjectionScheme scheme;
};

/// Ten instances with 3-12 variables: CNFs, hypergraph colourings and a
/// mixed-alphabet CSP, each with a nontrivial scheme.
std::vector<BundledInstance> sampling_corpus();

/// Instances small enough that every conditioning state and every lift can
/// be checked exhaustively (lift cubes of at most 16 points).
std::vector<BundledInstance> conditional_corpus();

/// Instances with e * b * Delta <= 1, some of them fully admissible.
std::vector<BundledInstance> marginal_bound_corpus();

/// Looks up a bundled instance by name across all corpora.
/// Throws std::invalid_argument if there is none.
BundledInstance bundled_instance(const std::string& name);

/// A CSP with |vbl(C)| = k, alphabet A and degree exactly Delta: Delta
/// constraints share variable 0 and are otherwise disjoint. Forbidden values
/// are drawn from `seed`.
AtomicCSP hub_instance(std::uint32_t alphabet, std::size_t k, std::size_t delta,
                       std::uint64_t seed);

/// m random constraints of width k over n variables with alphabet A.
AtomicCSP random_uniform_instance(std::size_t n, std::size_t m, std::size_t k,
                                  std::uint32_t alphabet, std::uint64_t seed);

/// Random 3-CNF on n variables in which each clause shares a variable with
/// at most one other clause, so Delta <= 2 and e * (1/8) * Delta <= 1.
AtomicCSP random_sparse_3cnf(std::size_t n, std::uint64_t seed);

}  // namespace lllsample
