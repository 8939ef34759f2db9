#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "lllsample/csp.hpp"
#include "lllsample/projection.hpp"

namespace lllsample {

/// Largest state space the enumerators accept.
inline constexpr std::uint64_t kEnumerationLimit = std::uint64_t{1} << 24;

/// Size of prod |Omega_v|, saturating at UINT64_MAX.
std::uint64_t state_space_size(const std::vector<std::uint32_t>& alphabets);

/// Visits every x in prod {0..alphabets[v]-1} in lexicographic order.
/// Throws GuardError above `limit`.
void for_each_assignment(const std::vector<std::uint32_t>& alphabets,
                         const std::function<void(const Assignment&)>& visit,
                         std::uint64_t limit = kEnumerationLimit);

/// All satisfying assignments, lexicographically ordered.
std::vector<Assignment> enumerate_satisfying(
    const AtomicCSP& csp, std::uint64_t limit = kEnumerationLimit);

std::uint64_t count_satisfying(const AtomicCSP& csp,
                               std::uint64_t limit = kEnumerationLimit);

/// A finite distribution with rational weights: P[support[i]] =
/// weight[i] / total. The support is sorted and free of duplicates.
struct ExactDistribution {
  std::vector<Assignment> support;
  std::vector<std::uint64_t> weight;
  std::uint64_t total = 0;

  std::size_t size() const { return support.size(); }
  double probability(std::size_t i) const {
    return static_cast<double>(weight[i]) / static_cast<double>(total);
  }
  /// Probability of x; 0 outside the support.
  double probability_of(const Assignment& x) const;

  /// Builds from unnormalized counts, dropping zero weights.
  static ExactDistribution from_counts(
      const std::map<Assignment, std::uint64_t>& counts);
};

/// Uniform distribution on satisfying assignments.
ExactDistribution exact_mu(const AtomicCSP& csp,
                           std::uint64_t limit = kEnumerationLimit);

/// mu_pi: pushforward of the uniform satisfying distribution through pi.
ExactDistribution exact_mu_pi(const AtomicCSP& csp,
                              const ProjectionScheme& scheme,
                              std::uint64_t limit = kEnumerationLimit);

struct ProjectedConditional {
  /// weight[q] / total = mu_pi[value(v) = q | Z].
  std::vector<std::uint64_t> weight;
  std::uint64_t total = 0;
  std::vector<double> probability;
  /// (1-3b)^-Delta * P_pi[value(v) = q]; +inf when 3b >= 1.
  std::vector<double> bound;
  /// e * b * Delta <= 1, the hypothesis of the marginal bound.
  bool bound_applicable = false;
  /// probability[q] <= bound[q] for every q (up to 1e-12 relative).
  bool bound_holds = false;
};

/// mu_pi[value(v) = . | Z] where z gives Y(u) for every u != v (z[v] is
/// ignored). Throws std::invalid_argument when Z has probability 0.
ProjectedConditional exact_projected_conditional(
    const AtomicCSP& csp, const ProjectionScheme& scheme, VarId v,
    const Assignment& z, std::uint64_t limit = kEnumerationLimit);

/// mu[. | pi(X) = y]: uniform over satisfying x in the preimage cube of y.
/// Throws std::invalid_argument when no satisfying x projects to y.
ExactDistribution exact_lift_conditional(const AtomicCSP& csp,
                                         const ProjectionScheme& scheme,
                                         const Assignment& y,
                                         std::uint64_t limit = kEnumerationLimit);

using Histogram = std::map<Assignment, std::uint64_t>;

/// 1/2 sum_x |freq(x) - exact(x)| over the union of supports.
double tv_empirical(const Histogram& samples, const ExactDistribution& exact);
double tv_empirical(const std::vector<Assignment>& samples,
                    const ExactDistribution& exact);

}  // namespace lllsample
