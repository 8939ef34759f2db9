#include "lllsample/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lllsample/error.hpp"

namespace lllsample {

std::uint64_t state_space_size(const std::vector<std::uint32_t>& alphabets) {
  std::uint64_t size = 1;
  for (auto a : alphabets) {
    if (a != 0 && size > UINT64_MAX / a) return UINT64_MAX;
    size *= a;
  }
  return size;
}

void for_each_assignment(const std::vector<std::uint32_t>& alphabets,
                         const std::function<void(const Assignment&)>& visit,
                         std::uint64_t limit) {
  const auto size = state_space_size(alphabets);
  if (size > limit) {
    throw GuardError("state space of " +
                     (size == UINT64_MAX ? std::string("> 2^64")
                                         : std::to_string(size)) +
                     " assignments exceeds the enumeration limit " +
                     std::to_string(limit));
  }
  for (auto a : alphabets) {
    if (a == 0) return;
  }
  Assignment x(alphabets.size(), 0);
  while (true) {
    visit(x);
    std::size_t i = x.size();
    while (i > 0) {
      --i;
      if (++x[i] < alphabets[i]) break;
      x[i] = 0;
      if (i == 0) return;
    }
    if (x.empty()) return;
  }
}

std::vector<Assignment> enumerate_satisfying(const AtomicCSP& csp,
                                             std::uint64_t limit) {
  std::vector<Assignment> out;
  for_each_assignment(
      csp.alphabet_sizes(),
      [&](const Assignment& x) {
        if (satisfies(csp, x)) out.push_back(x);
      },
      limit);
  return out;
}

std::uint64_t count_satisfying(const AtomicCSP& csp, std::uint64_t limit) {
  std::uint64_t count = 0;
  for_each_assignment(
      csp.alphabet_sizes(),
      [&](const Assignment& x) { count += satisfies(csp, x) ? 1 : 0; }, limit);
  return count;
}

double ExactDistribution::probability_of(const Assignment& x) const {
  auto it = std::lower_bound(support.begin(), support.end(), x);
  if (it == support.end() || *it != x) return 0.0;
  return probability(static_cast<std::size_t>(it - support.begin()));
}

ExactDistribution ExactDistribution::from_counts(
    const std::map<Assignment, std::uint64_t>& counts) {
  ExactDistribution d;
  for (const auto& [x, w] : counts) {
    if (w == 0) continue;
    d.support.push_back(x);
    d.weight.push_back(w);
    d.total += w;
  }
  return d;
}

ExactDistribution exact_mu(const AtomicCSP& csp, std::uint64_t limit) {
  ExactDistribution d;
  d.support = enumerate_satisfying(csp, limit);
  d.weight.assign(d.support.size(), 1);
  d.total = d.support.size();
  return d;
}

ExactDistribution exact_mu_pi(const AtomicCSP& csp,
                              const ProjectionScheme& scheme,
                              std::uint64_t limit) {
  std::map<Assignment, std::uint64_t> counts;
  for (const auto& x : enumerate_satisfying(csp, limit)) {
    ++counts[project(scheme, x)];
  }
  return ExactDistribution::from_counts(counts);
}

ProjectedConditional exact_projected_conditional(
    const AtomicCSP& csp, const ProjectionScheme& scheme, VarId v,
    const Assignment& z, std::uint64_t limit) {
  if (v >= csp.num_vars() || z.size() != csp.num_vars()) {
    throw std::invalid_argument("conditioning state does not match the CSP");
  }
  ProjectedConditional out;
  const auto blocks = scheme.num_blocks(v);
  out.weight.assign(blocks, 0);
  for (const auto& x : enumerate_satisfying(csp, limit)) {
    bool match = true;
    for (VarId u = 0; u < x.size() && match; ++u) {
      if (u != v && scheme.project(u, x[u]) != z[u]) match = false;
    }
    if (!match) continue;
    ++out.weight[scheme.project(v, x[v])];
    ++out.total;
  }
  if (out.total == 0) {
    throw std::invalid_argument("conditioning event has probability 0");
  }
  const auto b = compute_b(csp, scheme).b;
  const double delta =
      static_cast<double>(std::max<std::size_t>(degree_stats(csp).max_degree, 1));
  out.bound_applicable = std::exp(1.0) * b * delta <= 1.0;
  out.bound_holds = true;
  for (Value q = 0; q < blocks; ++q) {
    const double p = static_cast<double>(out.weight[q]) / out.total;
    const double marginal =
        static_cast<double>(scheme.block_size(v, q)) / scheme.alphabet_size(v);
    const double bound = 3.0 * b < 1.0
                             ? std::pow(1.0 - 3.0 * b, -delta) * marginal
                             : INFINITY;
    out.probability.push_back(p);
    out.bound.push_back(bound);
    if (p > bound * (1.0 + 1e-12)) out.bound_holds = false;
  }
  return out;
}

ExactDistribution exact_lift_conditional(const AtomicCSP& csp,
                                         const ProjectionScheme& scheme,
                                         const Assignment& y,
                                         std::uint64_t limit) {
  if (y.size() != csp.num_vars()) {
    throw std::invalid_argument("projected state does not match the CSP");
  }
  std::vector<std::uint32_t> sizes;
  for (VarId v = 0; v < y.size(); ++v) {
    if (y[v] >= scheme.num_blocks(v)) {
      throw std::invalid_argument("projected value out of range");
    }
    sizes.push_back(scheme.block_size(v, y[v]));
  }
  ExactDistribution d;
  Assignment x(y.size());
  for_each_assignment(
      sizes,
      [&](const Assignment& idx) {
        for (VarId v = 0; v < idx.size(); ++v) x[v] = scheme.block(v, y[v])[idx[v]];
        if (satisfies(csp, x)) d.support.push_back(x);
      },
      limit);
  if (d.support.empty()) {
    throw std::invalid_argument("no satisfying assignment projects to y");
  }
  std::sort(d.support.begin(), d.support.end());
  d.weight.assign(d.support.size(), 1);
  d.total = d.support.size();
  return d;
}

double tv_empirical(const Histogram& samples, const ExactDistribution& exact) {
  std::uint64_t n = 0;
  for (const auto& [x, c] : samples) n += c;
  if (n == 0) throw std::invalid_argument("no samples");
  double sum = 0.0;
  double covered = 0.0;  // exact mass of support points seen in samples
  for (const auto& [x, c] : samples) {
    const double p = exact.probability_of(x);
    covered += p;
    sum += std::fabs(static_cast<double>(c) / static_cast<double>(n) - p);
  }
  // Support points never sampled contribute their full mass.
  sum += std::max(0.0, 1.0 - covered);
  return 0.5 * sum;
}

double tv_empirical(const std::vector<Assignment>& samples,
                    const ExactDistribution& exact) {
  Histogram h;
  for (const auto& x : samples) ++h[x];
  return tv_empirical(h, exact);
}

}  // namespace lllsample
