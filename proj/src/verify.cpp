#include "lllsample/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "lllsample/counting.hpp"
#include "lllsample/dynamics.hpp"
#include "lllsample/oracle.hpp"
#include "lllsample/two_tree.hpp"

namespace lllsample {

namespace {

// TV between counts over {0..k-1} and an exact law given by weights.
double tv_counts(const std::vector<std::uint64_t>& counts, std::uint64_t n,
                 const std::vector<std::uint64_t>& weight, std::uint64_t total) {
  if (n == 0) return 1.0;
  double s = 0.0;
  for (std::size_t q = 0; q < counts.size(); ++q) {
    s += std::abs(static_cast<double>(counts[q]) / static_cast<double>(n) -
                  static_cast<double>(weight[q]) / static_cast<double>(total));
  }
  return s / 2.0;
}

// Every (v, z) with z = y except at v, for y in the support of mu_pi.
// z[v] is normalized to 0 so each pair appears once.
std::set<std::pair<VarId, Assignment>> conditioning_pairs(
    const ExactDistribution& mu_pi) {
  std::set<std::pair<VarId, Assignment>> pairs;
  for (const auto& y : mu_pi.support) {
    for (VarId v = 0; v < y.size(); ++v) {
      Assignment z = y;
      z[v] = 0;
      pairs.emplace(v, std::move(z));
    }
  }
  return pairs;
}

nlohmann::json entry(const std::string& name, bool pass, nlohmann::json detail) {
  return {{"name", name}, {"pass", pass}, {"detail", std::move(detail)}};
}

}  // namespace

StepCheck check_sample_step(const BundledInstance& inst, double eps,
                            std::uint64_t draws, std::uint64_t seed) {
  const auto cfg = SamplerConfig::for_instance(inst.csp, inst.scheme, eps);
  Sampler sampler(inst.csp, inst.scheme, cfg);
  const auto mu_pi = exact_mu_pi(inst.csp, inst.scheme);
  StepCheck out;
  out.draws = draws;
  std::uint64_t index = 0;
  for (const auto& [v, z] : conditioning_pairs(mu_pi)) {
    const auto exact = exact_projected_conditional(inst.csp, inst.scheme, v, z);
    ProjectedState state(sampler.model(), z);
    Rng rng(stream_seed(seed, index++));
    std::vector<std::uint64_t> counts(exact.weight.size(), 0);
    std::uint64_t good = 0;
    for (std::uint64_t i = 0; i < draws; ++i) {
      const auto r = sampler.sample_step(state, v, rng);
      if (r.failure != StepFailure::kNone) {
        ++out.failures;
        continue;
      }
      ++counts[r.value];
      ++good;
    }
    out.max_tv = std::max(out.max_tv,
                          tv_counts(counts, good, exact.weight, exact.total));
    ++out.pairs;
  }
  return out;
}

LiftCheck check_inv_sample(const BundledInstance& inst, double eps,
                           std::uint64_t draws, std::uint64_t seed) {
  const auto cfg = SamplerConfig::for_instance(inst.csp, inst.scheme, eps);
  Sampler sampler(inst.csp, inst.scheme, cfg);
  const auto mu_pi = exact_mu_pi(inst.csp, inst.scheme);
  LiftCheck out;
  out.draws = draws;
  std::uint64_t index = 0;
  for (const auto& y : mu_pi.support) {
    const auto exact = exact_lift_conditional(inst.csp, inst.scheme, y);
    ProjectedState state(sampler.model(), y);
    Rng rng(stream_seed(seed, index++));
    Histogram hist;
    for (std::uint64_t i = 0; i < draws; ++i) {
      auto lift = sampler.inv_sample(state, rng);
      if (!lift.x) {
        ++out.failures;
        continue;
      }
      ++hist[*lift.x];
    }
    out.max_tv = std::max(out.max_tv, tv_empirical(hist, exact));
    ++out.states;
  }
  return out;
}

double UniformityCheck::failure_rate() const {
  const auto calls = sample_calls + samples;
  return calls == 0 ? 0.0
                    : static_cast<double>(s1 + s2 + errors) /
                          static_cast<double>(calls);
}

nlohmann::json UniformityCheck::to_json() const {
  return {{"samples", samples},
          {"errors", errors},
          {"failed_runs", failed_runs},
          {"steps", steps},
          {"sample_calls", sample_calls},
          {"s1", s1},
          {"s2", s2},
          {"failure_rate", failure_rate()},
          {"tv", tv}};
}

UniformityCheck check_uniformity(const BundledInstance& inst, double eps,
                                 std::uint64_t samples, std::uint64_t seed,
                                 double c_t) {
  const auto cfg = SamplerConfig::for_instance(inst.csp, inst.scheme, eps, c_t);
  Sampler sampler(inst.csp, inst.scheme, cfg);
  const auto mu = exact_mu(inst.csp);
  UniformityCheck out;
  out.samples = samples;
  Histogram hist;
  for (std::uint64_t i = 0; i < samples; ++i) {
    Rng rng(stream_seed(seed, i));
    auto run = sampler.run(rng);
    out.steps += run.chain.steps;
    for (auto c : run.chain.component_histogram) out.sample_calls += c;
    out.s1 += run.chain.s1;
    out.s2 += run.chain.s2;
    if (!run.x) ++out.errors;
    if (!run.x || run.chain.s1 + run.chain.s2 > 0) ++out.failed_runs;
    if (run.x) ++hist[*run.x];
  }
  out.tv = tv_empirical(hist, mu);
  return out;
}

MarginalBoundCheck check_marginal_bound(const BundledInstance& inst) {
  MarginalBoundCheck out;
  const auto mu_pi = exact_mu_pi(inst.csp, inst.scheme);
  for (const auto& [v, z] : conditioning_pairs(mu_pi)) {
    const auto cond = exact_projected_conditional(inst.csp, inst.scheme, v, z);
    out.applicable = cond.bound_applicable;
    ++out.pairs;
    if (!cond.bound_holds) ++out.violations;
    for (std::size_t q = 0; q < cond.probability.size(); ++q) {
      out.max_ratio = std::max(out.max_ratio, cond.probability[q] / cond.bound[q]);
    }
  }
  return out;
}

nlohmann::json run_verification(const VerifyOptions& options) {
  nlohmann::json checks = nlohmann::json::array();
  const double slack = 4.0 / std::sqrt(static_cast<double>(options.draws));

  for (const auto& inst : sampling_corpus()) {
    const auto mu_pi = exact_mu_pi(inst.csp, inst.scheme);
    std::uint64_t sum = 0;
    for (auto w : mu_pi.weight) sum += w;
    // Per-variable projected marginals, from mu_pi and from the raw
    // satisfying set.
    std::map<std::pair<VarId, Value>, std::uint64_t> from_pi, direct;
    for (std::size_t i = 0; i < mu_pi.size(); ++i) {
      for (VarId v = 0; v < mu_pi.support[i].size(); ++v) {
        from_pi[{v, mu_pi.support[i][v]}] += mu_pi.weight[i];
      }
    }
    const auto sat = enumerate_satisfying(inst.csp);
    for (const auto& x : sat) {
      for (VarId v = 0; v < x.size(); ++v) {
        ++direct[{v, inst.scheme.project(v, x[v])}];
      }
    }
    checks.push_back(entry("mu-pi-marginals/" + inst.name,
                           sum == mu_pi.total && mu_pi.total == sat.size() &&
                               from_pi == direct,
                           {{"total", mu_pi.total}}));
  }
  for (const auto& inst : marginal_bound_corpus()) {
    const auto r = check_marginal_bound(inst);
    checks.push_back(entry("marginal-bound/" + inst.name,
                           r.applicable && r.violations == 0,
                           {{"pairs", r.pairs},
                            {"violations", r.violations},
                            {"max_ratio", r.max_ratio}}));
  }
  for (const auto& inst : conditional_corpus()) {
    const auto s = check_sample_step(inst, options.eps, options.draws, options.seed);
    checks.push_back(entry("sample-step/" + inst.name, s.max_tv <= slack,
                           {{"pairs", s.pairs},
                            {"failures", s.failures},
                            {"max_tv", s.max_tv},
                            {"threshold", slack}}));
    const auto l = check_inv_sample(inst, options.eps, options.draws, options.seed);
    checks.push_back(entry("inv-sample/" + inst.name, l.max_tv <= 2.0 * slack,
                           {{"states", l.states},
                            {"failures", l.failures},
                            {"max_tv", l.max_tv},
                            {"threshold", 2.0 * slack}}));
  }
  for (const char* name : {"cnf3-chain", "hyp4-4col"}) {
    const auto inst = bundled_instance(name);
    const auto u = check_uniformity(inst, options.eps, options.draws, options.seed);
    const double threshold = options.eps + 2.0 * slack;
    auto detail = u.to_json();
    detail["threshold"] = threshold;
    checks.push_back(entry(std::string("main-sample/") + name,
                           u.tv <= threshold, detail));
  }
  for (const auto& inst : sampling_corpus()) {
    const auto exact = static_cast<double>(count_satisfying(inst.csp));
    const auto est = approx_count(inst.csp, inst.scheme, 0.2, options.seed);
    const bool pass = est.ok() && est.estimate() <= 1.2 * exact &&
                      est.estimate() >= exact / 1.2;
    checks.push_back(entry("count/" + inst.name, pass,
                           {{"exact", exact},
                            {"estimate", est.ok() ? est.estimate() : 0.0}}));
  }
  {
    // Path 0-1-2-3-4-5-6: greedy from an end, then every bound with ell >= 2.
    Graph path(7);
    for (std::uint32_t i = 0; i + 1 < 7; ++i) path.add_edge(i, i + 1);
    const auto tree = greedy_2tree(path, {0, 1, 2, 3, 4, 5, 6}, 0);
    const bool greedy_ok = is_2tree(path, tree) && tree.size() * 3 >= 7;
    bool bound_ok = true;
    for (std::size_t ell = 2; ell <= 5; ++ell) {
      bound_ok &= static_cast<double>(count_2trees(path, 0, ell)) <=
                  two_tree_bound(path.max_degree(), ell);
    }
    checks.push_back(entry("two-trees/path7", greedy_ok && bound_ok,
                           {{"greedy_size", tree.size()}}));
  }

  bool all = true;
  for (const auto& c : checks) all = all && c["pass"].get<bool>();
  return {{"checks", checks}, {"pass", all}, {"seed", options.seed},
          {"draws", options.draws}, {"eps", options.eps}};
}

}  // namespace lllsample
