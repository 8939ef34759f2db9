#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lllsample/corpus.hpp"
#include "lllsample/dynamics.hpp"
#include "lllsample/formats.hpp"
#include "lllsample/oracle.hpp"

namespace lllsample {
namespace {

// Binary x0, x1, x2 with x2 fully marked: the projected CSP keeps one
// constraint on (x0, x1) and one on x1 alone.
struct SmallInstance {
  AtomicCSP csp{{2, 2, 2}, {{{0, 1, 2}, {0, 0, 0}}, {{1, 2}, {1, 1}}}};
  ProjectionScheme scheme{{2, 2, 2}, {{{0}, {1}}, {{0}, {1}}, {{0, 1}}}};
};

SamplerConfig config_for(const AtomicCSP& csp, const ProjectionScheme& s,
                         double eps = 0.1) {
  return SamplerConfig::for_instance(csp, s, eps);
}

double tv(const std::vector<std::uint64_t>& counts, const std::vector<double>& p) {
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(counts[i] / n - p[i]);
  return s / 2.0;
}

TEST(SamplerConfig, ScheduleArithmetic) {
  const auto cfg = SamplerConfig::derive(10, 5, 20.0, 0.5, 0.25);
  EXPECT_EQ(cfg.T, 922u);
  EXPECT_EQ(cfg.T, static_cast<std::uint64_t>(std::ceil(200 * std::log(100.0))));
  EXPECT_EQ(cfg.S, 268u);
  EXPECT_NEAR(cfg.theta_comp, 100 * std::log(400.0), 1e-9);
  EXPECT_DOUBLE_EQ(cfg.horizon(), 20000.0);

  const auto empty = SamplerConfig::derive(0, 0, 20.0, 0.1, 0.25);
  EXPECT_EQ(empty.T, 0u);
  EXPECT_EQ(empty.S, 0u);
  // Delta is floored at 1.
  EXPECT_EQ(SamplerConfig::derive(4, 0, 10.0, 0.1, 0.25).T,
            SamplerConfig::derive(4, 1, 10.0, 0.1, 0.25).T);
}

TEST(SamplerConfig, RejectsBadParameters) {
  EXPECT_THROW(SamplerConfig::derive(3, 1, 10.0, 0.0, 0.25), std::invalid_argument);
  EXPECT_THROW(SamplerConfig::derive(3, 1, 10.0, 0.6, 0.25), std::invalid_argument);
  EXPECT_THROW(SamplerConfig::derive(3, 1, 0.0, 0.1, 0.25), std::invalid_argument);
  EXPECT_NO_THROW(SamplerConfig::derive(3, 1, 10.0, 0.5, 0.25));
}

TEST(ProjectedState, IncrementalCountsStayConsistent) {
  for (const auto& inst : sampling_corpus()) {
    ProjectedModel model(inst.csp, inst.scheme);
    Rng rng(31);
    auto state = ProjectedState::random(model, rng);
    ASSERT_TRUE(state.consistent()) << inst.name;
    for (int i = 0; i < 2000; ++i) {
      const auto v = static_cast<VarId>(rng.below(model.num_vars()));
      state.set(v, static_cast<Value>(rng.below(inst.scheme.num_blocks(v))));
    }
    EXPECT_TRUE(state.consistent()) << inst.name;
    for (ConstraintId c = 0; c < model.num_constraints(); ++c) {
      const bool listed = std::count(state.unsat().begin(), state.unsat().end(), c) > 0;
      EXPECT_EQ(listed, state.unsatisfied(c));
    }
  }
}

// Component of v in the hypergraph of constraints unsatisfied by Y^{-v}, by
// fixed-point iteration.
std::pair<std::vector<VarId>, std::vector<ConstraintId>> brute_component(
    const AtomicCSP& csp, const ProjectionScheme& s, const std::vector<Value>& y,
    VarId v) {
  std::vector<ConstraintId> unsat;
  for (ConstraintId c = 0; c < csp.num_constraints(); ++c) {
    const auto& con = csp.constraint(c);
    bool all = true;
    for (std::size_t i = 0; i < con.size(); ++i) {
      if (con.vars[i] != v && y[con.vars[i]] != s.project(con.vars[i], con.forbidden[i]))
        all = false;
    }
    if (all) unsat.push_back(c);
  }
  std::vector<bool> in_var(csp.num_vars(), false), in_con(csp.num_constraints(), false);
  in_var[v] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (auto c : unsat) {
      if (in_con[c]) continue;
      for (auto u : csp.constraint(c).vars) {
        if (in_var[u]) {
          in_con[c] = changed = true;
          for (auto w : csp.constraint(c).vars) in_var[w] = true;
          break;
        }
      }
    }
  }
  std::pair<std::vector<VarId>, std::vector<ConstraintId>> out;
  for (VarId u = 0; u < csp.num_vars(); ++u)
    if (in_var[u]) out.first.push_back(u);
  for (auto c : unsat)
    if (in_con[c]) out.second.push_back(c);
  return out;
}

TEST(Explorer, SimpleCases) {
  // Chain 0-1-2-3-4, every clause forbids (0, 0).
  const AtomicCSP csp({2, 2, 2, 2, 2},
                      {{{0, 1}, {0, 0}}, {{1, 2}, {0, 0}}, {{2, 3}, {0, 0}}, {{3, 4}, {0, 0}}});
  const auto s = ProjectionScheme::identity(csp);
  ProjectedModel model(csp, s);
  ComponentExplorer explorer(model);
  ComponentView view;

  explorer.explore(ProjectedState(model, {0, 1, 1, 1, 1}), 0, 1e9, view);
  EXPECT_EQ(view.vars, std::vector<VarId>{0});
  EXPECT_TRUE(view.constraints.empty());

  explorer.explore(ProjectedState(model, {1, 0, 1, 1, 1}), 0, 1e9, view);
  std::sort(view.vars.begin(), view.vars.end());
  EXPECT_EQ(view.vars, (std::vector<VarId>{0, 1}));
  EXPECT_EQ(view.constraints, std::vector<ConstraintId>{0});

  explorer.explore(ProjectedState(model, {1, 0, 0, 0, 1}), 0, 1e9, view);
  std::sort(view.vars.begin(), view.vars.end());
  std::sort(view.constraints.begin(), view.constraints.end());
  EXPECT_EQ(view.vars, (std::vector<VarId>{0, 1, 2, 3}));
  EXPECT_EQ(view.constraints, (std::vector<ConstraintId>{0, 1, 2}));
  EXPECT_FALSE(view.oversized);

  explorer.explore(ProjectedState(model, {0, 0, 0, 0, 0}), 0, 2.5, view);
  EXPECT_TRUE(view.oversized);
}

TEST(Explorer, MatchesBruteForceClosure) {
  std::vector<BundledInstance> cases = sampling_corpus();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto csp = random_uniform_instance(14, 12, 3, 2, seed);
    cases.push_back({"random", csp, ProjectionScheme::identity(csp)});
  }
  for (const auto& inst : cases) {
    ProjectedModel model(inst.csp, inst.scheme);
    ComponentExplorer explorer(model);
    ComponentView view;
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      const auto state = ProjectedState::random(model, rng);
      const auto v = static_cast<VarId>(rng.below(model.num_vars()));
      explorer.explore(state, v, 1e9, view);
      auto [vars, cons] = brute_component(inst.csp, inst.scheme, state.y(), v);
      std::sort(view.vars.begin(), view.vars.end());
      std::sort(view.constraints.begin(), view.constraints.end());
      ASSERT_EQ(view.vars, vars) << inst.name;
      ASSERT_EQ(view.constraints, cons) << inst.name;
    }
  }
}

TEST(Explorer, AllComponentsCoverEveryUnsatisfiedConstraint) {
  const auto inst = bundled_instance("cnf12-4sat");
  ProjectedModel model(inst.csp, inst.scheme);
  ComponentExplorer explorer(model);
  std::vector<ComponentView> comps;
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto state = ProjectedState::random(model, rng);
    ASSERT_TRUE(explorer.all_components(state, 1e9, comps));
    std::vector<ConstraintId> seen;
    std::vector<int> owner(model.num_vars(), 0);
    for (const auto& c : comps) {
      seen.insert(seen.end(), c.constraints.begin(), c.constraints.end());
      for (auto u : c.vars) ++owner[u];
    }
    auto unsat = state.unsat();
    std::sort(unsat.begin(), unsat.end());
    std::sort(seen.begin(), seen.end());
    EXPECT_EQ(seen, unsat);
    for (int k : owner) EXPECT_LE(k, 1);
  }
}

TEST(SampleStep, EqualBlocksWithoutConstraintsAreUniform) {
  const AtomicCSP csp({4}, {});
  const ProjectionScheme s({4}, {{{0, 1}, {2, 3}}});
  Sampler sampler(csp, s, config_for(csp, s));
  ProjectedState state(sampler.model(), {0});
  Rng rng(1);
  std::vector<std::uint64_t> counts(2, 0);
  for (int i = 0; i < 100000; ++i) {
    const auto r = sampler.sample_step(state, 0, rng);
    ASSERT_EQ(r.failure, StepFailure::kNone);
    EXPECT_EQ(r.component_constraints, 0u);
    ++counts[r.value];
  }
  EXPECT_NEAR(counts[0] / 1e5, 0.5, 0.01);
}

TEST(SampleStep, UnequalBlocksFollowBlockSizes) {
  const AtomicCSP csp({4}, {});
  const ProjectionScheme s({4}, {{{0, 1, 2}, {3}}});
  Sampler sampler(csp, s, config_for(csp, s));
  ProjectedState state(sampler.model(), {1});
  Rng rng(2);
  std::vector<std::uint64_t> counts(2, 0);
  for (int i = 0; i < 100000; ++i) ++counts[sampler.sample_step(state, 0, rng).value];
  EXPECT_NEAR(counts[0] / 1e5, 0.75, 0.01);
  const double chi2 = std::pow(counts[0] - 75000.0, 2) / 75000.0 +
                      std::pow(counts[1] - 25000.0, 2) / 25000.0;
  EXPECT_LT(chi2, 10.83);
}

TEST(SampleStep, MatchesExactConditionalOnASmallInstance) {
  const SmallInstance inst;
  Sampler sampler(inst.csp, inst.scheme, config_for(inst.csp, inst.scheme));
  const auto mu_pi = exact_mu_pi(inst.csp, inst.scheme);
  Rng rng(3);
  int checked = 0;
  for (const auto& y : mu_pi.support) {
    for (VarId v = 0; v < 3; ++v) {
      if (inst.scheme.num_blocks(v) == 1) continue;
      const auto exact = exact_projected_conditional(inst.csp, inst.scheme, v, y);
      ProjectedState state(sampler.model(), y);
      std::vector<std::uint64_t> counts(exact.weight.size(), 0);
      for (int i = 0; i < 100000; ++i) {
        const auto r = sampler.sample_step(state, v, rng);
        ASSERT_EQ(r.failure, StepFailure::kNone);
        ++counts[r.value];
      }
      EXPECT_LE(tv(counts, exact.probability), 0.01);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(SampleStep, SingleBlockVariableIsANoOp) {
  const SmallInstance inst;
  Sampler sampler(inst.csp, inst.scheme, config_for(inst.csp, inst.scheme));
  ProjectedState state(sampler.model(), {1, 0, 0});
  Rng rng(4);
  const auto before = rng.state();
  const auto r = sampler.sample_step(state, 2, rng);
  EXPECT_EQ(r.value, 0u);
  EXPECT_EQ(r.failure, StepFailure::kNone);
  EXPECT_EQ(rng.state(), before);
}

TEST(SampleStep, OversizedComponentIsS1) {
  const AtomicCSP csp({2, 2, 2, 2},
                      {{{0, 1}, {0, 0}}, {{1, 2}, {0, 0}}, {{2, 3}, {0, 0}}});
  const auto s = ProjectionScheme::identity(csp);
  auto cfg = config_for(csp, s);
  cfg.theta_comp = 1.5;
  Sampler sampler(csp, s, cfg);
  ProjectedState state(sampler.model(), {0, 0, 0, 0});
  Rng rng(5);
  EXPECT_EQ(sampler.sample_step(state, 1, rng).failure, StepFailure::kS1);
}

TEST(SampleStep, RejectionBudgetIsS2) {
  // The component of x1 holds both constraints; a round accepts only when
  // x0 = 1 and x1 = 1, so with S = 1 three steps in four fail.
  const AtomicCSP csp({2, 2}, {{{0}, {0}}, {{0, 1}, {1, 0}}});
  const ProjectionScheme s({2, 2}, {{{0, 1}}, {{0}, {1}}});
  auto cfg = config_for(csp, s);
  cfg.S = 1;
  Sampler sampler(csp, s, cfg);
  ProjectedState state(sampler.model(), {0, 0});
  Rng rng(6);
  int s2 = 0;
  for (int i = 0; i < 1000; ++i) {
    s2 += sampler.sample_step(state, 1, rng).failure == StepFailure::kS2;
  }
  EXPECT_GT(s2, 700);
  EXPECT_LT(s2, 800);
}

TEST(GlauberRun, ZeroStepsLeavesTheStateUnchanged) {
  const auto inst = bundled_instance("cnf5-3sat");
  auto cfg = SamplerConfig::for_instance(inst.csp, inst.scheme, 0.1, 0.0);
  ASSERT_EQ(cfg.T, 0u);
  Sampler sampler(inst.csp, inst.scheme, cfg);
  Rng rng(7);
  auto state = ProjectedState::random(sampler.model(), rng);
  const auto y0 = state.y();
  ChainDiagnostics diag;
  sampler.glauber_run(state, rng, diag);
  EXPECT_EQ(state.y(), y0);
  EXPECT_EQ(diag.steps, 0u);
}

TEST(GlauberRun, NoConstraintsGivesUniformCoordinates) {
  const AtomicCSP csp({2, 3, 4}, {});
  const ProjectionScheme s({2, 3, 4}, {{{0}, {1}}, {{0}, {1}, {2}}, {{0, 3}, {1, 2}}});
  Sampler sampler(csp, s, config_for(csp, s));
  Rng rng(8);
  const int runs = 10000;
  std::vector<std::vector<int>> counts{{0, 0}, {0, 0, 0}, {0, 0}};
  for (int r = 0; r < runs; ++r) {
    auto state = ProjectedState::random(sampler.model(), rng);
    ChainDiagnostics diag;
    sampler.glauber_run(state, rng, diag);
    for (VarId v = 0; v < 3; ++v) ++counts[v][state.y(v)];
  }
  for (const auto& c : counts) {
    const double p = 1.0 / c.size();
    const double sigma = std::sqrt(runs * p * (1 - p));
    for (int k : c) EXPECT_LE(std::abs(k - runs * p), 3 * sigma);
  }
}

TEST(GlauberRun, TwoSatChainApproachesMuPi) {
  const auto inst = bundled_instance("cnf4-2sat");
  const double eps = 0.05;
  Sampler sampler(inst.csp, inst.scheme, config_for(inst.csp, inst.scheme, eps));
  const auto mu_pi = exact_mu_pi(inst.csp, inst.scheme);
  Histogram hist;
  Rng rng(9);
  const int runs = 200000;
  for (int r = 0; r < runs; ++r) {
    auto state = ProjectedState::random(sampler.model(), rng);
    ChainDiagnostics diag;
    sampler.glauber_run(state, rng, diag);
    ++hist[state.y()];
  }
  const double noise = 3.0 * std::sqrt(static_cast<double>(hist.size()) / runs) / 2.0;
  EXPECT_LE(tv_empirical(hist, mu_pi), eps + noise);
}

TEST(InvSample, NoComponentLiftsEachBlockUniformly) {
  const auto inst = bundled_instance("hyp4-4col");
  Sampler sampler(inst.csp, inst.scheme, config_for(inst.csp, inst.scheme));
  const auto mu_pi = exact_mu_pi(inst.csp, inst.scheme);
  for (const auto& y : mu_pi.support) {
    ProjectedState state(sampler.model(), y);
    if (!state.unsat().empty()) continue;
    const auto exact = exact_lift_conditional(inst.csp, inst.scheme, y);
    std::uint64_t cube = 1;
    for (VarId v = 0; v < y.size(); ++v) cube *= inst.scheme.block_size(v, y[v]);
    ASSERT_EQ(exact.size(), cube);
    Rng rng(10);
    Histogram hist;
    for (int i = 0; i < 100000; ++i) {
      const auto lift = sampler.inv_sample(state, rng);
      ASSERT_TRUE(lift.x);
      ASSERT_TRUE(satisfies(inst.csp, *lift.x));
      ASSERT_EQ(project(inst.scheme, *lift.x), y);
      ++hist[*lift.x];
    }
    EXPECT_LE(tv_empirical(hist, exact), 0.01);
    return;
  }
  FAIL() << "no projected state without unsatisfied constraints";
}

TEST(InvSample, OversizedComponentIsI1) {
  const AtomicCSP csp({2, 2, 2}, {{{0, 1}, {0, 0}}, {{1, 2}, {0, 0}}});
  const ProjectionScheme s({2, 2, 2}, {{{0, 1}}, {{0, 1}}, {{0, 1}}});
  auto cfg = config_for(csp, s);
  cfg.theta_comp = 0.5;
  Sampler sampler(csp, s, cfg);
  ProjectedState state(sampler.model(), {0, 0, 0});
  Rng rng(11);
  const auto lift = sampler.inv_sample(state, rng);
  EXPECT_FALSE(lift.x);
  EXPECT_EQ(lift.error, "I1");
}

TEST(InvSample, RejectionBudgetIsI2) {
  const AtomicCSP csp({2, 2}, {{{0}, {0}}, {{0}, {1}}});
  const ProjectionScheme s({2, 2}, {{{0, 1}}, {{0, 1}}});
  auto cfg = config_for(csp, s);
  Sampler sampler(csp, s, cfg);
  ProjectedState state(sampler.model(), {0, 0});
  Rng rng(12);
  const auto lift = sampler.inv_sample(state, rng);
  EXPECT_FALSE(lift.x);
  EXPECT_EQ(lift.error, "I2");
  EXPECT_EQ(lift.rounds, cfg.S);
}

TEST(InvSample, MatchesExactLiftWithAComponent) {
  const SmallInstance inst;
  Sampler sampler(inst.csp, inst.scheme, config_for(inst.csp, inst.scheme));
  const auto mu_pi = exact_mu_pi(inst.csp, inst.scheme);
  int checked = 0;
  for (const auto& y : mu_pi.support) {
    ProjectedState state(sampler.model(), y);
    if (state.unsat().empty()) continue;
    const auto exact = exact_lift_conditional(inst.csp, inst.scheme, y);
    Rng rng(13);
    Histogram hist;
    for (int i = 0; i < 100000; ++i) {
      const auto lift = sampler.inv_sample(state, rng);
      ASSERT_TRUE(lift.x);
      ++hist[*lift.x];
    }
    EXPECT_LE(tv_empirical(hist, exact), 0.01);
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(MainSample, NoConstraintsIsUniform) {
  const AtomicCSP csp({2, 3, 5}, {});
  const ProjectionScheme s({2, 3, 5}, {{{0, 1}}, {{0}, {1, 2}}, {{0, 1}, {2, 3, 4}}});
  std::vector<std::vector<double>> counts{std::vector<double>(2),
                                          std::vector<double>(3),
                                          std::vector<double>(5)};
  const int samples = 100000;
  for (int i = 0; i < samples; ++i) {
    const auto r = main_sample(csp, s, 0.1, stream_seed(14, i));
    ASSERT_TRUE(r.x);
    for (VarId v = 0; v < 3; ++v) ++counts[v][(*r.x)[v]];
  }
  // Critical values at p = 0.001 for 1, 2 and 4 degrees of freedom.
  const double critical[] = {10.83, 13.82, 18.47};
  for (std::size_t v = 0; v < 3; ++v) {
    const double expected = samples / static_cast<double>(counts[v].size());
    double chi2 = 0.0;
    for (double c : counts[v]) chi2 += (c - expected) * (c - expected) / expected;
    EXPECT_LT(chi2, critical[v]) << "variable " << v;
  }
}

TEST(MainSample, SingleClauseIsCloseToUniform) {
  const auto csp = parse_dimacs("p cnf 2 1\n1 2 0\n").csp;
  const auto s = ProjectionScheme::identity(csp);
  const auto mu = exact_mu(csp);
  ASSERT_EQ(mu.size(), 3u);
  Histogram hist;
  const int samples = 300000;
  for (int i = 0; i < samples; ++i) {
    const auto r = main_sample(csp, s, 0.1, stream_seed(15, i));
    if (r.x) ++hist[*r.x];
  }
  const double sigma = std::sqrt(3.0 / samples) / 2.0;
  EXPECT_LE(tv_empirical(hist, mu), 0.1 + 3 * sigma);
}

TEST(MainSample, SameSeedSameOutput) {
  const auto inst = bundled_instance("mixed7");
  const auto a = main_sample(inst.csp, inst.scheme, 0.1, 77);
  const auto b = main_sample(inst.csp, inst.scheme, 0.1, 77);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.diagnostics(), b.diagnostics());
  ASSERT_TRUE(a.x);
  EXPECT_TRUE(satisfies(inst.csp, *a.x));
  const auto d = a.diagnostics();
  EXPECT_EQ(d["config"]["T"].get<std::uint64_t>(), a.config.T);
  EXPECT_EQ(d["chain"]["steps"].get<std::uint64_t>(), a.config.T);
  EXPECT_FALSE(d.contains("error"));
}

}  // namespace
}  // namespace lllsample
