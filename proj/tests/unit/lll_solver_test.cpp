#include <gtest/gtest.h>

#include "lllsample/corpus.hpp"
#include "lllsample/formats.hpp"
#include "lllsample/lll_solver.hpp"

namespace lllsample {
namespace {

TEST(MtAttempts, LogarithmicInDelta) {
  EXPECT_EQ(mt_attempts(0.01), 5u);
  EXPECT_EQ(mt_attempts(0.5), 1u);
  EXPECT_EQ(mt_attempts(0.9), 1u);
  EXPECT_EQ(mt_attempts(1e-6), 14u);
  EXPECT_THROW(mt_attempts(0.0), std::invalid_argument);
  EXPECT_THROW(mt_attempts(1.0), std::invalid_argument);
}

TEST(MoserTardos, NoEventsReturnsTheInitialDraw) {
  ResamplingProblem<int> p;
  p.num_vars = 6;
  p.sample = [](std::uint32_t, Rng& rng) { return static_cast<int>(rng.below(10)); };
  Rng rng(21), replay(21);
  const auto r = moser_tardos(p, rng);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->resamplings, 0u);
  EXPECT_EQ(r->attempts, 1u);
  for (int v : r->values) EXPECT_EQ(v, static_cast<int>(replay.below(10)));
}

TEST(MoserTardos, SolvesASmallThreeCnf) {
  const auto csp =
      parse_dimacs("p cnf 6 4\n1 2 3 0\n-1 4 5 0\n-2 -4 6 0\n3 -5 -6 0\n").csp;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto r = find_satisfying(csp, 0.01, rng);
    ASSERT_TRUE(r);
    EXPECT_TRUE(evaluate(csp, r->values).empty());
  }
}

TEST(MoserTardos, ResamplesTheLowestOccurringEvent) {
  ResamplingProblem<Value> p;
  p.num_vars = 2;
  p.sample = [](std::uint32_t, Rng& rng) { return static_cast<Value>(rng.below(2)); };
  // Event 0 reads x0, event 1 reads x1; both occur on value 1.
  for (std::uint32_t v = 0; v < 2; ++v) {
    p.events.push_back({{v}, [v](const std::vector<Value>& x) { return x[v] == 1; }});
  }
  MtOptions opt;
  opt.record_trace = true;
  opt.steps_per_attempt = 1000;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto r = moser_tardos(p, rng, opt);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->trace.size(), r->resamplings);
    // Once event 1 is resampled, event 0 no longer occurs.
    bool seen_one = false;
    for (auto e : r->trace) {
      if (e == 1) seen_one = true;
      if (seen_one) EXPECT_EQ(e, 1u);
    }
  }
}

TEST(MoserTardos, ReportsFailureWhenUnsatisfiable) {
  const AtomicCSP csp({2, 2}, {{{0}, {0}}, {{0}, {1}}});
  Rng rng(1);
  EXPECT_FALSE(find_satisfying(csp, 0.01, rng));
}

TEST(MoserTardos, BudgetIsTwoNStepsPerAttempt) {
  // A single event that always occurs: each attempt spends exactly 2n steps.
  ResamplingProblem<Value> p;
  p.num_vars = 3;
  p.events.push_back({{0, 1}, [](const std::vector<Value>&) { return true; }});
  std::size_t calls = 0;
  p.sample = [&calls](std::uint32_t, Rng&) {
    ++calls;
    return Value{0};
  };
  Rng rng(0);
  EXPECT_FALSE(moser_tardos(p, rng, MtOptions{0.1, 0, false}));
  // 3 attempts of (3 initial draws + 6 steps * 2 variables).
  EXPECT_EQ(calls, 3u * (3 + 6 * 2));
}

TEST(MoserTardos, SparseRandomInstancesAreSolved) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto csp = random_sparse_3cnf(60, seed);
    EXPECT_LE(degree_stats(csp).max_degree, 2u);
    Rng rng(seed);
    const auto r = find_satisfying(csp, 0.01, rng);
    ASSERT_TRUE(r);
    EXPECT_TRUE(satisfies(csp, r->values));
  }
}

TEST(MoserTardos, Deterministic) {
  const auto csp = random_sparse_3cnf(100, 3);
  Rng a(99), b(99);
  EXPECT_EQ(find_satisfying(csp, 0.01, a)->values, find_satisfying(csp, 0.01, b)->values);
}

}  // namespace
}  // namespace lllsample
