// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance            run everything
//   acceptance 2 3 8      run the listed criteria
//
// Criterion 7 is measured on the runs of criterion 1, so selecting either
// runs both.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lllsample/construct.hpp"
#include "lllsample/corpus.hpp"
#include "lllsample/counting.hpp"
#include "lllsample/dynamics.hpp"
#include "lllsample/lll_solver.hpp"
#include "lllsample/oracle.hpp"
#include "lllsample/projection.hpp"
#include "lllsample/two_tree.hpp"
#include "lllsample/verify.hpp"

using namespace lllsample;

namespace {

struct Line {
  int id;
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void report(const Line& line) {
  std::cout << "criterion " << line.id << ": " << (line.pass ? "PASS" : "FAIL")
            << "  " << line.detail << std::endl;
}

// ---------------------------------------------------------------- 1 and 7

std::vector<Line> uniformity_and_failures() {
  constexpr double kEps = 0.1;
  constexpr std::uint64_t kSamples = 200000;
  bool tv_ok = true;
  double worst_tv = 0.0;
  UniformityCheck total;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& inst : sampling_corpus()) {
    const auto u = check_uniformity(inst, kEps, kSamples, 2024);
    std::cerr << "  " << inst.name << ": " << u.to_json().dump() << "\n";
    worst_tv = std::max(worst_tv, u.tv);
    tv_ok = tv_ok && u.tv <= kEps + 0.02;
    total.samples += u.samples;
    total.errors += u.errors;
    total.failed_runs += u.failed_runs;
    total.steps += u.steps;
    total.sample_calls += u.sample_calls;
    total.s1 += u.s1;
    total.s2 += u.s2;
  }
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  const double rate = total.failure_rate();
  return {
      {1, tv_ok,
       fmt("10 instances x %llu samples at eps=0.1: worst TV %.4f (limit 0.12), "
           "%.0f s",
           static_cast<unsigned long long>(kSamples), worst_tv, secs)},
      {7, rate <= 0.01,
       fmt("S1/S2/I1/I2 per subroutine call: %llu+%llu+%llu of %llu calls "
           "(%.2e, limit 1e-2); runs touched by any failure: %llu of %llu",
           static_cast<unsigned long long>(total.s1),
           static_cast<unsigned long long>(total.s2),
           static_cast<unsigned long long>(total.errors),
           static_cast<unsigned long long>(total.sample_calls + total.samples),
           rate, static_cast<unsigned long long>(total.failed_runs),
           static_cast<unsigned long long>(total.samples))},
  };
}

// ---------------------------------------------------------------- 2

Line conditional_sample_step() {
  double worst = 0.0;
  std::size_t pairs = 0;
  std::uint64_t failures = 0;
  for (const auto& inst : conditional_corpus()) {
    const auto s = check_sample_step(inst, 0.1, 100000, 7);
    worst = std::max(worst, s.max_tv);
    pairs += s.pairs;
    failures += s.failures;
  }
  return {2, worst <= 0.01,
          fmt("%zu (v, Y^-v) pairs x 1e5 draws: worst TV %.4f (limit 0.01), "
              "%llu failing draws excluded",
              pairs, worst, static_cast<unsigned long long>(failures))};
}

// ---------------------------------------------------------------- 3

Line lifting() {
  double worst = 0.0;
  std::size_t states = 0;
  std::uint64_t failures = 0;
  for (const auto& inst : conditional_corpus()) {
    const auto l = check_inv_sample(inst, 0.1, 100000, 11);
    worst = std::max(worst, l.max_tv);
    states += l.states;
    failures += l.failures;
  }
  return {3, worst <= 0.01,
          fmt("%zu feasible Y x 1e5 lifts: worst TV %.4f (limit 0.01), %llu "
              "ERROR lifts excluded",
              states, worst, static_cast<unsigned long long>(failures))};
}

// ---------------------------------------------------------------- 4

Line moser_tardos_runs() {
  Rng pick(99);
  int solved = 0;
  bool regime = true;
  std::size_t max_n = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 20 + pick.below(181);
    max_n = std::max(max_n, n);
    const auto csp = random_sparse_3cnf(n, stream_seed(4, i));
    const auto deg = degree_stats(csp).max_degree;
    regime = regime && std::exp(1.0) * 0.125 * static_cast<double>(deg) <= 1.0;
    Rng rng(stream_seed(40, i));
    const auto r = find_satisfying(csp, 0.01, rng);
    if (r && satisfies(csp, r->values)) ++solved;
  }
  return {4, solved == 100 && regime,
          fmt("%d/100 random 3-CNFs (n <= %zu, e p Delta <= 1: %s) solved and "
              "verified at delta=0.01",
              solved, max_n, regime ? "yes" : "no")};
}

// ---------------------------------------------------------------- 5

// floor(A/R)/A and ceil(A/R)/A inside [1/(1.5 A^(2/3)), 1.5/A^(2/3)],
// decided in integers: 8A <= 27 f^3 and 8 c^3 <= 27 A.
bool case1_sandwich(const ProjectionScheme& scheme) {
  for (VarId v = 0; v < scheme.num_vars(); ++v) {
    const std::uint64_t a = scheme.alphabet_size(v);
    const std::uint64_t r = scheme.num_blocks(v);
    const std::uint64_t f = a / r, c = (a + r - 1) / r;
    if (8 * a > 27 * f * f * f || 8 * c * c * c > 27 * a) return false;
    for (Value q = 0; q < r; ++q) {
      const auto s = scheme.block_size(v, q);
      if (s < f || s > c) return false;
    }
  }
  return true;
}

Line admissibility_constructions() {
  struct Config {
    std::string label;
    SchemeCase kind;
    AtomicCSP csp;
  };
  std::vector<Config> configs{
      {"case1 (64,3,5)", SchemeCase::kCase1, hub_instance(64, 3, 5, 51)},
      {"case1 (256,4,8)", SchemeCase::kCase1, hub_instance(256, 4, 8, 52)},
      {"case2 (n=600,k=200)", SchemeCase::kCase2,
       random_uniform_instance(600, 10, 200, 2, 53)},
      {"case3 (n=300,k=100)", SchemeCase::kCase3,
       random_uniform_instance(300, 8, 100, 3, 54)},
  };
  bool pass = true;
  std::ostringstream detail;
  for (const auto& cfg : configs) {
    int ok = 0;
    bool sandwich = true;
    std::map<std::string, int> failing;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      ConstructOptions opts;
      opts.case_hint = cfg.kind;
      opts.require_admissible = false;
      opts.seed = seed;
      try {
        const auto r = construct_projection(cfg.csp, 0.25, 0.01, opts);
        if (r.report.a1 && r.report.a2 && r.report.a3) ++ok;
        if (!r.report.a1) ++failing["A1"];
        if (!r.report.a2) ++failing["A2"];
        if (!r.report.a3) ++failing["A3"];
        if (cfg.kind == SchemeCase::kCase1) {
          sandwich = sandwich && case1_sandwich(r.scheme);
        }
      } catch (const std::exception&) {
        ++failing["construction"];
      }
    }
    pass = pass && ok >= 99 && sandwich;
    detail << cfg.label << ": " << ok << "/100";
    if (!failing.empty()) {
      detail << " (fails";
      for (const auto& [k, v] : failing) detail << " " << k << "x" << v;
      detail << ")";
    }
    if (cfg.kind == SchemeCase::kCase1) {
      detail << " sandwich " << (sandwich ? "ok" : "VIOLATED");
    }
    detail << "; ";
  }
  return {5, pass, detail.str()};
}

// ---------------------------------------------------------------- 6

Line schedule_formulas() {
  // Reference values evaluated independently at 40 significant digits.
  struct Sched {
    std::size_t n;
    double kappa;
    std::size_t delta;
    double eps, eta;
    std::uint64_t T, S;
    double theta;
  };
  const Sched sched[] = {
      {10, 20.0, 5, 0.5, 0.25, 922, 268, 599.14645471079819869},
      {12, 35.7, 3, 0.1, 0.25, 2522, 677, 501.75854589405836466},
      {200, 60.0, 8, 0.01, 0.3, 143796, 9329, 2239.6531383613165935},
      {1, 4.5, 1, 0.2, 0.5, 8, 148, 62.270306184207487849},
      {50, 157.28, 100, 0.05, 0.25, 90538, 2383, 23931.565870761986851},
  };
  struct Kappa {
    std::size_t delta;
    std::uint32_t a;
    double kappa;
  };
  const Kappa kappas[] = {{100, 64, 157.27480794569334199},
                          {5, 64, 146.88568886697007351},
                          {8, 256, 162.98780004955875489}};
  struct Stage {
    std::size_t m;
    double delta, eps;
  };
  const Stage stages[] = {{100, 0.1, 1.8095603412635494973e-6},
                          {10, 0.2, 0.0001278111093176657431},
                          {3, 0.5, 0.0058136523599088255596}};
  auto close = [](double got, double want) {
    return std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want));
  };
  int checked = 0, bad = 0;
  for (const auto& s : sched) {
    const auto cfg =
        SamplerConfig::derive(s.n, s.delta, s.kappa, s.eps, s.eta, 1.0, 0);
    checked += 3;
    bad += (cfg.T != s.T) + (cfg.S != s.S) + !close(cfg.theta_comp, s.theta);
  }
  for (const auto& k : kappas) {
    ++checked;
    bad += !close(case_kappa(SchemeCase::kCase1, k.delta, k.a, 3), k.kappa);
  }
  for (const auto& s : stages) {
    ++checked;
    bad += !close(stage_epsilon(s.m, s.delta), s.eps);
  }
  return {6, bad == 0,
          fmt("%d of %d T/S/theta/kappa/eps_stage values match the reference",
              checked - bad, checked)};
}

// ---------------------------------------------------------------- 8

Graph random_graph(Rng& rng, std::size_t n, double p) {
  Graph g(n);
  for (std::uint32_t u = 0; u < n; ++u) {
    for (std::uint32_t v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) g.add_edge(u, v);
    }
  }
  return g;
}

Line two_tree_lemmas() {
  Rng rng(8);
  std::size_t bound_checks = 0;
  std::map<std::size_t, std::size_t> violations;  // ell -> count
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 2 + rng.below(11);
    const double p = 0.1 + 0.4 * rng.uniform01();
    const auto g = random_graph(rng, n, p);
    const auto d = std::max<std::size_t>(g.max_degree(), 1);
    for (std::uint32_t root = 0; root < n; ++root) {
      for (std::size_t ell = 1; ell <= 5; ++ell) {
        ++bound_checks;
        if (static_cast<double>(count_2trees(g, root, ell)) >
            two_tree_bound(d, ell)) {
          ++violations[ell];
        }
      }
    }
  }

  int greedy_ok = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 3 + rng.below(10);
    const auto g = random_graph(rng, n, 0.15 + 0.35 * rng.uniform01());
    // Random connected subgraph: grow from a random seed vertex.
    std::vector<std::uint32_t> h{static_cast<std::uint32_t>(rng.below(n))};
    std::set<std::uint32_t> in(h.begin(), h.end());
    const std::size_t target = 1 + rng.below(n);
    while (h.size() < target) {
      std::vector<std::uint32_t> frontier;
      for (auto u : h) {
        for (auto w : g.neighbors(u)) {
          if (!in.count(w)) frontier.push_back(w);
        }
      }
      if (frontier.empty()) break;
      const auto w = frontier[rng.below(frontier.size())];
      in.insert(w);
      h.push_back(w);
    }
    const auto v = h[rng.below(h.size())];
    std::size_t dh = 0;
    for (auto u : h) {
      std::size_t deg = 0;
      for (auto w : g.neighbors(u)) deg += in.count(w);
      dh = std::max(dh, deg);
    }
    const auto tree = greedy_2tree(g, h, v);
    const bool has_v = std::find(tree.begin(), tree.end(), v) != tree.end();
    if (has_v && is_2tree(g, tree) && tree.size() * (dh + 1) >= h.size()) {
      ++greedy_ok;
    }
  }

  std::size_t total_violations = 0;
  std::ostringstream v;
  for (const auto& [ell, c] : violations) {
    total_violations += c;
    v << " ell=" << ell << ":" << c;
  }
  return {8, total_violations == 0 && greedy_ok == 100,
          fmt("count bound violated in %zu of %zu (graph, root, ell) cases",
              total_violations, bound_checks) +
              (total_violations ? " [" + v.str().substr(1) +
                                      "; at ell=1 the count is 1 and the "
                                      "bound is 1/2]"
                                : std::string()) +
              fmt("; greedy 2-tree valid with |T| >= |V(H)|/(Delta+1) in %d/100",
                  greedy_ok)};
}

// ---------------------------------------------------------------- 9

Line counting() {
  int instances_ok = 0;
  std::ostringstream detail;
  for (const auto& inst : sampling_corpus()) {
    const auto exact = static_cast<double>(count_satisfying(inst.csp));
    int within = 0;
    for (std::uint64_t t = 0; t < 50; ++t) {
      const auto est = approx_count(inst.csp, inst.scheme, 0.2, stream_seed(9, t));
      if (est.ok() && est.estimate() <= 1.2 * exact &&
          est.estimate() >= exact / 1.2) {
        ++within;
      }
    }
    if (within >= 45) ++instances_ok;
    detail << inst.name << " " << within << "/50; ";
  }
  return {9, instances_ok == 10,
          fmt("%d/10 instances within (1+delta) in >= 90%% of trials: ",
              instances_ok) +
              detail.str()};
}

// ---------------------------------------------------------------- 10

Line marginal_bound() {
  std::vector<BundledInstance> pool = marginal_bound_corpus();
  for (auto& inst : sampling_corpus()) pool.push_back(inst);
  for (auto& inst : conditional_corpus()) pool.push_back(inst);
  std::set<std::string> seen;
  std::size_t instances = 0, admissible = 0, pairs = 0, violations = 0;
  double worst = 0.0;
  for (const auto& inst : pool) {
    if (!seen.insert(inst.name).second) continue;
    const auto b = compute_b(inst.csp, inst.scheme).b;
    const auto d = std::max<std::size_t>(degree_stats(inst.csp).max_degree, 1);
    if (std::exp(1.0) * b * static_cast<double>(d) > 1.0) continue;
    ++instances;
    if (check_admissibility(inst.csp, inst.scheme, inst.scheme.eta())
            .admissible()) {
      ++admissible;
    }
    const auto r = check_marginal_bound(inst);
    pairs += r.pairs;
    violations += r.violations;
    worst = std::max(worst, r.max_ratio);
  }
  return {10, violations == 0 && instances > 0,
          fmt("%zu instances with e b Delta <= 1 (%zu fully admissible), %zu "
              "(v, z) pairs, %zu violations, max conditional/bound %.4f",
              instances, admissible, pairs, violations, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria runner"};
  std::vector<int> selected;
  app.add_option("criteria", selected, "Criteria to run (default: all)")
      ->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  std::set<int> want(selected.begin(), selected.end());
  if (want.empty()) {
    for (int i = 1; i <= 10; ++i) want.insert(i);
  }

  std::vector<Line> lines;
  if (want.count(1) || want.count(7)) {
    for (auto& l : uniformity_and_failures()) {
      if (want.count(l.id)) lines.push_back(l);
    }
  }
  const std::map<int, std::function<Line()>> single{
      {2, conditional_sample_step}, {3, lifting},
      {4, moser_tardos_runs},       {5, admissibility_constructions},
      {6, schedule_formulas},       {8, two_tree_lemmas},
      {9, counting},                {10, marginal_bound},
  };
  for (const auto& [id, run] : single) {
    if (want.count(id)) lines.push_back(run());
  }
  std::sort(lines.begin(), lines.end(),
            [](const Line& a, const Line& b) { return a.id < b.id; });
  bool all = true;
  for (const auto& l : lines) {
    report(l);
    all = all && l.pass;
  }
  return all ? 0 : 1;
}
