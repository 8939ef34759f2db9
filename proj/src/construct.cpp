#include "lllsample/construct.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "lllsample/error.hpp"
#include "lllsample/lll_solver.hpp"

namespace lllsample {

namespace {

using Partition = ProjectionScheme::Partition;

struct Shape {
  bool uniform_alphabet = true;
  bool uniform_width = true;
  std::uint32_t alphabet = 0;
  std::size_t width = 0;
};

Shape shape_of(const AtomicCSP& csp) {
  Shape s;
  if (csp.num_vars() > 0) s.alphabet = csp.alphabet_size(0);
  for (auto a : csp.alphabet_sizes()) {
    if (a != s.alphabet) s.uniform_alphabet = false;
  }
  if (csp.num_constraints() > 0) s.width = csp.constraint(0).size();
  for (const auto& con : csp.constraints()) {
    if (con.size() != s.width) s.uniform_width = false;
  }
  return s;
}

std::uint32_t block_size_at(const Partition& p, Value x) {
  for (const auto& block : p) {
    if (std::binary_search(block.begin(), block.end(), x)) {
      return static_cast<std::uint32_t>(block.size());
    }
  }
  throw std::logic_error("value not covered by partition");
}

Partition identity_partition(std::uint32_t a) {
  Partition p(a);
  for (Value x = 0; x < a; ++x) p[x] = {x};
  return p;
}

// Draws a variable's partition for the randomized small-alphabet choices.
struct SmallChooser {
  double alpha2 = 0.0;  // marking probability, A = 2
  double x5 = 0.0;
  double x7 = 0.0;

  Partition operator()(std::uint32_t a, Rng& rng) const {
    switch (a) {
      case 2:
        return rng.bernoulli(alpha2) ? ProjectionScheme::contiguous_partition(2, 1)
                                     : identity_partition(2);
      case 3:
        return random_partition({1, 2}, rng);
      case 5:
        return rng.bernoulli(x5) ? random_partition({3, 2}, rng)
                                 : random_partition({2, 2, 1}, rng);
      case 7:
        return rng.bernoulli(x7) ? random_partition({3, 2, 2}, rng)
                                 : random_partition({2, 2, 2, 1}, rng);
      default:
        throw std::logic_error("not a small alphabet");
    }
  }
};

bool is_small(std::uint32_t a) { return a == 2 || a == 3 || a == 5 || a == 7; }

Partition bucketed(std::uint32_t a, std::uint32_t r_min) {
  return ProjectionScheme::contiguous_partition(a, bucket_blocks(a, r_min));
}

// Per-constraint quantities in log space for the randomized bad events.
struct LogProducts {
  double log_b = 0.0;       // sum -log|block|
  double log_blocks = 0.0;  // sum log|block|
  double log_p = 0.0;       // sum -log|Omega|
};

LogProducts log_products(const AtomicConstraint& con,
                         const std::vector<Partition>& parts,
                         const std::vector<std::uint32_t>& alphabets) {
  LogProducts out;
  for (std::size_t i = 0; i < con.size(); ++i) {
    const auto s = block_size_at(parts[con.vars[i]], con.forbidden[i]);
    out.log_b -= std::log(static_cast<double>(s));
    out.log_blocks += std::log(static_cast<double>(s));
    out.log_p -= std::log(static_cast<double>(alphabets[con.vars[i]]));
  }
  return out;
}

// Tolerance for floating-point threshold comparisons in the bad events, so
// boundary cases like b(C) = 3^{-gamma k} exactly are not flagged by
// rounding.
constexpr double kSlack = 1e-12;

struct Built {
  std::vector<Partition> parts;
  std::size_t resamplings = 0;
  std::size_t attempts = 1;
};

Built run_randomized(const AtomicCSP& csp, double delta, std::uint64_t seed,
                     std::function<Partition(VarId, Rng&)> sample,
                     std::function<bool(const AtomicConstraint&,
                                        const std::vector<Partition>&)> bad,
                     std::function<bool(VarId)> random_var) {
  ResamplingProblem<Partition> problem;
  problem.num_vars = csp.num_vars();
  problem.sample = [&](std::uint32_t v, Rng& rng) { return sample(v, rng); };
  for (const auto& con : csp.constraints()) {
    std::vector<std::uint32_t> vars;
    for (auto v : con.vars) {
      if (random_var(v)) vars.push_back(v);
    }
    const auto* c = &con;
    problem.events.push_back(
        {std::move(vars),
         [c, &bad](const std::vector<Partition>& parts) { return bad(*c, parts); }});
  }
  Rng rng(seed);
  auto result = moser_tardos(problem, rng, MtOptions{delta, 0, false});
  if (!result) {
    throw ConstructionError(
        "Moser-Tardos exhausted its budget of " +
        std::to_string(mt_attempts(delta)) + " x " +
        std::to_string(2 * csp.num_vars()) + " resampling steps");
  }
  return {std::move(result->values), result->resamplings, result->attempts};
}

Built build_case2(const AtomicCSP& csp, double delta, const ConstructOptions& o) {
  const auto& p = o.case2;
  SmallChooser chooser{p.alpha, 0.0, 0.0};
  return run_randomized(
      csp, delta, o.seed,
      [&](VarId v, Rng& rng) { return chooser(csp.alphabet_size(v), rng); },
      [&](const AtomicConstraint& con, const std::vector<Partition>& parts) {
        std::size_t marked = 0;
        for (auto v : con.vars) marked += parts[v].size() == 1 ? 1 : 0;
        const double k = static_cast<double>(con.size());
        const double free_vars = k - static_cast<double>(marked);
        return static_cast<double>(marked) < p.theta1 * k ||
               free_vars < p.theta_f * k;
      },
      [](VarId) { return true; });
}

Built build_case3(const AtomicCSP& csp, double delta, const ConstructOptions& o) {
  const double gamma = o.case3.gamma;
  SmallChooser chooser;
  const double log3 = std::log(3.0);
  return run_randomized(
      csp, delta, o.seed,
      [&](VarId v, Rng& rng) { return chooser(csp.alphabet_size(v), rng); },
      [&](const AtomicConstraint& con, const std::vector<Partition>& parts) {
        std::size_t v2 = 0;
        for (std::size_t i = 0; i < con.size(); ++i) {
          v2 += block_size_at(parts[con.vars[i]], con.forbidden[i]) == 2 ? 1 : 0;
        }
        const double k = static_cast<double>(con.size());
        const double log_b = -static_cast<double>(v2) * std::log(2.0);
        const double log_t = static_cast<double>(v2) * std::log(2.0);
        return log_b > -gamma * k * log3 + kSlack ||
               log_t > (1.0 - 2.0 * gamma) * k * log3 + kSlack;
      },
      [](VarId) { return true; });
}

Built build_case4_small(const AtomicCSP& csp, double delta,
                        const ConstructOptions& o) {
  const auto& p = o.case4_small;
  SmallChooser chooser{0.0, p.x5, p.x7};
  return run_randomized(
      csp, delta, o.seed,
      [&](VarId v, Rng& rng) { return chooser(csp.alphabet_size(v), rng); },
      [&](const AtomicConstraint& con, const std::vector<Partition>& parts) {
        const auto lp = log_products(con, parts, csp.alphabet_sizes());
        const double k = static_cast<double>(con.size());
        const auto a = csp.alphabet_size(con.vars[0]);  // uniform alphabet
        const double log_a = std::log(static_cast<double>(a));
        const double gamma = a == 5 ? p.gamma5 : p.gamma7;
        return lp.log_b > -gamma * k * log_a + kSlack ||
               lp.log_blocks > (1.0 - 2.0 * gamma) * k * log_a + kSlack;
      },
      [](VarId) { return true; });
}

Built build_case5(const AtomicCSP& csp, double delta, const ConstructOptions& o) {
  const auto& p = o.case5;
  SmallChooser chooser{p.alpha2, p.x5, p.x7};
  return run_randomized(
      csp, delta, o.seed,
      [&](VarId v, Rng& rng) {
        const auto a = csp.alphabet_size(v);
        return is_small(a) ? chooser(a, rng) : bucketed(a, 1);
      },
      [&](const AtomicConstraint& con, const std::vector<Partition>& parts) {
        const auto lp = log_products(con, parts, csp.alphabet_sizes());
        // t(C) = prod |block| / |Omega| = prod|block| * p(C)
        const double log_t = lp.log_blocks + lp.log_p;
        return lp.log_b > p.gamma * lp.log_p + kSlack ||
               log_t > 3.0 * p.gamma * lp.log_p + kSlack;
      },
      [&](VarId v) { return is_small(csp.alphabet_size(v)); });
}

ConstructionResult finish(const AtomicCSP& csp, double eta,
                          std::vector<Partition> parts, SchemeCase used,
                          std::size_t resamplings, std::size_t attempts) {
  ProjectionScheme scheme(csp.alphabet_sizes(), parts, used, eta);
  auto report = check_admissibility(csp, scheme, eta);
  return {std::move(scheme), std::move(report), used, resamplings, attempts};
}

std::string failing_conditions(const AdmissibilityReport& r) {
  std::ostringstream out;
  const char* sep = "";
  if (!r.a1) { out << sep << "A1 (b = " << r.b << " > " << r.a1_threshold << ")"; sep = ", "; }
  if (!r.a2) {
    out << sep << "A2 (worst log margin " << r.a2_worst_log_margin;
    if (!r.a2_note.empty()) out << "; " << r.a2_note;
    out << ")";
    sep = ", ";
  }
  if (!r.a3) { out << sep << "A3 (max block ratio " << r.a3_max_ratio << ")"; }
  return out.str();
}

void require_shape(bool ok, SchemeCase c, const std::string& need) {
  if (!ok) throw RegimeError(to_string(c) + " needs " + need);
}

ConstructionResult build(const AtomicCSP& csp, double eta, double delta,
                         SchemeCase c, const ConstructOptions& o,
                         const Shape& s) {
  const auto& alphabets = csp.alphabet_sizes();
  auto all_equal = [&](std::uint32_t a) {
    return std::all_of(alphabets.begin(), alphabets.end(),
                       [a](auto x) { return x == a; });
  };
  switch (c) {
    case SchemeCase::kIdentity:
      return finish(csp, eta, ProjectionScheme::identity(csp).partition_list(), c, 0, 0);
    case SchemeCase::kFullMarking:
      return finish(csp, eta, ProjectionScheme::full_marking(csp).partition_list(), c, 0, 0);
    case SchemeCase::kCase1: {
      require_shape(s.uniform_alphabet && s.alphabet >= 4, c,
                    "a uniform alphabet of size >= 4");
      const auto r = case1_blocks(s.alphabet);
      return finish(csp, eta,
                    std::vector<Partition>(
                        csp.num_vars(),
                        ProjectionScheme::contiguous_partition(s.alphabet, r)),
                    c, 0, 0);
    }
    case SchemeCase::kCase4: {
      require_shape(s.uniform_alphabet && s.alphabet >= 4 && s.alphabet != 5 &&
                        s.alphabet != 7,
                    c, "a uniform alphabet of size >= 4 other than 5 and 7");
      return finish(csp, eta,
                    std::vector<Partition>(csp.num_vars(), bucketed(s.alphabet, 2)),
                    c, 0, 0);
    }
    case SchemeCase::kCase2: {
      require_shape(all_equal(2), c, "binary alphabets");
      auto b = build_case2(csp, delta, o);
      return finish(csp, eta, std::move(b.parts), c, b.resamplings, b.attempts);
    }
    case SchemeCase::kCase3: {
      require_shape(all_equal(3), c, "ternary alphabets");
      auto b = build_case3(csp, delta, o);
      return finish(csp, eta, std::move(b.parts), c, b.resamplings, b.attempts);
    }
    case SchemeCase::kCase4Small: {
      require_shape(s.uniform_alphabet && (s.alphabet == 5 || s.alphabet == 7),
                    c, "a uniform alphabet of size 5 or 7");
      auto b = build_case4_small(csp, delta, o);
      return finish(csp, eta, std::move(b.parts), c, b.resamplings, b.attempts);
    }
    case SchemeCase::kCase5: {
      auto b = build_case5(csp, delta, o);
      return finish(csp, eta, std::move(b.parts), c, b.resamplings, b.attempts);
    }
    case SchemeCase::kCustom:
      break;
  }
  throw RegimeError("a custom scheme cannot be constructed");
}

}  // namespace

std::uint32_t case1_blocks(std::uint32_t alphabet_size) {
  const std::uint64_t a2 =
      static_cast<std::uint64_t>(alphabet_size) * alphabet_size;
  auto r = static_cast<std::uint64_t>(std::cbrt(static_cast<double>(a2)));
  while (r * r * r > a2) --r;
  while ((r + 1) * (r + 1) * (r + 1) <= a2) ++r;
  return static_cast<std::uint32_t>(r);
}

std::uint32_t bucket_blocks(std::uint32_t alphabet_size, std::uint32_t r_min) {
  const double log_a = std::log(static_cast<double>(alphabet_size));
  std::uint32_t best = r_min;
  double best_value = -INFINITY;
  for (std::uint32_t r = r_min; r <= alphabet_size; ++r) {
    const std::uint32_t lo = alphabet_size / r;
    const std::uint32_t hi = (alphabet_size + r - 1) / r;
    const double value =
        std::min(0.5 * std::log(static_cast<double>(alphabet_size) / hi) / log_a,
                 std::log(static_cast<double>(lo)) / log_a);
    if (value > best_value) {
      best_value = value;
      best = r;
    }
  }
  return best;
}

Partition random_partition(const std::vector<std::uint32_t>& sizes, Rng& rng) {
  const std::uint32_t a = std::accumulate(sizes.begin(), sizes.end(), 0u);
  std::vector<Value> perm(a);
  std::iota(perm.begin(), perm.end(), 0u);
  for (std::uint32_t i = a; i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.below(i)]);
  }
  Partition p;
  std::size_t at = 0;
  for (auto size : sizes) {
    p.emplace_back(perm.begin() + at, perm.begin() + at + size);
    std::sort(p.back().begin(), p.back().end());
    at += size;
  }
  // Equal-size blocks are interchangeable; order them canonically.
  std::stable_sort(p.begin(), p.end(), [&](const auto& x, const auto& y) {
    if (x.size() != y.size()) return false;
    return x.front() < y.front();
  });
  return p;
}

ConstructionResult construct_projection(const AtomicCSP& csp, double eta,
                                        double delta,
                                        const ConstructOptions& options) {
  if (!(eta > 0.0 && eta < 0.5)) {
    throw std::invalid_argument("eta must lie in (0, 1/2)");
  }
  mt_attempts(delta);  // validates delta
  const Shape s = shape_of(csp);
  std::vector<SchemeCase> plan;
  if (options.case_hint) {
    plan.push_back(*options.case_hint);
  } else if (csp.num_constraints() == 0) {
    plan.push_back(SchemeCase::kIdentity);
  } else if (s.uniform_alphabet && s.uniform_width) {
    if (s.alphabet == 2) {
      plan.push_back(SchemeCase::kCase2);
    } else if (s.alphabet == 3) {
      plan.push_back(SchemeCase::kCase3);
    } else {
      plan.push_back(SchemeCase::kCase1);
      plan.push_back(s.alphabet == 5 || s.alphabet == 7 ? SchemeCase::kCase4Small
                                                        : SchemeCase::kCase4);
    }
  } else {
    plan.push_back(SchemeCase::kCase5);
  }

  std::optional<ConstructionResult> last;
  for (auto c : plan) {
    last = build(csp, eta, delta, c, options, s);
    if (last->report.admissible()) return std::move(*last);
  }
  if (options.require_admissible) {
    throw RegimeError(to_string(last->used) + " scheme is not admissible: " +
                      failing_conditions(last->report));
  }
  return std::move(*last);
}

}  // namespace lllsample
