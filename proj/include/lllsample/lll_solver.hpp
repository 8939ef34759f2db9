#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "lllsample/csp.hpp"
#include "lllsample/rng.hpp"

namespace lllsample {

/// A variable-based LLL instance: independent variables of type T and bad
/// events, each declaring the variables its predicate reads.
template <typename T>
struct ResamplingProblem {
  struct Event {
    std::vector<std::uint32_t> vars;
    /// True when the event occurs (is "violated") under the realization.
    std::function<bool(const std::vector<T>&)> occurs;
  };

  std::size_t num_vars = 0;
  std::function<T(std::uint32_t var, Rng& rng)> sample;
  std::vector<Event> events;
};

struct MtOptions {
  double delta = 0.01;
  /// Steps (resamplings) per attempt; 0 means 2n.
  std::size_t steps_per_attempt = 0;
  bool record_trace = false;
};

template <typename T>
struct MtResult {
  std::vector<T> values;
  std::size_t resamplings = 0;  // in the successful attempt
  std::size_t attempts = 0;     // 1-based index of the successful attempt
  std::vector<std::uint32_t> trace;  // resampled event ids, if recorded
};

/// max(1, ceil(ln(1/delta))).
inline std::size_t mt_attempts(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0,1)");
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(
                                      std::ceil(std::log(1.0 / delta))));
}

/// Moser-Tardos: draw every variable, then repeatedly resample the variables
/// of the lowest-id occurring event. Each attempt gets a budget of 2n steps;
/// after max(1, ceil(ln(1/delta))) failed attempts returns std::nullopt. The
/// LLL condition is the caller's responsibility.
template <typename T>
std::optional<MtResult<T>> moser_tardos(const ResamplingProblem<T>& problem,
                                        Rng& rng,
                                        const MtOptions& options = {}) {
  const std::size_t n = problem.num_vars;
  const std::size_t m = problem.events.size();
  std::vector<std::vector<std::uint32_t>> by_var(n);
  for (std::uint32_t e = 0; e < m; ++e) {
    for (auto v : problem.events[e].vars) {
      if (v >= n) throw std::invalid_argument("event reads unknown variable");
      by_var[v].push_back(e);
    }
  }
  const std::size_t budget =
      options.steps_per_attempt ? options.steps_per_attempt : 2 * n;
  const std::size_t attempts = mt_attempts(options.delta);

  std::vector<std::uint32_t> stamp(m, 0);
  std::uint32_t epoch = 0;
  for (std::size_t attempt = 1; attempt <= attempts; ++attempt) {
    MtResult<T> out;
    out.values.resize(n);
    for (std::uint32_t v = 0; v < n; ++v) out.values[v] = problem.sample(v, rng);
    std::set<std::uint32_t> occurring;
    for (std::uint32_t e = 0; e < m; ++e) {
      if (problem.events[e].occurs(out.values)) occurring.insert(e);
    }
    while (!occurring.empty() && out.resamplings < budget) {
      const std::uint32_t e = *occurring.begin();
      if (options.record_trace) out.trace.push_back(e);
      ++out.resamplings;
      for (auto v : problem.events[e].vars) out.values[v] = problem.sample(v, rng);
      ++epoch;
      for (auto v : problem.events[e].vars) {
        for (auto f : by_var[v]) {
          if (stamp[f] == epoch) continue;
          stamp[f] = epoch;
          if (problem.events[f].occurs(out.values)) {
            occurring.insert(f);
          } else {
            occurring.erase(f);
          }
        }
      }
    }
    if (!occurring.empty()) continue;
    for (const auto& event : problem.events) {
      if (event.occurs(out.values)) {
        throw std::logic_error("Moser-Tardos bookkeeping out of sync");
      }
    }
    out.attempts = attempt;
    return out;
  }
  return std::nullopt;
}

/// The CSP as a resampling problem: uniform values, one event per constraint.
ResamplingProblem<Value> csp_resampling_problem(const AtomicCSP& csp);

/// A satisfying assignment via Moser-Tardos, or std::nullopt when every
/// attempt exhausts its budget.
std::optional<MtResult<Value>> find_satisfying(const AtomicCSP& csp,
                                               double delta, Rng& rng,
                                               const MtOptions& options = {});

}  // namespace lllsample
