#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "lllsample/csp.hpp"
#include "lllsample/projection.hpp"

namespace lllsample {

struct CountOptions {
  double c_n = 64.0;         // N = ceil(c_N n / delta^2) samples per stage
  double theta = 1.0 / 8.0;  // eps_stage = theta delta^2 / (m ln(m/delta))
  double c_t = 1.0;
  /// Stages whose pinned instance fails A1-A3 and has at most
  /// `exact_limit` assignments use the exact marginal instead of sampling.
  bool exact_fallback = true;
  std::uint64_t exact_limit = std::uint64_t{1} << 20;
  double max_error_rate = 0.1;
};

/// theta delta^2 / (m ln(m / delta)). Requires m >= 1.
double stage_epsilon(std::size_t m, double delta, double theta = 1.0 / 8.0);

/// ceil(c_N n / delta^2).
std::uint64_t stage_samples(std::size_t n, double delta, double c_n = 64.0);

struct StageRecord {
  VarId var = 0;  // original variable id
  Value value = 0;
  double marginal = 0.0;  // estimated mu[X(var) = value | earlier pins]
  std::uint64_t samples = 0;
  std::uint64_t accepted = 0;
  std::uint64_t errors = 0;
  /// "sampler", "exact" (enumeration fallback) or "free" (no constraints
  /// left, so the marginal is exactly 1/|Omega|).
  std::string method;
  bool admissible = false;
};

struct CountEstimate {
  double log_estimate = 0.0;  // natural log of the estimated count
  double delta = 0.0;
  double eps_stage = 0.0;
  std::uint64_t samples_per_stage = 0;
  std::uint64_t seed = 0;
  std::vector<StageRecord> stages;
  /// Non-empty when the estimator aborted; `error_stage` is then the index
  /// of the failing stage.
  std::string error;
  std::size_t error_stage = 0;

  bool ok() const { return error.empty(); }
  double estimate() const;
  nlohmann::json to_json() const;
};

/// Self-reducibility estimator: pins variables 0, 1, ... in order, each to
/// its empirically most frequent value under main_sample on the pinned
/// instance, and returns prod_i 1 / (estimated marginal)_i. Aborts (error
/// set) when a stage sees no satisfying sample or more than
/// max_error_rate ERROR results.
CountEstimate approx_count(const AtomicCSP& csp, const ProjectionScheme& scheme,
                           double delta, std::uint64_t seed,
                           const CountOptions& options = {});

}  // namespace lllsample
