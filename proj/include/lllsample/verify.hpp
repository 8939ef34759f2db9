#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "lllsample/corpus.hpp"

namespace lllsample {

/// Empirical law of sample_step against the exact projected conditional,
/// over every (v, Y^{-v}) with positive probability.
struct StepCheck {
  std::size_t pairs = 0;
  std::uint64_t draws = 0;     // per pair
  std::uint64_t failures = 0;  // S1/S2 draws, excluded from the histograms
  double max_tv = 0.0;
};
StepCheck check_sample_step(const BundledInstance& inst, double eps,
                            std::uint64_t draws, std::uint64_t seed);

/// Empirical law of inv_sample against mu[. | pi(X) = Y] over every Y in
/// the support of mu_pi.
struct LiftCheck {
  std::size_t states = 0;
  std::uint64_t draws = 0;
  std::uint64_t failures = 0;  // I1/I2 results
  double max_tv = 0.0;
};
LiftCheck check_inv_sample(const BundledInstance& inst, double eps,
                           std::uint64_t draws, std::uint64_t seed);

/// Independent runs of the full sampler; run i uses the seed
/// stream_seed(seed, i), exactly as main_sample would.
struct UniformityCheck {
  std::uint64_t samples = 0;
  std::uint64_t errors = 0;       // runs ending in ERROR
  std::uint64_t failed_runs = 0;  // runs with any S1/S2/I1/I2 event
  std::uint64_t steps = 0;
  /// Steps that invoked Sample, i.e. on variables with |Q_v| > 1.
  std::uint64_t sample_calls = 0;
  std::uint64_t s1 = 0;
  std::uint64_t s2 = 0;
  double tv = 0.0;  // non-ERROR outputs vs the uniform satisfying law
  /// (S1 + S2 + I1 + I2) / (Sample calls + InvSample calls).
  double failure_rate() const;
  nlohmann::json to_json() const;
};
UniformityCheck check_uniformity(const BundledInstance& inst, double eps,
                                 std::uint64_t samples, std::uint64_t seed,
                                 double c_t = 1.0);

/// Exhaustive check of mu_pi[value(v) = . | Z] <= (1-3b)^-Delta P_pi.
struct MarginalBoundCheck {
  bool applicable = false;  // e * b * Delta <= 1
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;  // max conditional / bound
};
MarginalBoundCheck check_marginal_bound(const BundledInstance& inst);

struct VerifyOptions {
  std::uint64_t seed = 1;
  std::uint64_t draws = 20000;
  double eps = 0.1;
};

/// The oracle suite on the bundled instances. The report has one entry per
/// check ({name, pass, detail}) and an overall "pass".
nlohmann::json run_verification(const VerifyOptions& options = {});

}  // namespace lllsample
