#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lllsample/csp.hpp"
#include "lllsample/projection.hpp"
#include "lllsample/rng.hpp"

namespace lllsample {

// Published constants of the randomized constructions. The defaults come
// from offline solutions of the corresponding optimization programs.

struct Case2Params {
  double alpha = 0.4043;    // probability that a variable is fully projected
  double theta1 = 0.1761;   // min fraction of fully projected vars per C
  double theta_f = 0.3517;  // min fraction of identity vars per C
};

struct Case3Params {
  double gamma = 0.2;
};

struct Case4SmallParams {
  double x5 = 0.2751;  // P[(3,2)] for A = 5, else (2,2,1)
  double gamma5 = 0.221;
  double x7 = 0.6904;  // P[(3,2,2)] for A = 7, else (2,2,2,1)
  double gamma7 = 0.236;
};

struct Case5Params {
  double gamma = 0.142;
  double alpha2 = 0.34;  // marking probability for binary variables
  double x5 = 0.30;
  double x7 = 0.0;
};

struct ConstructOptions {
  std::optional<SchemeCase> case_hint;
  /// Reject schemes that fail A1-A3 (RegimeError). Off, the scheme is
  /// returned together with its failing report.
  bool require_admissible = true;
  std::uint64_t seed = 0;
  Case2Params case2;
  Case3Params case3;
  Case4SmallParams case4_small;
  Case5Params case5;
};

struct ConstructionResult {
  ProjectionScheme scheme;
  AdmissibilityReport report;
  SchemeCase used = SchemeCase::kCustom;
  std::size_t resamplings = 0;
  std::size_t attempts = 0;
};

/// floor(A^(2/3)), computed exactly: the largest R with R^3 <= A^2.
std::uint32_t case1_blocks(std::uint32_t alphabet_size);

/// argmax over R in [r_min, A] of min(log(A/ceil(A/R))/(2 log A),
/// log(floor(A/R))/log A); the smallest maximizer wins ties.
std::uint32_t bucket_blocks(std::uint32_t alphabet_size, std::uint32_t r_min);

/// Uniformly random partition of {0..A-1} into blocks of the given sizes.
/// Blocks come out in the order of `sizes`; equal-size blocks are ordered by
/// their smallest element and values inside a block are sorted.
ProjectionScheme::Partition random_partition(
    const std::vector<std::uint32_t>& sizes, Rng& rng);

/// Builds a projection scheme by the case matching the instance shape (or
/// `options.case_hint`) and verifies it with check_admissibility.
/// Auto-detection: no constraints -> identity; uniform alphabet A and
/// uniform width: A = 2 -> Case 2, A = 3 -> Case 3, A >= 4 -> Case 1, falling
/// back to Case 4 (A in {5,7}: its randomized variant) when Case 1 is not
/// admissible; anything else -> Case 5.
/// Throws RegimeError when the hint does not fit the instance or the scheme
/// fails A1-A3 under require_admissible, and ConstructionError when
/// Moser-Tardos exhausts its budget.
ConstructionResult construct_projection(const AtomicCSP& csp, double eta,
                                        double delta,
                                        const ConstructOptions& options = {});

}  // namespace lllsample
