#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lllsample/csp.hpp"
#include "lllsample/rng.hpp"

namespace lllsample {

/// Which construction produced a scheme. It fixes the choice of kappa.
enum class SchemeCase {
  kIdentity,
  kFullMarking,
  kCustom,
  kCase1,       // uniform large alphabet, R = floor(A^(2/3)) buckets
  kCase2,       // binary, randomized marking
  kCase3,       // ternary, random (1,2) partitions
  kCase4,       // A >= 4, A not in {5,7}, alpha*-optimal buckets
  kCase4Small,  // A in {5,7}, randomized mixed partitions
  kCase5,       // mixed alphabets
};

std::string to_string(SchemeCase c);
SchemeCase scheme_case_from_string(const std::string& name);

/// Per-variable surjections pi_v : Omega_v -> Q_v, stored as partitions of
/// each alphabet into blocks. Block j of variable v is pi_v^{-1}(j). Values
/// inside a block are kept sorted; both pi_v(x) and the block lookup are
/// O(1).
class ProjectionScheme {
 public:
  using Partition = std::vector<std::vector<Value>>;

  ProjectionScheme() = default;
  /// Throws std::invalid_argument unless each partition covers
  /// 0..alphabet_size-1 exactly once with nonempty blocks.
  ProjectionScheme(const std::vector<std::uint32_t>& alphabet_sizes,
                   const std::vector<Partition>& partitions,
                   SchemeCase kind = SchemeCase::kCustom, double eta = 0.25);

  static ProjectionScheme identity(const AtomicCSP& csp, double eta = 0.25);
  static ProjectionScheme full_marking(const AtomicCSP& csp,
                                       double eta = 0.25);
  /// R contiguous blocks of sizes floor(A/R) or ceil(A/R): block 0 holds
  /// values 0..floor(A/R)-1 and the A mod R larger blocks come last.
  static Partition contiguous_partition(std::uint32_t alphabet_size,
                                        std::uint32_t num_blocks);

  std::size_t num_vars() const { return alphabet_.size(); }
  std::uint32_t alphabet_size(VarId v) const { return alphabet_[v]; }
  std::uint32_t num_blocks(VarId v) const {
    return block_start_[v + 1] - block_start_[v];
  }
  std::uint32_t block_size(VarId v, Value q) const {
    const auto b = block_start_[v] + q;
    return value_start_[b + 1] - value_start_[b];
  }
  std::span<const Value> block(VarId v, Value q) const {
    const auto b = block_start_[v] + q;
    return {values_.data() + value_start_[b], value_start_[b + 1] - value_start_[b]};
  }
  /// pi_v(x).
  Value project(VarId v, Value x) const { return block_of_[lookup_start_[v] + x]; }
  /// Uniform value of block q of v, unchecked. No randomness is used for a
  /// singleton block.
  Value preimage(VarId v, Value q, Rng& rng) const {
    const auto b = block_start_[v] + q;
    const auto lo = value_start_[b], size = value_start_[b + 1] - lo;
    return size == 1 ? values_[lo] : values_[lo + rng.below(size)];
  }

  Partition partition(VarId v) const;
  std::vector<Partition> partition_list() const;

  SchemeCase kind() const { return kind_; }
  double eta() const { return eta_; }
  void set_eta(double eta) { eta_ = eta; }
  /// Explicit kappa; when unset kappa follows the construction case.
  std::optional<double> kappa_override() const { return kappa_override_; }
  void set_kappa_override(std::optional<double> k) { kappa_override_ = k; }

  /// Restriction to all variables but `var` (ids above it shift down),
  /// matching pin_variable.
  ProjectionScheme without_variable(VarId var) const;

  friend bool operator==(const ProjectionScheme& a, const ProjectionScheme& b) {
    return a.alphabet_ == b.alphabet_ && a.block_start_ == b.block_start_ &&
           a.value_start_ == b.value_start_ && a.values_ == b.values_;
  }

 private:
  std::vector<std::uint32_t> alphabet_;
  std::vector<std::uint32_t> block_start_{0};  // per var, into value_start_
  std::vector<std::uint32_t> value_start_{0};  // per block, into values_
  std::vector<Value> values_;
  std::vector<std::uint32_t> lookup_start_{0};  // per var, into block_of_
  std::vector<Value> block_of_;
  SchemeCase kind_ = SchemeCase::kCustom;
  double eta_ = 0.25;
  std::optional<double> kappa_override_;
};

/// y(v) = pi_v(x(v)).
Assignment project(const ProjectionScheme& scheme, const Assignment& x);

/// Uniform value of block y_v of variable v. Consumes no randomness when the
/// block is a singleton.
Value sample_preimage(const ProjectionScheme& scheme, VarId v, Value y_v,
                      Rng& rng);

/// Projected forbidden value C_pi(v) of the i-th variable of constraint c.
inline Value projected_forbidden(const AtomicCSP& csp,
                                 const ProjectionScheme& scheme,
                                 ConstraintId c, std::size_t i) {
  const auto& con = csp.constraint(c);
  return scheme.project(con.vars[i], con.forbidden[i]);
}

/// The projected CSP Phi_pi over prod Q_v. Variables with |Q_v| = 1 keep a
/// one-letter alphabet, so the result is described by plain vectors rather
/// than an AtomicCSP (which requires alphabets of size >= 2).
struct ProjectedConstraints {
  std::vector<std::uint32_t> alphabets;
  std::vector<AtomicConstraint> constraints;
};
ProjectedConstraints projected_csp(const AtomicCSP& csp,
                                   const ProjectionScheme& scheme);

struct BValues {
  /// b = max_C b(C); 0 when there are no constraints.
  double b = 0.0;
  double log_b = -INFINITY;
  std::vector<double> per_constraint;
  std::vector<double> log_per_constraint;
};

/// b(C) = prod_{u in vbl(C)} 1 / |pi_u^{-1}(C_pi(u))|, accumulated in log
/// space. Throws std::invalid_argument on a scheme/CSP variable mismatch.
BValues compute_b(const AtomicCSP& csp, const ProjectionScheme& scheme);

/// Kappa for a construction case: 12 log(3000(Delta+A)) for Case 1,
/// 12 log(3000(Delta+k)) for Cases 2-3, 12 log(3000(Delta+A k)) for Case 4,
/// 12 log(k + 3000 Delta) for A in {5,7}, 12 log(3000(Delta+100)) for
/// Case 5 and the minimum 4 log(3000 Delta) otherwise. Delta is floored at 1.
double case_kappa(SchemeCase kind, std::size_t max_degree,
                  std::uint32_t max_alphabet, std::size_t max_width);

/// The scheme's kappa on this CSP (override, else case_kappa).
double scheme_kappa(const AtomicCSP& csp, const ProjectionScheme& scheme);

struct ZetaKappa {
  std::vector<double> zeta;
  double kappa = 0.0;
};

/// zeta(C) = max(1, max_{v in vbl-bar(C)} min((1-3b)^Delta / P_pi[C_pi(v)],
/// 2 Delta)) with the TV quantity q replaced by its upper bound 1.
/// Throws RegimeError when e * b * Delta > 1.
ZetaKappa compute_zeta_kappa(const AtomicCSP& csp,
                             const ProjectionScheme& scheme, double eta);

struct AdmissibilityReport {
  double eta = 0.0;
  std::size_t max_degree = 0;
  std::size_t max_width = 0;
  std::uint32_t max_blocks = 0;

  // (A1) b <= eta / (300 Delta)
  bool a1 = false;
  double b = 0.0;
  double a1_threshold = 0.0;
  bool a1_exact = false;  // decided with exact integer arithmetic

  // (A2) kappa >= 4 log(3000 Delta) and, per constraint,
  // |vbl-bar|^2 kappa^2 zeta prod(...) <= (60000 Delta)^-2
  bool a2 = false;
  double kappa = 0.0;
  double kappa_lower = 0.0;
  /// kappa / (log Delta + log q + log k); informational since the constant
  /// K is unspecified.
  double kappa_upper_ratio = 0.0;
  double a2_log_rhs = 0.0;
  std::vector<double> a2_log_lhs;  // -inf for an empty vbl-bar
  double a2_worst_log_margin = INFINITY;  // min over C of log rhs - log lhs
  std::vector<double> zeta;
  std::string a2_note;

  // (A3) factor-2 comparability of P_pi at shared variables
  bool a3 = false;
  double a3_min_ratio = 1.0;
  double a3_max_ratio = 1.0;

  // (A4) partition-backed lookups: O(1) projection and preimage sampling
  bool a4 = true;

  bool admissible() const { return a1 && a2 && a3 && a4; }
  nlohmann::json to_json() const;
};

AdmissibilityReport check_admissibility(const AtomicCSP& csp,
                                        const ProjectionScheme& scheme,
                                        double eta);

nlohmann::json scheme_to_json(const ProjectionScheme& scheme);
ProjectionScheme scheme_from_json(const nlohmann::json& j);

}  // namespace lllsample
