#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lllsample/csp.hpp"
#include "lllsample/projection.hpp"
#include "lllsample/rng.hpp"

namespace lllsample {

/// Schedule of the projected chain.
///   T = ceil(C_T kappa n ln(n Delta / eps))
///   S = ceil(10 (kappa n / eps)^eta ln(n kappa / eps))
///   theta_comp = 20 Delta ln(n kappa / eps)
/// Delta is floored at 1; T and S are 0 when n = 0. eps must lie in (0, 1/2].
struct SamplerConfig {
  double eps = 0.1;
  double eta = 0.25;
  double kappa = 1.0;
  double c_t = 1.0;
  std::size_t n = 0;
  std::size_t max_degree = 0;
  std::uint64_t seed = 0;

  std::uint64_t T = 0;
  std::uint64_t S = 0;
  double theta_comp = 0.0;

  static SamplerConfig derive(std::size_t n, std::size_t max_degree,
                              double kappa, double eps, double eta,
                              double c_t = 1.0, std::uint64_t seed = 0);
  /// kappa from scheme_kappa, eta from the scheme.
  static SamplerConfig for_instance(const AtomicCSP& csp,
                                    const ProjectionScheme& scheme, double eps,
                                    double c_t = 1.0, std::uint64_t seed = 0);
  /// Exposed for diagnostics only: 100 kappa n.
  double horizon() const { return 100.0 * kappa * static_cast<double>(n); }
  nlohmann::json to_json() const;
};

/// Flat view of the projected CSP Phi_pi used by the chain: constraint
/// variables, projected and original forbidden values, and the incidence
/// lists with each variable's position inside its constraints.
class ProjectedModel {
 public:
  ProjectedModel(const AtomicCSP& csp, const ProjectionScheme& scheme);

  const AtomicCSP& csp() const { return *csp_; }
  const ProjectionScheme& scheme() const { return *scheme_; }
  std::size_t num_vars() const { return scheme_->num_vars(); }
  std::size_t num_constraints() const { return con_offset_.size() - 1; }
  std::size_t max_degree() const { return max_degree_; }

  std::uint32_t size(ConstraintId c) const {
    return con_offset_[c + 1] - con_offset_[c];
  }
  const VarId* vars(ConstraintId c) const { return &con_vars_[con_offset_[c]]; }
  const Value* projected(ConstraintId c) const { return &con_fp_[con_offset_[c]]; }
  const Value* forbidden(ConstraintId c) const { return &con_forb_[con_offset_[c]]; }

  std::uint32_t degree(VarId v) const { return var_offset_[v + 1] - var_offset_[v]; }
  const ConstraintId* incident(VarId v) const { return &inc_con_[var_offset_[v]]; }
  /// Projected forbidden value of v in its i-th incident constraint.
  const Value* incident_fp(VarId v) const { return &inc_fp_[var_offset_[v]]; }

 private:
  const AtomicCSP* csp_;
  const ProjectionScheme* scheme_;
  std::size_t max_degree_ = 0;
  std::vector<std::uint32_t> con_offset_{0};
  std::vector<VarId> con_vars_;
  std::vector<Value> con_fp_;
  std::vector<Value> con_forb_;
  std::vector<std::uint32_t> var_offset_{0};
  std::vector<ConstraintId> inc_con_;
  std::vector<Value> inc_fp_;
};

/// Y in prod Q_v with, per projected constraint, the number of its variables
/// sitting at their forbidden projected value and the set of constraints
/// that Y violates (count == size).
class ProjectedState {
 public:
  ProjectedState(const ProjectedModel& model, std::vector<Value> y);
  /// (M1): independent uniform Y_0(v) in Q_v.
  static ProjectedState random(const ProjectedModel& model, Rng& rng);

  const std::vector<Value>& y() const { return y_; }
  Value y(VarId v) const { return y_[v]; }
  std::uint32_t count(ConstraintId c) const { return count_[c]; }
  bool unsatisfied(ConstraintId c) const {
    return count_[c] == model_->size(c);
  }
  /// Unsatisfied constraint ids, in no particular order.
  const std::vector<ConstraintId>& unsat() const { return unsat_; }

  /// Sets Y(v), updating the counts of v's incident constraints only.
  void set(VarId v, Value value);

  /// Bookkeeping matches a from-scratch recount.
  bool consistent() const;

 private:
  void mark(ConstraintId c, bool now_unsat);

  const ProjectedModel* model_;
  std::vector<Value> y_;
  std::vector<std::uint32_t> count_;
  std::vector<ConstraintId> unsat_;
  std::vector<std::uint32_t> unsat_pos_;  // UINT32_MAX when satisfied
};

/// A connected component of H(Y^{-v}) (or of H(Y)) and C(H'), the
/// unsatisfied constraints inside it.
struct ComponentView {
  std::vector<VarId> vars;
  std::vector<ConstraintId> constraints;
  /// Exploration stopped once |C(H')| exceeded the threshold; `vars` and
  /// `constraints` are then partial.
  bool oversized = false;
};

/// Reusable scratch space for component searches.
class ComponentExplorer {
 public:
  explicit ComponentExplorer(const ProjectedModel& model);

  /// Component of v in H(Y^{-v}): v's own value is treated as unassigned,
  /// so a constraint counts as unsatisfied when every other variable is at
  /// its forbidden projected value. Stops once more than `threshold`
  /// constraints are collected.
  void explore(const ProjectedState& state, VarId v, double threshold,
               ComponentView& out);

  /// All components of H(Y) that contain an unsatisfied constraint; the
  /// remaining variables are singleton components without constraints.
  /// Returns false, leaving the first oversized component last in `out`, if
  /// some component has more than `threshold` constraints.
  bool all_components(const ProjectedState& state, double threshold,
                      std::vector<ComponentView>& out);

 private:
  void grow(const ProjectedState& state, VarId removed, double threshold,
            ComponentView& out);

  const ProjectedModel* model_;
  std::vector<std::uint32_t> var_stamp_;
  std::vector<std::uint32_t> con_stamp_;
  std::uint32_t epoch_ = 0;
};

enum class StepFailure { kNone, kS1, kS2 };

struct StepResult {
  Value value = 0;
  StepFailure failure = StepFailure::kNone;
  std::size_t component_constraints = 0;
  std::size_t rounds = 0;
};

struct ChainDiagnostics {
  std::uint64_t steps = 0;
  std::uint64_t s1 = 0;
  std::uint64_t s2 = 0;
  std::uint64_t rejection_rounds = 0;
  /// Entry s counts the steps that saw |C(H_v)| = s; oversized steps are
  /// counted under floor(threshold) + 1.
  std::vector<std::uint64_t> component_histogram;

  void record_component(std::size_t size) {
    if (size >= component_histogram.size()) {
      component_histogram.resize(size + 1, 0);
    }
    ++component_histogram[size];
  }

  void merge(const ChainDiagnostics& other);
  nlohmann::json to_json() const;
};

/// The chain's per-thread machinery: model, explorer and scratch buffers.
class Sampler {
 public:
  Sampler(const AtomicCSP& csp, const ProjectionScheme& scheme,
          const SamplerConfig& cfg);

  const ProjectedModel& model() const { return model_; }
  const SamplerConfig& config() const { return cfg_; }

  /// Sample(Y, v): one draw of the new Y(v). Variables with |Q_v| = 1 return
  /// their only value without consuming randomness.
  StepResult sample_step(const ProjectedState& state, VarId v, Rng& rng);

  /// (M2): T steps of the projected Glauber chain, in place.
  void glauber_run(ProjectedState& state, Rng& rng, ChainDiagnostics& diag);

  struct Lift {
    std::optional<Assignment> x;
    std::string error;  // "I1" or "I2" when x is empty
    std::uint64_t rounds = 0;
  };
  /// InvSample(Y): lifts Y to a satisfying assignment X with pi(X) = Y.
  Lift inv_sample(const ProjectedState& state, Rng& rng);

  struct Outcome {
    std::optional<Assignment> x;
    std::string error;
    ChainDiagnostics chain;
    std::uint64_t lift_rounds = 0;
  };
  /// Main: (M1) fresh Y_0, (M2) glauber_run, (M3) inv_sample.
  Outcome run(Rng& rng);

 private:
  bool satisfied_by(const ComponentView& comp, const std::vector<Value>& x) const;

  ProjectedModel model_;
  SamplerConfig cfg_;
  ComponentExplorer explorer_;
  ComponentView comp_;
  std::vector<ComponentView> comps_;
  std::vector<Value> x_;  // scratch full-size assignment
  // x_[u] is drawn in the current rejection round iff drawn_[u] == round_.
  std::vector<std::uint64_t> drawn_;
  std::uint64_t round_ = 0;
};

struct SampleResult {
  std::optional<Assignment> x;
  std::string error;
  SamplerConfig config;
  ChainDiagnostics chain;
  std::uint64_t lift_rounds = 0;
  nlohmann::json diagnostics() const;
};

/// Main(Phi, pi, eps) with a fresh chain seeded by `seed`. The scheme's
/// admissibility is not enforced here (callers check it); the non-failing
/// branches are exact for any scheme.
SampleResult main_sample(const AtomicCSP& csp, const ProjectionScheme& scheme,
                         double eps, std::uint64_t seed, double c_t = 1.0);

}  // namespace lllsample
