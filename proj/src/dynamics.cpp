#include "lllsample/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lllsample {

SamplerConfig SamplerConfig::derive(std::size_t n, std::size_t max_degree,
                                    double kappa, double eps, double eta,
                                    double c_t, std::uint64_t seed) {
  if (!(eps > 0.0 && eps <= 0.5)) {
    throw std::invalid_argument("eps must lie in (0, 1/2]");
  }
  if (!(kappa > 0.0) || !(c_t >= 0.0) || !(eta >= 0.0)) {
    throw std::invalid_argument("kappa, C_T and eta must be positive");
  }
  SamplerConfig cfg;
  cfg.eps = eps;
  cfg.eta = eta;
  cfg.kappa = kappa;
  cfg.c_t = c_t;
  cfg.n = n;
  cfg.max_degree = max_degree;
  cfg.seed = seed;
  if (n == 0) return cfg;
  const double nd = static_cast<double>(n);
  const double delta = static_cast<double>(std::max<std::size_t>(max_degree, 1));
  const double log_nk = std::log(nd * kappa / eps);
  cfg.T = static_cast<std::uint64_t>(
      std::ceil(c_t * kappa * nd * std::log(nd * delta / eps)));
  cfg.S = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::ceil(
             10.0 * std::pow(kappa * nd / eps, eta) * log_nk)));
  cfg.theta_comp = 20.0 * delta * log_nk;
  return cfg;
}

SamplerConfig SamplerConfig::for_instance(const AtomicCSP& csp,
                                          const ProjectionScheme& scheme,
                                          double eps, double c_t,
                                          std::uint64_t seed) {
  return derive(csp.num_vars(), degree_stats(csp).max_degree,
                scheme_kappa(csp, scheme), eps, scheme.eta(), c_t, seed);
}

nlohmann::json SamplerConfig::to_json() const {
  return {{"eps", eps},       {"eta", eta}, {"kappa", kappa},
          {"C_T", c_t},       {"n", n},     {"Delta", max_degree},
          {"seed", seed},     {"T", T},     {"S", S},
          {"theta_comp", theta_comp},       {"H", horizon()}};
}

ProjectedModel::ProjectedModel(const AtomicCSP& csp,
                               const ProjectionScheme& scheme)
    : csp_(&csp), scheme_(&scheme) {
  if (scheme.num_vars() != csp.num_vars()) {
    throw std::invalid_argument("scheme/CSP variable count mismatch");
  }
  for (VarId v = 0; v < csp.num_vars(); ++v) {
    if (scheme.alphabet_size(v) != csp.alphabet_size(v)) {
      throw std::invalid_argument("scheme/CSP alphabet mismatch");
    }
  }
  max_degree_ = degree_stats(csp).max_degree;
  for (const auto& con : csp.constraints()) {
    for (std::size_t i = 0; i < con.size(); ++i) {
      con_vars_.push_back(con.vars[i]);
      con_forb_.push_back(con.forbidden[i]);
      con_fp_.push_back(scheme.project(con.vars[i], con.forbidden[i]));
    }
    con_offset_.push_back(static_cast<std::uint32_t>(con_vars_.size()));
  }
  for (VarId v = 0; v < csp.num_vars(); ++v) {
    for (ConstraintId c : csp.incident(v)) {
      const auto& con = csp.constraint(c);
      const auto pos = std::find(con.vars.begin(), con.vars.end(), v) -
                       con.vars.begin();
      inc_con_.push_back(c);
      inc_fp_.push_back(con_fp_[con_offset_[c] + pos]);
    }
    var_offset_.push_back(static_cast<std::uint32_t>(inc_con_.size()));
  }
}

ProjectedState::ProjectedState(const ProjectedModel& model, std::vector<Value> y)
    : model_(&model),
      y_(std::move(y)),
      count_(model.num_constraints(), 0),
      unsat_pos_(model.num_constraints(), UINT32_MAX) {
  if (y_.size() != model.num_vars()) {
    throw std::invalid_argument("projected state has the wrong length");
  }
  for (VarId v = 0; v < y_.size(); ++v) {
    if (y_[v] >= model.scheme().num_blocks(v)) {
      throw std::invalid_argument("projected value out of range");
    }
  }
  for (ConstraintId c = 0; c < model.num_constraints(); ++c) {
    const VarId* vars = model.vars(c);
    const Value* fp = model.projected(c);
    for (std::uint32_t i = 0; i < model.size(c); ++i) {
      if (y_[vars[i]] == fp[i]) ++count_[c];
    }
    if (unsatisfied(c)) mark(c, true);
  }
}

ProjectedState ProjectedState::random(const ProjectedModel& model, Rng& rng) {
  std::vector<Value> y(model.num_vars());
  for (VarId v = 0; v < y.size(); ++v) {
    y[v] = static_cast<Value>(rng.below(model.scheme().num_blocks(v)));
  }
  return ProjectedState(model, std::move(y));
}

void ProjectedState::mark(ConstraintId c, bool now_unsat) {
  if (now_unsat) {
    unsat_pos_[c] = static_cast<std::uint32_t>(unsat_.size());
    unsat_.push_back(c);
  } else {
    const auto pos = unsat_pos_[c];
    const auto last = unsat_.back();
    unsat_[pos] = last;
    unsat_pos_[last] = pos;
    unsat_.pop_back();
    unsat_pos_[c] = UINT32_MAX;
  }
}

void ProjectedState::set(VarId v, Value value) {
  const Value old = y_[v];
  if (old == value) return;
  y_[v] = value;
  const ConstraintId* inc = model_->incident(v);
  const Value* fp = model_->incident_fp(v);
  const std::uint32_t deg = model_->degree(v);
  for (std::uint32_t i = 0; i < deg; ++i) {
    const ConstraintId c = inc[i];
    if (old == fp[i]) {
      if (unsatisfied(c)) mark(c, false);
      --count_[c];
    } else if (value == fp[i]) {
      ++count_[c];
      if (unsatisfied(c)) mark(c, true);
    }
  }
}

bool ProjectedState::consistent() const {
  ProjectedState fresh(*model_, y_);
  if (fresh.count_ != count_) return false;
  auto a = unsat_;
  auto b = fresh.unsat_;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

ComponentExplorer::ComponentExplorer(const ProjectedModel& model)
    : model_(&model),
      var_stamp_(model.num_vars(), 0),
      con_stamp_(model.num_constraints(), 0) {}

void ComponentExplorer::grow(const ProjectedState& state, VarId removed,
                             double threshold, ComponentView& out) {
  const ProjectedModel& m = *model_;
  for (std::size_t head = 0; head < out.vars.size(); ++head) {
    const VarId u = out.vars[head];
    const ConstraintId* inc = m.incident(u);
    const Value* inc_fp = m.incident_fp(u);
    const std::uint32_t deg = m.degree(u);
    // The removed variable is always the first head, so every constraint
    // containing it is decided here and needs the Y^{-v} correction.
    const bool is_removed = u == removed;
    for (std::uint32_t i = 0; i < deg; ++i) {
      const ConstraintId c = inc[i];
      if (con_stamp_[c] == epoch_) continue;
      con_stamp_[c] = epoch_;
      std::uint32_t need = m.size(c);
      std::uint32_t have = state.count(c);
      if (is_removed) {
        --need;
        if (state.y(u) == inc_fp[i]) --have;
      }
      if (have != need) continue;
      out.constraints.push_back(c);
      if (static_cast<double>(out.constraints.size()) > threshold) {
        out.oversized = true;
        return;
      }
      const VarId* vars = m.vars(c);
      for (std::uint32_t j = 0; j < m.size(c); ++j) {
        if (var_stamp_[vars[j]] != epoch_) {
          var_stamp_[vars[j]] = epoch_;
          out.vars.push_back(vars[j]);
        }
      }
    }
  }
}

namespace {

void next_epoch(std::uint32_t& epoch, std::vector<std::uint32_t>& a,
                std::vector<std::uint32_t>& b) {
  if (++epoch == 0) {
    std::fill(a.begin(), a.end(), 0);
    std::fill(b.begin(), b.end(), 0);
    epoch = 1;
  }
}

}  // namespace

void ComponentExplorer::explore(const ProjectedState& state, VarId v,
                                double threshold, ComponentView& out) {
  next_epoch(epoch_, var_stamp_, con_stamp_);
  out.vars.clear();
  out.constraints.clear();
  out.oversized = false;
  var_stamp_[v] = epoch_;
  out.vars.push_back(v);
  grow(state, v, threshold, out);
}

bool ComponentExplorer::all_components(const ProjectedState& state,
                                       double threshold,
                                       std::vector<ComponentView>& out) {
  next_epoch(epoch_, var_stamp_, con_stamp_);
  out.clear();
  // Visit seeds in id order so the component enumeration is deterministic.
  std::vector<ConstraintId> seeds = state.unsat();
  std::sort(seeds.begin(), seeds.end());
  for (ConstraintId c : seeds) {
    const VarId first = model_->vars(c)[0];
    if (var_stamp_[first] == epoch_) continue;
    out.emplace_back();
    var_stamp_[first] = epoch_;
    out.back().vars.push_back(first);
    grow(state, UINT32_MAX, threshold, out.back());
    if (out.back().oversized) return false;
  }
  return true;
}

void ChainDiagnostics::merge(const ChainDiagnostics& other) {
  steps += other.steps;
  s1 += other.s1;
  s2 += other.s2;
  rejection_rounds += other.rejection_rounds;
  if (other.component_histogram.size() > component_histogram.size()) {
    component_histogram.resize(other.component_histogram.size(), 0);
  }
  for (std::size_t s = 0; s < other.component_histogram.size(); ++s) {
    component_histogram[s] += other.component_histogram[s];
  }
}

nlohmann::json ChainDiagnostics::to_json() const {
  nlohmann::json hist = nlohmann::json::object();
  for (std::size_t s = 0; s < component_histogram.size(); ++s) {
    if (component_histogram[s] > 0) {
      hist[std::to_string(s)] = component_histogram[s];
    }
  }
  return {{"steps", steps},
          {"S1", s1},
          {"S2", s2},
          {"rejection_rounds", rejection_rounds},
          {"component_histogram", hist}};
}

Sampler::Sampler(const AtomicCSP& csp, const ProjectionScheme& scheme,
                 const SamplerConfig& cfg)
    : model_(csp, scheme),
      cfg_(cfg),
      explorer_(model_),
      x_(csp.num_vars(), 0),
      drawn_(csp.num_vars(), 0) {}

bool Sampler::satisfied_by(const ComponentView& comp,
                           const std::vector<Value>& x) const {
  for (ConstraintId c : comp.constraints) {
    const VarId* vars = model_.vars(c);
    const Value* forb = model_.forbidden(c);
    const std::uint32_t size = model_.size(c);
    std::uint32_t i = 0;
    while (i < size && x[vars[i]] == forb[i]) ++i;
    if (i == size) return false;
  }
  return true;
}

StepResult Sampler::sample_step(const ProjectedState& state, VarId v, Rng& rng) {
  const ProjectionScheme& scheme = model_.scheme();
  const std::uint32_t blocks = scheme.num_blocks(v);
  StepResult r;
  if (blocks == 1) return r;
  const std::uint32_t alphabet = scheme.alphabet_size(v);
  // Fast path: no constraint of v is unsatisfied by Y^{-v}, so C(H_v) is
  // empty and the first rejection round always accepts.
  {
    const ConstraintId* inc = model_.incident(v);
    const Value* fp = model_.incident_fp(v);
    const std::uint32_t deg = model_.degree(v);
    const Value yv = state.y(v);
    std::uint32_t i = 0;
    for (; i < deg; ++i) {
      const ConstraintId c = inc[i];
      if (state.count(c) - (yv == fp[i]) + 1 == model_.size(c)) break;
    }
    if (i == deg) {
      r.rounds = 1;
      r.value = scheme.project(v, static_cast<Value>(rng.below(alphabet)));
      return r;
    }
  }
  explorer_.explore(state, v, cfg_.theta_comp, comp_);
  r.component_constraints = comp_.constraints.size();
  if (comp_.oversized) {
    r.failure = StepFailure::kS1;
    r.value = static_cast<Value>(rng.below(blocks));
    return r;
  }
  if (comp_.constraints.empty()) {
    r.rounds = 1;
    r.value = scheme.project(v, static_cast<Value>(rng.below(alphabet)));
    return r;
  }
  for (std::uint64_t s = 0; s < cfg_.S; ++s) {
    ++r.rounds;
    // Values are drawn lazily: the round is rejected at the first violated
    // constraint and a constraint is settled by its first non-forbidden
    // value. Acceptance depends only on the drawn values, so the accepted
    // X(v) has the same law as with a full draw.
    ++round_;
    x_[v] = static_cast<Value>(rng.below(alphabet));
    drawn_[v] = round_;
    bool ok = true;
    for (ConstraintId c : comp_.constraints) {
      const VarId* vars = model_.vars(c);
      const Value* forb = model_.forbidden(c);
      const std::uint32_t size = model_.size(c);
      std::uint32_t i = 0;
      for (; i < size; ++i) {
        const VarId u = vars[i];
        if (drawn_[u] != round_) {
          x_[u] = scheme.preimage(u, state.y(u), rng);
          drawn_[u] = round_;
        }
        if (x_[u] != forb[i]) break;
      }
      if (i == size) {
        ok = false;
        break;
      }
    }
    if (ok) {
      r.value = scheme.project(v, x_[v]);
      return r;
    }
  }
  r.failure = StepFailure::kS2;
  r.value = static_cast<Value>(rng.below(blocks));
  return r;
}

void Sampler::glauber_run(ProjectedState& state, Rng& rng,
                          ChainDiagnostics& diag) {
  const std::size_t n = model_.num_vars();
  if (n == 0) return;
  const auto oversize_key = static_cast<std::size_t>(cfg_.theta_comp) + 1;
  for (std::uint64_t t = 0; t < cfg_.T; ++t) {
    const auto v = static_cast<VarId>(rng.below(n));
    const StepResult r = sample_step(state, v, rng);
    ++diag.steps;
    diag.rejection_rounds += r.rounds;
    if (r.failure == StepFailure::kS1) ++diag.s1;
    if (r.failure == StepFailure::kS2) ++diag.s2;
    if (model_.scheme().num_blocks(v) > 1) {
      diag.record_component(r.failure == StepFailure::kS1
                                ? oversize_key
                                : r.component_constraints);
    }
    state.set(v, r.value);
#ifndef NDEBUG
    if ((t + 1) % 1000 == 0 && !state.consistent()) {
      throw std::logic_error("projected-state bookkeeping out of sync");
    }
#endif
  }
}

Sampler::Lift Sampler::inv_sample(const ProjectedState& state, Rng& rng) {
  Lift out;
  if (!explorer_.all_components(state, cfg_.theta_comp, comps_)) {
    out.error = "I1";
    return out;
  }
  const ProjectionScheme& scheme = model_.scheme();
  Assignment x(model_.num_vars());
  for (VarId u = 0; u < x.size(); ++u) {
    x[u] = sample_preimage(scheme, u, state.y(u), rng);
  }
  for (const auto& comp : comps_) {
    bool accepted = false;
    for (std::uint64_t s = 0; s < cfg_.S && !accepted; ++s) {
      ++out.rounds;
      for (VarId u : comp.vars) x_[u] = sample_preimage(scheme, u, state.y(u), rng);
      accepted = satisfied_by(comp, x_);
    }
    if (!accepted) {
      out.error = "I2";
      return out;
    }
    for (VarId u : comp.vars) x[u] = x_[u];
  }
  if (!satisfies(model_.csp(), x)) {
    throw std::logic_error("InvSample produced a violating assignment");
  }
  out.x = std::move(x);
  return out;
}

Sampler::Outcome Sampler::run(Rng& rng) {
  Outcome out;
  ProjectedState state = ProjectedState::random(model_, rng);
  glauber_run(state, rng, out.chain);
  auto lift = inv_sample(state, rng);
  out.x = std::move(lift.x);
  out.error = std::move(lift.error);
  out.lift_rounds = lift.rounds;
  return out;
}

nlohmann::json SampleResult::diagnostics() const {
  nlohmann::json j = {{"config", config.to_json()},
                      {"chain", chain.to_json()},
                      {"lift_rounds", lift_rounds}};
  if (!error.empty()) j["error"] = error;
  return j;
}

SampleResult main_sample(const AtomicCSP& csp, const ProjectionScheme& scheme,
                         double eps, std::uint64_t seed, double c_t) {
  const auto cfg = SamplerConfig::for_instance(csp, scheme, eps, c_t, seed);
  Sampler sampler(csp, scheme, cfg);
  Rng rng(seed);
  auto outcome = sampler.run(rng);
  SampleResult r;
  r.x = std::move(outcome.x);
  r.error = std::move(outcome.error);
  r.config = cfg;
  r.chain = std::move(outcome.chain);
  r.lift_rounds = outcome.lift_rounds;
  return r;
}

}  // namespace lllsample
