#include "lllsample/csp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lllsample {

AtomicCSP::AtomicCSP(std::vector<std::uint32_t> alphabet_sizes,
                     std::vector<AtomicConstraint> constraints)
    : alphabets_(std::move(alphabet_sizes)),
      constraints_(std::move(constraints)),
      dep_index_(alphabets_.size()) {
  for (std::size_t v = 0; v < alphabets_.size(); ++v) {
    if (alphabets_[v] < 2) {
      throw std::invalid_argument("variable " + std::to_string(v) +
                                  " has alphabet size < 2");
    }
  }
  std::vector<std::uint32_t> seen(alphabets_.size(), 0);
  for (std::size_t c = 0; c < constraints_.size(); ++c) {
    const auto& con = constraints_[c];
    const std::string where = "constraint " + std::to_string(c);
    if (con.vars.empty()) throw std::invalid_argument(where + " is empty");
    if (con.vars.size() != con.forbidden.size()) {
      throw std::invalid_argument(where + ": vars/forbidden length mismatch");
    }
    for (std::size_t i = 0; i < con.vars.size(); ++i) {
      const VarId v = con.vars[i];
      if (v >= alphabets_.size()) {
        throw std::invalid_argument(where + ": variable out of range");
      }
      if (seen[v] == c + 1) {
        throw std::invalid_argument(where + ": repeated variable");
      }
      seen[v] = static_cast<std::uint32_t>(c + 1);
      if (con.forbidden[i] >= alphabets_[v]) {
        throw std::invalid_argument(where + ": forbidden value out of range");
      }
      dep_index_[v].push_back(static_cast<ConstraintId>(c));
    }
  }
}

double AtomicCSP::log_state_space() const {
  double total = 0.0;
  for (auto a : alphabets_) total += std::log(static_cast<double>(a));
  return total;
}

DegreeStats degree_stats(const AtomicCSP& csp) {
  DegreeStats stats;
  const std::size_t m = csp.num_constraints();
  stats.per_constraint.assign(m, 0);
  // Stamp neighbours per constraint so each overlapping constraint counts
  // once, however many variables it shares.
  std::vector<std::size_t> stamp(m, SIZE_MAX);
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t count = 0;
    for (VarId v : csp.constraint(c).vars) {
      for (ConstraintId other : csp.incident(v)) {
        if (stamp[other] != c) {
          stamp[other] = c;
          ++count;
        }
      }
    }
    stats.per_constraint[c] = count;
    stats.max_degree = std::max(stats.max_degree, count);
    stats.max_width = std::max(stats.max_width, csp.constraint(c).size());
  }
  return stats;
}

namespace {

void check_full(const AtomicCSP& csp, std::span<const Value> x) {
  if (x.size() != csp.num_vars()) {
    throw std::invalid_argument("assignment length does not match CSP");
  }
  for (std::size_t v = 0; v < x.size(); ++v) {
    if (x[v] >= csp.alphabet_size(static_cast<VarId>(v))) {
      throw std::invalid_argument("value out of range for variable " +
                                  std::to_string(v));
    }
  }
}

bool violates(const AtomicConstraint& con, std::span<const Value> x) {
  for (std::size_t i = 0; i < con.vars.size(); ++i) {
    if (x[con.vars[i]] != con.forbidden[i]) return false;
  }
  return true;
}

}  // namespace

std::vector<ConstraintId> evaluate(const AtomicCSP& csp, const Assignment& x) {
  check_full(csp, x);
  std::vector<ConstraintId> out;
  for (std::size_t c = 0; c < csp.num_constraints(); ++c) {
    if (violates(csp.constraint(c), x)) out.push_back(c);
  }
  return out;
}

std::vector<ConstraintId> evaluate(const AtomicCSP& csp,
                                   const PartialAssignment& x) {
  Assignment full(x.size());
  for (std::size_t v = 0; v < x.size(); ++v) {
    if (!x[v]) {
      throw std::invalid_argument("evaluate needs a full assignment; variable " +
                                  std::to_string(v) + " is unassigned");
    }
    full[v] = *x[v];
  }
  return evaluate(csp, full);
}

std::vector<ConstraintId> violated_by_partial(const AtomicCSP& csp,
                                              const PartialAssignment& y) {
  if (y.size() != csp.num_vars()) {
    throw std::invalid_argument("assignment length does not match CSP");
  }
  std::vector<ConstraintId> out;
  for (std::size_t c = 0; c < csp.num_constraints(); ++c) {
    const auto& con = csp.constraint(c);
    bool all_match = true;
    for (std::size_t i = 0; i < con.vars.size() && all_match; ++i) {
      const auto& value = y[con.vars[i]];
      if (value && *value != con.forbidden[i]) all_match = false;
    }
    if (all_match) out.push_back(c);
  }
  return out;
}

bool satisfies(const AtomicCSP& csp, std::span<const Value> x) {
  for (const auto& con : csp.constraints()) {
    if (violates(con, x)) return false;
  }
  return true;
}

AtomicCSP build_coloring_csp(const Hypergraph& hypergraph, std::uint32_t q) {
  if (q < 2) throw std::invalid_argument("need at least 2 colours");
  std::vector<AtomicConstraint> constraints;
  constraints.reserve(hypergraph.edges.size() * q);
  for (std::size_t e = 0; e < hypergraph.edges.size(); ++e) {
    const auto& edge = hypergraph.edges[e];
    if (edge.empty()) {
      throw std::invalid_argument("edge " + std::to_string(e) + " is empty");
    }
    auto sorted = edge;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("edge " + std::to_string(e) +
                                  " repeats a vertex");
    }
    if (edge.size() < 2) {
      throw std::invalid_argument("edge " + std::to_string(e) +
                                  " has fewer than 2 vertices");
    }
    for (std::uint32_t colour = 0; colour < q; ++colour) {
      constraints.push_back(
          {edge, std::vector<Value>(edge.size(), colour)});
    }
  }
  return AtomicCSP(std::vector<std::uint32_t>(hypergraph.num_vertices, q),
                   std::move(constraints));
}

std::optional<AtomicCSP> pin_variable(const AtomicCSP& csp, VarId var,
                                      Value value) {
  if (var >= csp.num_vars() || value >= csp.alphabet_size(var)) {
    throw std::invalid_argument("pin out of range");
  }
  auto remap = [var](VarId v) { return v > var ? v - 1 : v; };
  std::vector<std::uint32_t> alphabets;
  alphabets.reserve(csp.num_vars() - 1);
  for (std::size_t v = 0; v < csp.num_vars(); ++v) {
    if (v != var) alphabets.push_back(csp.alphabet_size(v));
  }
  std::vector<AtomicConstraint> constraints;
  for (const auto& con : csp.constraints()) {
    AtomicConstraint shrunk;
    bool keep = true;
    for (std::size_t i = 0; i < con.vars.size(); ++i) {
      if (con.vars[i] == var) {
        if (con.forbidden[i] != value) keep = false;
        continue;
      }
      shrunk.vars.push_back(remap(con.vars[i]));
      shrunk.forbidden.push_back(con.forbidden[i]);
    }
    if (!keep) continue;
    if (shrunk.vars.empty()) return std::nullopt;
    constraints.push_back(std::move(shrunk));
  }
  return AtomicCSP(std::move(alphabets), std::move(constraints));
}

}  // namespace lllsample
