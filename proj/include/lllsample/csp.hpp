#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace lllsample {

using Value = std::uint32_t;
using VarId = std::uint32_t;
using ConstraintId = std::uint32_t;

/// A full assignment: one value per variable, each inside its alphabet.
using Assignment = std::vector<Value>;

/// A partial assignment; std::nullopt marks an unassigned variable.
using PartialAssignment = std::vector<std::optional<Value>>;

/// A constraint violated by exactly one assignment to its variables: the
/// one that puts `forbidden[i]` on `vars[i]` for every i.
struct AtomicConstraint {
  std::vector<VarId> vars;
  std::vector<Value> forbidden;

  std::size_t size() const { return vars.size(); }
  friend bool operator==(const AtomicConstraint&,
                         const AtomicConstraint&) = default;
};

/// An atomic CSP: n variables with alphabets {0..size-1} and a list of
/// atomic constraints. Immutable once built; the constructor validates every
/// invariant and builds the variable -> incident-constraint index.
class AtomicCSP {
 public:
  AtomicCSP() = default;
  AtomicCSP(std::vector<std::uint32_t> alphabet_sizes,
            std::vector<AtomicConstraint> constraints);

  std::size_t num_vars() const { return alphabets_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }

  std::uint32_t alphabet_size(VarId v) const { return alphabets_[v]; }
  const std::vector<std::uint32_t>& alphabet_sizes() const {
    return alphabets_;
  }

  const AtomicConstraint& constraint(ConstraintId c) const {
    return constraints_[c];
  }
  const std::vector<AtomicConstraint>& constraints() const {
    return constraints_;
  }

  /// Ids of the constraints whose variable list contains v, ascending.
  std::span<const ConstraintId> incident(VarId v) const {
    return dep_index_[v];
  }

  /// Natural log of the number of full assignments.
  double log_state_space() const;

 private:
  std::vector<std::uint32_t> alphabets_;
  std::vector<AtomicConstraint> constraints_;
  std::vector<std::vector<ConstraintId>> dep_index_;
};

struct DegreeStats {
  /// Max over constraints of the number of constraints sharing at least one
  /// variable with it, the constraint itself included. 0 when m = 0.
  std::size_t max_degree = 0;
  /// Max constraint width. 0 when m = 0.
  std::size_t max_width = 0;
  std::vector<std::size_t> per_constraint;
};

DegreeStats degree_stats(const AtomicCSP& csp);

/// Ids of constraints violated by a full assignment, ascending.
/// Throws std::invalid_argument if x has the wrong length or a value out of
/// range.
std::vector<ConstraintId> evaluate(const AtomicCSP& csp, const Assignment& x);

/// Same, for a partial assignment in which unassigned variables are treated
/// as matching: a constraint is reported when every *assigned* variable of
/// it carries its forbidden value (vacuously so when none are assigned).
std::vector<ConstraintId> violated_by_partial(const AtomicCSP& csp,
                                              const PartialAssignment& y);

/// Overload for a fully specified partial assignment; throws
/// std::invalid_argument if any entry is unassigned.
std::vector<ConstraintId> evaluate(const AtomicCSP& csp,
                                   const PartialAssignment& x);

bool satisfies(const AtomicCSP& csp, std::span<const Value> x);

/// A hypergraph over vertices 0..num_vertices-1.
struct Hypergraph {
  std::size_t num_vertices = 0;
  std::vector<std::vector<VarId>> edges;
};

/// q-colouring CSP: alphabets of size q and, for each edge e and colour i,
/// a constraint forbidding e to be monochromatic in colour i. Constraints
/// are ordered edge-major: id = edge_index * q + colour.
AtomicCSP build_coloring_csp(const Hypergraph& hypergraph, std::uint32_t q);

/// Pins variable `var` to `value`: the variable is removed (higher ids shift
/// down by one), constraints disagreeing with the pin are dropped and
/// agreeing ones lose that variable. Returns std::nullopt if some
/// constraint consisted of `var` alone and is therefore violated.
std::optional<AtomicCSP> pin_variable(const AtomicCSP& csp, VarId var,
                                      Value value);

}  // namespace lllsample
