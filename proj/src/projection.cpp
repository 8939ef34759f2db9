#include "lllsample/projection.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lllsample/error.hpp"

namespace lllsample {

namespace {

// Neumaier's compensated sum; the A2 products run over up to k terms whose
// logs differ by many orders of magnitude.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double floor_delta(std::size_t delta) {
  return static_cast<double>(std::max<std::size_t>(delta, 1));
}

void check_shape(const AtomicCSP& csp, const ProjectionScheme& scheme) {
  if (scheme.num_vars() != csp.num_vars()) {
    throw std::invalid_argument("scheme has " +
                                std::to_string(scheme.num_vars()) +
                                " variables, CSP has " +
                                std::to_string(csp.num_vars()));
  }
  for (std::size_t v = 0; v < csp.num_vars(); ++v) {
    if (scheme.alphabet_size(static_cast<VarId>(v)) !=
        csp.alphabet_size(static_cast<VarId>(v))) {
      throw std::invalid_argument("scheme alphabet mismatch at variable " +
                                  std::to_string(v));
    }
  }
}

std::uint32_t max_alphabet(const AtomicCSP& csp) {
  std::uint32_t a = 0;
  for (auto s : csp.alphabet_sizes()) a = std::max(a, s);
  return a;
}

// zeta(C) with q <- 1; no regime precondition.
std::vector<double> zeta_values(const AtomicCSP& csp,
                                const ProjectionScheme& scheme, double b,
                                double delta) {
  std::vector<double> zeta(csp.num_constraints(), 1.0);
  const double shrink = std::pow(1.0 - 3.0 * b, delta);
  for (std::size_t c = 0; c < csp.num_constraints(); ++c) {
    const auto& con = csp.constraint(static_cast<ConstraintId>(c));
    double z = 1.0;
    for (std::size_t i = 0; i < con.size(); ++i) {
      const VarId v = con.vars[i];
      if (scheme.num_blocks(v) <= 1) continue;
      const double p = static_cast<double>(scheme.block_size(
                           v, scheme.project(v, con.forbidden[i]))) /
                       scheme.alphabet_size(v);
      z = std::max(z, std::min(shrink / p, 2.0 * delta));
    }
    zeta[c] = z;
  }
  return zeta;
}

// Exact A1: for every C, 300 Delta <= eta * prod |block|. eta is a dyadic
// rational mant * 2^exp.
std::optional<bool> exact_a1(const AtomicCSP& csp,
                             const ProjectionScheme& scheme, double eta,
                             double delta) {
  using boost::multiprecision::cpp_int;
  if (!(eta > 0.0) || !std::isfinite(eta)) return std::nullopt;
  for (const auto& con : csp.constraints()) {
    if (con.size() > 64) return std::nullopt;
    for (auto v : con.vars) {
      if (scheme.alphabet_size(v) > (1u << 16)) return std::nullopt;
    }
  }
  int exp = 0;
  const double frac = std::frexp(eta, &exp);
  const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  exp -= 53;
  cpp_int lhs = 300 * static_cast<std::uint64_t>(delta);
  if (exp < 0) lhs <<= -exp;
  for (const auto& con : csp.constraints()) {
    cpp_int rhs = mant;
    if (exp > 0) rhs <<= exp;
    for (std::size_t i = 0; i < con.size(); ++i) {
      rhs *= scheme.block_size(con.vars[i],
                               scheme.project(con.vars[i], con.forbidden[i]));
    }
    if (lhs > rhs) return false;
  }
  return true;
}

}  // namespace

std::string to_string(SchemeCase c) {
  switch (c) {
    case SchemeCase::kIdentity: return "identity";
    case SchemeCase::kFullMarking: return "full-marking";
    case SchemeCase::kCustom: return "custom";
    case SchemeCase::kCase1: return "case1";
    case SchemeCase::kCase2: return "case2";
    case SchemeCase::kCase3: return "case3";
    case SchemeCase::kCase4: return "case4";
    case SchemeCase::kCase4Small: return "case4-small";
    case SchemeCase::kCase5: return "case5";
  }
  return "custom";
}

SchemeCase scheme_case_from_string(const std::string& name) {
  for (auto c : {SchemeCase::kIdentity, SchemeCase::kFullMarking,
                 SchemeCase::kCustom, SchemeCase::kCase1, SchemeCase::kCase2,
                 SchemeCase::kCase3, SchemeCase::kCase4,
                 SchemeCase::kCase4Small, SchemeCase::kCase5}) {
    if (to_string(c) == name) return c;
  }
  throw std::invalid_argument("unknown scheme case '" + name + "'");
}

ProjectionScheme::ProjectionScheme(
    const std::vector<std::uint32_t>& alphabet_sizes,
    const std::vector<Partition>& partitions, SchemeCase kind, double eta)
    : alphabet_(alphabet_sizes), kind_(kind), eta_(eta) {
  if (partitions.size() != alphabet_sizes.size()) {
    throw std::invalid_argument("one partition per variable required");
  }
  for (std::size_t v = 0; v < partitions.size(); ++v) {
    const auto a = alphabet_sizes[v];
    const std::string where = "variable " + std::to_string(v);
    if (partitions[v].empty()) throw std::invalid_argument(where + ": no blocks");
    std::vector<Value> owner(a, UINT32_MAX);
    for (std::size_t q = 0; q < partitions[v].size(); ++q) {
      auto block = partitions[v][q];
      if (block.empty()) throw std::invalid_argument(where + ": empty block");
      std::sort(block.begin(), block.end());
      for (auto x : block) {
        if (x >= a) throw std::invalid_argument(where + ": value out of range");
        if (owner[x] != UINT32_MAX) {
          throw std::invalid_argument(where + ": value in two blocks");
        }
        owner[x] = static_cast<Value>(q);
      }
      values_.insert(values_.end(), block.begin(), block.end());
      value_start_.push_back(static_cast<std::uint32_t>(values_.size()));
    }
    if (std::find(owner.begin(), owner.end(), UINT32_MAX) != owner.end()) {
      throw std::invalid_argument(where + ": blocks do not cover the alphabet");
    }
    block_start_.push_back(block_start_.back() +
                           static_cast<std::uint32_t>(partitions[v].size()));
    block_of_.insert(block_of_.end(), owner.begin(), owner.end());
    lookup_start_.push_back(static_cast<std::uint32_t>(block_of_.size()));
  }
}

ProjectionScheme ProjectionScheme::identity(const AtomicCSP& csp, double eta) {
  std::vector<Partition> parts;
  parts.reserve(csp.num_vars());
  for (auto a : csp.alphabet_sizes()) {
    Partition p(a);
    for (Value x = 0; x < a; ++x) p[x] = {x};
    parts.push_back(std::move(p));
  }
  return ProjectionScheme(csp.alphabet_sizes(), parts, SchemeCase::kIdentity,
                          eta);
}

ProjectionScheme ProjectionScheme::full_marking(const AtomicCSP& csp,
                                                double eta) {
  std::vector<Partition> parts;
  parts.reserve(csp.num_vars());
  for (auto a : csp.alphabet_sizes()) parts.push_back(contiguous_partition(a, 1));
  return ProjectionScheme(csp.alphabet_sizes(), parts,
                          SchemeCase::kFullMarking, eta);
}

ProjectionScheme::Partition ProjectionScheme::contiguous_partition(
    std::uint32_t alphabet_size, std::uint32_t num_blocks) {
  if (num_blocks == 0 || num_blocks > alphabet_size) {
    throw std::invalid_argument("need 1 <= blocks <= alphabet size");
  }
  const std::uint32_t base = alphabet_size / num_blocks;
  const std::uint32_t larger = alphabet_size % num_blocks;
  Partition p(num_blocks);
  Value x = 0;
  for (std::uint32_t q = 0; q < num_blocks; ++q) {
    const std::uint32_t size = base + (q >= num_blocks - larger ? 1 : 0);
    for (std::uint32_t i = 0; i < size; ++i) p[q].push_back(x++);
  }
  return p;
}

ProjectionScheme::Partition ProjectionScheme::partition(VarId v) const {
  Partition p(num_blocks(v));
  for (Value q = 0; q < p.size(); ++q) {
    auto b = block(v, q);
    p[q].assign(b.begin(), b.end());
  }
  return p;
}

std::vector<ProjectionScheme::Partition> ProjectionScheme::partition_list()
    const {
  std::vector<Partition> out;
  out.reserve(num_vars());
  for (VarId v = 0; v < num_vars(); ++v) out.push_back(partition(v));
  return out;
}

ProjectionScheme ProjectionScheme::without_variable(VarId var) const {
  if (var >= num_vars()) throw std::invalid_argument("variable out of range");
  std::vector<std::uint32_t> alphabets;
  std::vector<Partition> parts;
  for (VarId v = 0; v < num_vars(); ++v) {
    if (v == var) continue;
    alphabets.push_back(alphabet_[v]);
    parts.push_back(partition(v));
  }
  ProjectionScheme out(alphabets, parts, kind_, eta_);
  out.kappa_override_ = kappa_override_;
  return out;
}

Assignment project(const ProjectionScheme& scheme, const Assignment& x) {
  if (x.size() != scheme.num_vars()) {
    throw std::invalid_argument("assignment length does not match scheme");
  }
  Assignment y(x.size());
  for (VarId v = 0; v < x.size(); ++v) {
    if (x[v] >= scheme.alphabet_size(v)) {
      throw std::invalid_argument("value out of range");
    }
    y[v] = scheme.project(v, x[v]);
  }
  return y;
}

Value sample_preimage(const ProjectionScheme& scheme, VarId v, Value y_v,
                      Rng& rng) {
  if (y_v >= scheme.num_blocks(v)) {
    throw std::invalid_argument("projected value out of range");
  }
  return scheme.preimage(v, y_v, rng);
}

ProjectedConstraints projected_csp(const AtomicCSP& csp,
                                   const ProjectionScheme& scheme) {
  check_shape(csp, scheme);
  ProjectedConstraints out;
  out.alphabets.reserve(csp.num_vars());
  for (VarId v = 0; v < csp.num_vars(); ++v) {
    out.alphabets.push_back(scheme.num_blocks(v));
  }
  out.constraints.reserve(csp.num_constraints());
  for (ConstraintId c = 0; c < csp.num_constraints(); ++c) {
    const auto& con = csp.constraint(c);
    AtomicConstraint p{con.vars, {}};
    p.forbidden.reserve(con.size());
    for (std::size_t i = 0; i < con.size(); ++i) {
      p.forbidden.push_back(projected_forbidden(csp, scheme, c, i));
    }
    out.constraints.push_back(std::move(p));
  }
  return out;
}

BValues compute_b(const AtomicCSP& csp, const ProjectionScheme& scheme) {
  check_shape(csp, scheme);
  BValues out;
  const std::size_t m = csp.num_constraints();
  out.per_constraint.resize(m);
  out.log_per_constraint.resize(m);
  for (ConstraintId c = 0; c < m; ++c) {
    const auto& con = csp.constraint(c);
    CompensatedSum log_b;
    for (std::size_t i = 0; i < con.size(); ++i) {
      const auto size = scheme.block_size(
          con.vars[i], scheme.project(con.vars[i], con.forbidden[i]));
      log_b.add(-std::log(static_cast<double>(size)));
    }
    out.log_per_constraint[c] = log_b.value();
    out.per_constraint[c] = std::exp(log_b.value());
    if (out.log_per_constraint[c] > out.log_b) {
      out.log_b = out.log_per_constraint[c];
      out.b = out.per_constraint[c];
    }
  }
  return out;
}

double case_kappa(SchemeCase kind, std::size_t max_degree,
                  std::uint32_t max_alphabet, std::size_t max_width) {
  const double d = floor_delta(max_degree);
  const double a = max_alphabet;
  const double k = static_cast<double>(max_width);
  switch (kind) {
    case SchemeCase::kCase1: return 12.0 * std::log(3000.0 * (d + a));
    case SchemeCase::kCase2:
    case SchemeCase::kCase3: return 12.0 * std::log(3000.0 * (d + k));
    case SchemeCase::kCase4: return 12.0 * std::log(3000.0 * (d + a * k));
    case SchemeCase::kCase4Small: return 12.0 * std::log(k + 3000.0 * d);
    case SchemeCase::kCase5: return 12.0 * std::log(3000.0 * (d + 100.0));
    default: return 4.0 * std::log(3000.0 * d);
  }
}

double scheme_kappa(const AtomicCSP& csp, const ProjectionScheme& scheme) {
  if (scheme.kappa_override()) return *scheme.kappa_override();
  const auto stats = degree_stats(csp);
  return case_kappa(scheme.kind(), stats.max_degree, max_alphabet(csp),
                    stats.max_width);
}

ZetaKappa compute_zeta_kappa(const AtomicCSP& csp,
                             const ProjectionScheme& scheme, double eta) {
  (void)eta;  // zeta and kappa do not depend on eta; kept for symmetry.
  const auto b = compute_b(csp, scheme);
  const auto stats = degree_stats(csp);
  const double delta = floor_delta(stats.max_degree);
  if (std::exp(1.0) * b.b * delta > 1.0) {
    throw RegimeError("e * b * Delta = " +
                      std::to_string(std::exp(1.0) * b.b * delta) + " > 1");
  }
  return {zeta_values(csp, scheme, b.b, delta), scheme_kappa(csp, scheme)};
}

AdmissibilityReport check_admissibility(const AtomicCSP& csp,
                                        const ProjectionScheme& scheme,
                                        double eta) {
  AdmissibilityReport r;
  r.eta = eta;
  const auto stats = degree_stats(csp);
  r.max_degree = stats.max_degree;
  r.max_width = stats.max_width;
  for (VarId v = 0; v < scheme.num_vars(); ++v) {
    r.max_blocks = std::max(r.max_blocks, scheme.num_blocks(v));
  }
  const auto bv = compute_b(csp, scheme);
  const double delta = floor_delta(stats.max_degree);
  const std::size_t m = csp.num_constraints();

  r.b = bv.b;
  r.a1_threshold = eta / (300.0 * delta);
  if (m == 0) {
    r.a1 = true;
    r.a1_exact = true;
  } else if (auto exact = exact_a1(csp, scheme, eta, delta)) {
    r.a1 = *exact;
    r.a1_exact = true;
  } else {
    r.a1 = bv.log_b <= std::log(r.a1_threshold);
  }

  r.kappa = scheme_kappa(csp, scheme);
  r.kappa_lower = 4.0 * std::log(3000.0 * delta);
  const double denom = std::log(delta) + std::log(double(max_alphabet(csp))) +
                       std::log(std::max<double>(1.0, double(stats.max_width)));
  r.kappa_upper_ratio = denom > 0.0 ? r.kappa / denom : 0.0;
  r.a2_log_rhs = -2.0 * std::log(60000.0 * delta);
  r.a2_log_lhs.assign(m, -INFINITY);
  bool a2 = r.kappa >= r.kappa_lower;
  if (!a2) r.a2_note = "kappa below 4 log(3000 Delta)";
  const bool finite = 3.0 * bv.b < 1.0;
  if (finite) {
    r.zeta = zeta_values(csp, scheme, bv.b, delta);
  } else {
    r.zeta.assign(m, INFINITY);
  }
  const double log_boost = finite ? -delta * std::log1p(-3.0 * bv.b) : INFINITY;
  const double tail = std::exp(-r.kappa / 3.0);
  for (ConstraintId c = 0; c < m; ++c) {
    const auto& con = csp.constraint(c);
    std::size_t free_vars = 0;
    CompensatedSum lhs;
    for (std::size_t i = 0; i < con.size(); ++i) {
      const VarId v = con.vars[i];
      if (scheme.num_blocks(v) <= 1) continue;
      ++free_vars;
      const double p = static_cast<double>(scheme.block_size(
                           v, scheme.project(v, con.forbidden[i]))) /
                       scheme.alphabet_size(v);
      lhs.add(std::log(std::exp(log_boost) * p + tail));
    }
    if (free_vars == 0) continue;  // empty product times |vbl-bar|^2 = 0
    if (!finite) {
      r.a2_log_lhs[c] = INFINITY;
      r.a2_worst_log_margin = -INFINITY;
      a2 = false;
      if (r.a2_note.empty()) r.a2_note = "3b >= 1";
      continue;
    }
    lhs.add(2.0 * std::log(static_cast<double>(free_vars)));
    lhs.add(2.0 * std::log(r.kappa));
    lhs.add(std::log(r.zeta[c]));
    r.a2_log_lhs[c] = lhs.value();
    const double margin = r.a2_log_rhs - r.a2_log_lhs[c];
    r.a2_worst_log_margin = std::min(r.a2_worst_log_margin, margin);
    if (margin < 0.0) a2 = false;
  }
  r.a2 = a2;

  // A3: same variable, so the probability ratio is a block-size ratio and
  // the factor-2 test is exact in integers.
  bool a3 = true;
  for (VarId v = 0; v < csp.num_vars(); ++v) {
    std::uint32_t lo = UINT32_MAX;
    std::uint32_t hi = 0;
    for (auto c : csp.incident(v)) {
      const auto& con = csp.constraint(c);
      const auto pos = static_cast<std::size_t>(
          std::find(con.vars.begin(), con.vars.end(), v) - con.vars.begin());
      const auto size = scheme.block_size(v, scheme.project(v, con.forbidden[pos]));
      lo = std::min(lo, size);
      hi = std::max(hi, size);
    }
    if (hi == 0 || csp.incident(v).size() < 2) continue;
    if (hi > 2 * lo) a3 = false;
    const double ratio = static_cast<double>(hi) / lo;
    r.a3_max_ratio = std::max(r.a3_max_ratio, ratio);
    r.a3_min_ratio = std::min(r.a3_min_ratio, 1.0 / ratio);
  }
  r.a3 = a3;
  return r;
}

nlohmann::json AdmissibilityReport::to_json() const {
  auto num = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
  };
  nlohmann::json lhs = nlohmann::json::array();
  for (double x : a2_log_lhs) lhs.push_back(num(x));
  nlohmann::json z = nlohmann::json::array();
  for (double x : zeta) z.push_back(num(x));
  return {
      {"admissible", admissible()},
      {"eta", eta},
      {"max_degree", max_degree},
      {"max_width", max_width},
      {"max_blocks", max_blocks},
      {"A1",
       {{"pass", a1}, {"b", b}, {"threshold", a1_threshold}, {"exact", a1_exact}}},
      {"A2",
       {{"pass", a2},
        {"kappa", kappa},
        {"kappa_lower", kappa_lower},
        {"kappa_upper_ratio", kappa_upper_ratio},
        {"log_rhs", a2_log_rhs},
        {"worst_log_margin", num(a2_worst_log_margin)},
        {"log_lhs", lhs},
        {"zeta", z},
        {"note", a2_note}}},
      {"A3", {{"pass", a3}, {"min_ratio", a3_min_ratio}, {"max_ratio", a3_max_ratio}}},
      {"A4", {{"pass", a4}}},
  };
}

nlohmann::json scheme_to_json(const ProjectionScheme& scheme) {
  nlohmann::json vars = nlohmann::json::array();
  std::vector<std::uint32_t> alphabets;
  for (VarId v = 0; v < scheme.num_vars(); ++v) {
    vars.push_back(scheme.partition(v));
    alphabets.push_back(scheme.alphabet_size(v));
  }
  nlohmann::json kappa = nullptr;
  if (scheme.kappa_override()) kappa = *scheme.kappa_override();
  return {{"format", "lllsample-scheme"},
          {"version", 1},
          {"case", to_string(scheme.kind())},
          {"eta", scheme.eta()},
          {"kappa", kappa},
          {"alphabets", alphabets},
          {"variables", vars}};
}

ProjectionScheme scheme_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "lllsample-scheme") {
    throw std::invalid_argument("not an lllsample-scheme document");
  }
  auto parts = j.at("variables").get<std::vector<ProjectionScheme::Partition>>();
  std::vector<std::uint32_t> alphabets;
  if (j.contains("alphabets")) {
    alphabets = j.at("alphabets").get<std::vector<std::uint32_t>>();
  } else {
    for (const auto& p : parts) {
      std::uint32_t a = 0;
      for (const auto& block : p) a += static_cast<std::uint32_t>(block.size());
      alphabets.push_back(a);
    }
  }
  ProjectionScheme s(alphabets, parts,
                     scheme_case_from_string(j.value("case", "custom")),
                     j.value("eta", 0.25));
  if (j.contains("kappa") && !j.at("kappa").is_null()) {
    s.set_kappa_override(j.at("kappa").get<double>());
  }
  return s;
}

}  // namespace lllsample
