#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lllsample/csp.hpp"

namespace lllsample {

struct DimacsResult {
  AtomicCSP csp;
  /// One message per dropped tautological clause.
  std::vector<std::string> warnings;
};

/// Parses DIMACS CNF. DIMACS variable i (1-based) becomes variable i-1; a
/// clause becomes the constraint forbidding its unique falsifying
/// assignment (positive literal -> 0, negative literal -> 1). Duplicate
/// literals are merged and tautological clauses dropped with a warning.
/// Throws ParseError on a malformed header, out-of-range literal, or a
/// clause count that disagrees with the header.
DimacsResult parse_dimacs(std::istream& in);
DimacsResult parse_dimacs(std::string_view text);

/// Writes a CSP with all-binary alphabets as DIMACS CNF.
/// Throws std::invalid_argument for non-binary alphabets.
void write_dimacs(const AtomicCSP& csp, std::ostream& out);
std::string to_dimacs(const AtomicCSP& csp);

/// Edge-list hypergraph: one edge per line, whitespace-separated 0-based
/// vertex ids, `#` starts a comment. The vertex count is max id + 1 unless
/// `num_vertices` is given (and large enough).
Hypergraph parse_hypergraph(std::istream& in, std::size_t num_vertices = 0);
Hypergraph parse_hypergraph(std::string_view text,
                            std::size_t num_vertices = 0);

/// Debug dump: {"alphabets": [...], "constraints": [{"vars":..,
/// "forbidden":..}, ...]}.
nlohmann::json to_json(const AtomicCSP& csp);
AtomicCSP csp_from_json(const nlohmann::json& j);

/// "v 1 -2 3 0"-style model line for a binary assignment; for larger
/// alphabets the raw values are listed instead.
std::string model_line(const AtomicCSP& csp, const Assignment& x);

}  // namespace lllsample
