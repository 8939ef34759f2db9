#include "lllsample/formats.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "lllsample/error.hpp"

namespace lllsample {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t j = i;
    while (j < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

template <typename Int>
bool parse_int(std::string_view token, Int& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

DimacsResult parse_dimacs(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::size_t clauses_seen = 0;
  std::vector<std::int64_t> pending;
  std::size_t pending_line = 0;
  std::vector<AtomicConstraint> constraints;
  std::vector<std::string> warnings;

  auto finish_clause = [&](std::size_t at_line) {
    ++clauses_seen;
    std::sort(pending.begin(), pending.end(),
              [](std::int64_t a, std::int64_t b) {
                return std::llabs(a) != std::llabs(b) ? std::llabs(a) < std::llabs(b)
                                                      : a < b;
              });
    pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
    for (std::size_t i = 1; i < pending.size(); ++i) {
      if (std::llabs(pending[i]) == std::llabs(pending[i - 1])) {
        warnings.push_back("line " + std::to_string(at_line) +
                           ": tautological clause dropped");
        pending.clear();
        return;
      }
    }
    if (pending.empty()) {
      // The empty clause is unsatisfiable and has no atomic encoding.
      throw ParseError(at_line, "empty clause");
    }
    AtomicConstraint con;
    for (auto lit : pending) {
      con.vars.push_back(static_cast<VarId>(std::llabs(lit) - 1));
      con.forbidden.push_back(lit > 0 ? 0u : 1u);
    }
    constraints.push_back(std::move(con));
    pending.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens[0][0] == 'c') continue;
    if (tokens[0] == "%") break;  // SATLIB trailer
    if (tokens[0] == "p") {
      if (have_header) throw ParseError(line_no, "duplicate header");
      if (tokens.size() != 4 || tokens[1] != "cnf" ||
          !parse_int(tokens[2], n) || !parse_int(tokens[3], m) || n < 0 ||
          m < 0) {
        throw ParseError(line_no, "malformed header, expected 'p cnf <n> <m>'");
      }
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(line_no, "clause before header");
    for (auto token : tokens) {
      std::int64_t lit = 0;
      if (!parse_int(token, lit)) {
        throw ParseError(line_no, "bad literal '" + std::string(token) + "'");
      }
      if (lit == 0) {
        finish_clause(pending_line ? pending_line : line_no);
        pending_line = 0;
        continue;
      }
      if (std::llabs(lit) > n) {
        throw ParseError(line_no, "literal " + std::to_string(lit) +
                                      " out of range (n = " +
                                      std::to_string(n) + ")");
      }
      if (pending.empty()) pending_line = line_no;
      pending.push_back(lit);
    }
  }
  if (!have_header) throw ParseError(line_no ? line_no : 1, "missing header");
  if (!pending.empty()) {
    throw ParseError(line_no, "last clause is not 0-terminated");
  }
  if (clauses_seen != static_cast<std::size_t>(m)) {
    throw ParseError(line_no, "header declares " + std::to_string(m) +
                                  " clauses but " +
                                  std::to_string(clauses_seen) + " found");
  }
  return {AtomicCSP(std::vector<std::uint32_t>(static_cast<std::size_t>(n), 2),
                    std::move(constraints)),
          std::move(warnings)};
}

DimacsResult parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in);
}

void write_dimacs(const AtomicCSP& csp, std::ostream& out) {
  for (auto a : csp.alphabet_sizes()) {
    if (a != 2) throw std::invalid_argument("DIMACS needs binary alphabets");
  }
  out << "p cnf " << csp.num_vars() << ' ' << csp.num_constraints() << '\n';
  for (const auto& con : csp.constraints()) {
    for (std::size_t i = 0; i < con.vars.size(); ++i) {
      const auto var = static_cast<std::int64_t>(con.vars[i]) + 1;
      out << (con.forbidden[i] == 0 ? var : -var) << ' ';
    }
    out << "0\n";
  }
}

std::string to_dimacs(const AtomicCSP& csp) {
  std::ostringstream out;
  write_dimacs(csp, out);
  return out.str();
}

Hypergraph parse_hypergraph(std::istream& in, std::size_t num_vertices) {
  Hypergraph h;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_id_plus_one = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    std::vector<VarId> edge;
    for (auto token : tokens) {
      std::uint32_t id = 0;
      if (!parse_int(token, id)) {
        throw ParseError(line_no, "bad vertex id '" + std::string(token) + "'");
      }
      edge.push_back(id);
      max_id_plus_one = std::max<std::size_t>(max_id_plus_one, id + 1ULL);
    }
    auto sorted = edge;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ParseError(line_no, "edge repeats a vertex");
    }
    h.edges.push_back(std::move(edge));
  }
  if (num_vertices != 0 && num_vertices < max_id_plus_one) {
    throw ParseError(0, "vertex id exceeds declared vertex count");
  }
  h.num_vertices = num_vertices != 0 ? num_vertices : max_id_plus_one;
  return h;
}

Hypergraph parse_hypergraph(std::string_view text, std::size_t num_vertices) {
  std::istringstream in{std::string(text)};
  return parse_hypergraph(in, num_vertices);
}

nlohmann::json to_json(const AtomicCSP& csp) {
  nlohmann::json constraints = nlohmann::json::array();
  for (const auto& con : csp.constraints()) {
    constraints.push_back({{"vars", con.vars}, {"forbidden", con.forbidden}});
  }
  return {{"alphabets", csp.alphabet_sizes()}, {"constraints", constraints}};
}

AtomicCSP csp_from_json(const nlohmann::json& j) {
  std::vector<AtomicConstraint> constraints;
  for (const auto& c : j.at("constraints")) {
    constraints.push_back({c.at("vars").get<std::vector<VarId>>(),
                           c.at("forbidden").get<std::vector<Value>>()});
  }
  return AtomicCSP(j.at("alphabets").get<std::vector<std::uint32_t>>(),
                   std::move(constraints));
}

std::string model_line(const AtomicCSP& csp, const Assignment& x) {
  const bool binary =
      std::all_of(csp.alphabet_sizes().begin(), csp.alphabet_sizes().end(),
                  [](auto a) { return a == 2; });
  std::ostringstream out;
  out << 'v';
  for (std::size_t v = 0; v < x.size(); ++v) {
    if (binary) {
      const auto lit = static_cast<std::int64_t>(v) + 1;
      out << ' ' << (x[v] == 1 ? lit : -lit);
    } else {
      out << ' ' << x[v];
    }
  }
  out << " 0";
  return out.str();
}

}  // namespace lllsample
