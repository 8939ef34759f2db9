#include "lllsample/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "lllsample/construct.hpp"
#include "lllsample/counting.hpp"
#include "lllsample/dynamics.hpp"
#include "lllsample/error.hpp"
#include "lllsample/formats.hpp"
#include "lllsample/lll_solver.hpp"
#include "lllsample/verify.hpp"

namespace lllsample {

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

namespace {

using nlohmann::json;

// A diagnostic that maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string format = "cnf";
  std::uint32_t q = 0;
  double eps = 0.1;
  double eta = 0.25;
  double delta = -1.0;  // per-command default when negative
  std::optional<std::uint64_t> seed;
  std::string scheme;
  bool strict = false;
  bool pretty = false;
  std::size_t count = 1;
  bool exact_fallback = true;
  std::uint64_t draws = 20000;
};

double env_double(const EnvLookup& env, const std::string& name, double fallback) {
  const auto v = env(name);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const double d = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument(name);
    return d;
  } catch (const std::exception&) {
    throw UsageError("environment variable " + name + " is not a number: '" +
                     *v + "'");
  }
}

struct Overrides {
  double c_t = 1.0;
  double count_theta = 1.0 / 8.0;
  double count_cn = 64.0;
};

Overrides read_overrides(const EnvLookup& env) {
  Overrides o;
  o.c_t = env_double(env, "LLLSAMPLE_CT", o.c_t);
  o.count_theta = env_double(env, "LLLSAMPLE_COUNT_THETA", o.count_theta);
  o.count_cn = env_double(env, "LLLSAMPLE_COUNT_CN", o.count_cn);
  return o;
}

AtomicCSP load_instance(const Options& o, std::vector<std::string>& warnings) {
  std::ifstream in(o.input);
  if (!in) throw UsageError("cannot open input file '" + o.input + "'");
  if (o.format == "cnf") {
    auto r = parse_dimacs(in);
    warnings = std::move(r.warnings);
    return std::move(r.csp);
  }
  if (o.q < 2) throw UsageError("--format hypergraph needs --q >= 2");
  return build_coloring_csp(parse_hypergraph(in), o.q);
}

struct SchemeChoice {
  ProjectionScheme scheme;
  std::string source;  // "auto-case", "file", "identity", "full-marking"
  std::optional<std::string> fallback;  // why auto construction was replaced
  std::optional<AdmissibilityReport> report;
};

SchemeChoice choose_scheme(const AtomicCSP& csp, const Options& o,
                           std::uint64_t seed) {
  SchemeChoice c;
  if (o.scheme == "identity") {
    c.source = "identity";
    c.scheme = ProjectionScheme::identity(csp, o.eta);
  } else if (o.scheme == "full-marking") {
    c.source = "full-marking";
    c.scheme = ProjectionScheme::full_marking(csp, o.eta);
  } else if (!o.scheme.empty()) {
    c.source = "file";
    std::ifstream in(o.scheme);
    if (!in) throw UsageError("cannot open scheme file '" + o.scheme + "'");
    json j;
    try {
      in >> j;
      c.scheme = scheme_from_json(j);
    } catch (const std::exception& e) {
      throw UsageError("bad scheme file '" + o.scheme + "': " + e.what());
    }
    if (c.scheme.num_vars() != csp.num_vars()) {
      throw UsageError("scheme has " + std::to_string(c.scheme.num_vars()) +
                       " variables, instance has " +
                       std::to_string(csp.num_vars()));
    }
    for (VarId v = 0; v < csp.num_vars(); ++v) {
      if (c.scheme.alphabet_size(v) != csp.alphabet_size(v)) {
        throw UsageError("scheme alphabet of variable " + std::to_string(v) +
                         " does not match the instance");
      }
    }
    c.scheme.set_eta(o.eta);
  } else {
    c.source = "auto-case";
    ConstructOptions opts;
    opts.seed = seed;
    opts.require_admissible = o.strict;
    try {
      auto r = construct_projection(csp, o.eta, 0.01, opts);
      c.scheme = std::move(r.scheme);
      c.report = std::move(r.report);
    } catch (const ConstructionError& e) {
      if (o.strict) throw RegimeError(e.what());
      c.fallback = e.what();
      c.scheme = ProjectionScheme::identity(csp, o.eta);
    }
  }
  if (!c.report) c.report = check_admissibility(csp, c.scheme, o.eta);
  if (o.strict && !c.report->admissible()) {
    throw RegimeError("projection scheme is not admissible (A1-A4); rerun "
                      "without --strict to proceed anyway");
  }
  return c;
}

json scheme_summary(const SchemeChoice& c) {
  json j = {{"source", c.source},
            {"case", to_string(c.scheme.kind())},
            {"admissible", c.report->admissible()}};
  if (c.fallback) j["fallback"] = *c.fallback;
  return j;
}

json manifest(const std::string& command, const Options& o, std::uint64_t seed,
              const Overrides& ov) {
  json m = {{"command", command},
            {"seed", seed},
            {"eta", o.eta},
            {"scheme_source", o.scheme.empty() ? "auto-case" : o.scheme},
            {"strict", o.strict},
            {"overrides",
             {{"C_T", ov.c_t},
              {"count_theta", ov.count_theta},
              {"count_c_N", ov.count_cn}}},
            {"tool_version", kToolVersion}};
  if (!o.input.empty()) {
    m["input"] = o.input;
    m["format"] = o.format;
    if (o.format == "hypergraph") m["q"] = o.q;
  }
  if (command == "sample") {
    m["eps"] = o.eps;
    m["count"] = o.count;
  }
  if (command == "find" || command == "count") m["delta"] = o.delta;
  if (command == "count") m["exact_fallback"] = o.exact_fallback;
  if (command == "verify") {
    m["eps"] = o.eps;
    m["draws"] = o.draws;
  }
  return m;
}

void emit(std::ostream& out, const json& j, bool pretty) {
  out << (pretty ? j.dump(2) : j.dump()) << "\n";
}

json assignment_json(const AtomicCSP& csp, const Assignment& x) {
  return {{"assignment", x}, {"model", model_line(csp, x)}};
}

int run_find(const Options& o, std::uint64_t seed, const Overrides& ov,
             std::ostream& out, std::ostream& err) {
  std::vector<std::string> warnings;
  const auto csp = load_instance(o, warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  Rng rng(seed);
  const auto r = find_satisfying(csp, o.delta, rng);
  json j = {{"manifest", manifest("find", o, seed, ov)}};
  if (!r) {
    j["error"] = "budget exhausted";
    j["attempts"] = mt_attempts(o.delta);
    emit(out, j, o.pretty);
    if (o.pretty) err << "find: no satisfying assignment within budget\n";
    return 1;
  }
  j.update(assignment_json(csp, r->values));
  j["resamplings"] = r->resamplings;
  j["attempts"] = r->attempts;
  j["verified"] = satisfies(csp, r->values);
  emit(out, j, o.pretty);
  if (o.pretty) {
    err << "find: satisfying assignment after " << r->resamplings
        << " resamplings (attempt " << r->attempts << ")\n";
  }
  return 0;
}

int run_sample(const Options& o, std::uint64_t seed, const Overrides& ov,
               std::ostream& out, std::ostream& err) {
  if (o.count == 0) throw UsageError("--count must be at least 1");
  std::vector<std::string> warnings;
  const auto csp = load_instance(o, warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  const auto choice = choose_scheme(csp, o, seed);
  if (choice.fallback) {
    err << "warning: scheme construction failed (" << *choice.fallback
        << "); using the identity scheme\n";
  }

  json j = {{"manifest", manifest("sample", o, seed, ov)},
            {"scheme", scheme_summary(choice)}};
  if (o.count == 1) {
    const auto r = main_sample(csp, choice.scheme, o.eps, seed, ov.c_t);
    j["diagnostics"] = r.diagnostics();
    if (!r.x) {
      j["error"] = r.error;
      emit(out, j, o.pretty);
      if (o.pretty) err << "sample: ERROR(" << r.error << ")\n";
      return 1;
    }
    j.update(assignment_json(csp, *r.x));
    emit(out, j, o.pretty);
    if (o.pretty) err << "sample: ok\n";
    return 0;
  }

  // Independent chains: chain i is seeded with stream_seed(seed, i), and
  // results are collected by index so the output does not depend on
  // scheduling.
  std::vector<SampleResult> results(o.count);
  std::atomic<std::size_t> next{0};
  const std::size_t workers = std::min<std::size_t>(
      o.count, std::max(1u, std::thread::hardware_concurrency()));
  auto work = [&] {
    for (std::size_t i = next++; i < o.count; i = next++) {
      results[i] =
          main_sample(csp, choice.scheme, o.eps, stream_seed(seed, i), ov.c_t);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  json samples = json::array();
  std::size_t errors = 0;
  for (std::size_t i = 0; i < o.count; ++i) {
    const auto& r = results[i];
    json s = {{"index", i},
              {"seed", stream_seed(seed, i)},
              {"diagnostics", r.diagnostics()}};
    if (r.x) {
      s.update(assignment_json(csp, *r.x));
    } else {
      s["error"] = r.error;
      ++errors;
    }
    samples.push_back(std::move(s));
  }
  j["samples"] = std::move(samples);
  j["errors"] = errors;
  emit(out, j, o.pretty);
  if (o.pretty) {
    err << "sample: " << o.count - errors << " of " << o.count
        << " chains returned an assignment\n";
  }
  return errors == 0 ? 0 : 1;
}

int run_count(const Options& o, std::uint64_t seed, const Overrides& ov,
              std::ostream& out, std::ostream& err) {
  std::vector<std::string> warnings;
  const auto csp = load_instance(o, warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  const auto choice = choose_scheme(csp, o, seed);
  CountOptions copts;
  copts.c_t = ov.c_t;
  copts.theta = ov.count_theta;
  copts.c_n = ov.count_cn;
  copts.exact_fallback = o.exact_fallback;
  const auto est = approx_count(csp, choice.scheme, o.delta, seed, copts);
  json j = est.to_json();
  j["manifest"] = manifest("count", o, seed, ov);
  j["scheme"] = scheme_summary(choice);
  emit(out, j, o.pretty);
  if (!est.ok()) {
    if (o.pretty) err << "count: ERROR: " << est.error << "\n";
    return 1;
  }
  if (o.pretty) err << "count: estimate " << est.estimate() << "\n";
  return 0;
}

int run_check(const Options& o, std::uint64_t seed, const Overrides& ov,
              std::ostream& out, std::ostream& err) {
  std::vector<std::string> warnings;
  const auto csp = load_instance(o, warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  const auto choice = choose_scheme(csp, o, seed);
  json j = choice.report->to_json();
  j["manifest"] = manifest("check-projection", o, seed, ov);
  j["scheme"] = scheme_summary(choice);
  j["projection"] = scheme_to_json(choice.scheme);
  emit(out, j, o.pretty);
  if (o.pretty) {
    err << "check-projection: " << to_string(choice.scheme.kind()) << " scheme, "
        << (choice.report->admissible() ? "admissible" : "not admissible")
        << "\n";
  }
  return 0;
}

int run_verify(const Options& o, std::uint64_t seed, const Overrides& ov,
               std::ostream& out, std::ostream& err) {
  VerifyOptions vo;
  vo.seed = seed;
  vo.draws = o.draws;
  vo.eps = o.eps;
  json j = run_verification(vo);
  j["manifest"] = manifest("verify", o, seed, ov);
  emit(out, j, o.pretty);
  const bool pass = j["pass"].get<bool>();
  if (o.pretty) {
    for (const auto& c : j["checks"]) {
      err << (c["pass"].get<bool>() ? "  pass  " : "  FAIL  ")
          << c["name"].get<std::string>() << "\n";
    }
  }
  return pass ? 0 : 1;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Uniform sampling and approximate counting for atomic CSPs",
               "lllsample"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Options o;
  std::uint64_t seed_value = 0;

  auto add_common = [&](CLI::App* sub, bool needs_input) {
    auto* in = sub->add_option("--input", o.input, "Instance file");
    if (needs_input) in->required();
    sub->add_option("--format", o.format, "cnf (DIMACS) or hypergraph")
        ->check(CLI::IsMember({"cnf", "hypergraph"}));
    sub->add_option("--q", o.q, "Colours for --format hypergraph");
    sub->add_option("--eta", o.eta, "Exponent eta of the rejection budget");
    sub->add_option("--seed", seed_value, "RNG seed (random when omitted)");
    sub->add_option("--scheme", o.scheme,
                    "Scheme JSON file, or identity / full-marking "
                    "(default: automatic construction)");
    sub->add_flag("--strict", o.strict,
                  "Fail unless the scheme passes A1-A4");
    sub->add_flag("--pretty", o.pretty,
                  "Indented JSON plus a human summary on stderr");
  };

  auto* find = app.add_subcommand("find", "Satisfying assignment by Moser-Tardos");
  add_common(find, true);
  find->add_option("--delta", o.delta, "Failure probability");

  auto* sample = app.add_subcommand("sample", "Approximately uniform sample");
  add_common(sample, true);
  sample->add_option("--eps", o.eps, "Total variation target, in (0, 1/2]");
  sample->add_option("--count", o.count, "Number of independent chains");

  auto* count = app.add_subcommand("count", "Approximate model count");
  add_common(count, true);
  count->add_option("--delta", o.delta, "Relative accuracy, in (0, 1)");
  count->add_flag("!--no-exact-fallback", o.exact_fallback,
                  "Always sample, even on small inadmissible stages");

  auto* check = app.add_subcommand("check-projection",
                                   "Admissibility report for the scheme");
  add_common(check, true);

  auto* verify = app.add_subcommand("verify", "Oracle suite on bundled instances");
  verify->add_option("--seed", seed_value, "RNG seed (random when omitted)");
  verify->add_option("--draws", o.draws, "Draws per statistical check");
  verify->add_option("--eps", o.eps, "Sampler accuracy used by the checks");
  verify->add_flag("--pretty", o.pretty, "Indented JSON plus a summary");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::uint64_t seed = seed_value;
  bool seed_given = false;
  for (auto* sub : {find, sample, count, check, verify}) {
    if (sub->parsed() && sub->count("--seed") > 0) seed_given = true;
  }
  if (!seed_given) {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }

  try {
    const auto ov = read_overrides(env);
    if (find->parsed()) {
      if (o.delta < 0) o.delta = 0.01;
      return run_find(o, seed, ov, out, err);
    }
    if (sample->parsed()) return run_sample(o, seed, ov, out, err);
    if (count->parsed()) {
      if (o.delta < 0) o.delta = 0.2;
      return run_count(o, seed, ov, out, err);
    }
    if (check->parsed()) return run_check(o, seed, ov, out, err);
    return run_verify(o, seed, ov, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "error: " << o.input << ": " << e.what() << "\n";
  } catch (const RegimeError& e) {
    err << "error: regime: " << e.what() << "\n";
  } catch (const GuardError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace lllsample
