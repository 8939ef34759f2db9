#include "lllsample/counting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lllsample/dynamics.hpp"
#include "lllsample/oracle.hpp"

namespace lllsample {

double stage_epsilon(std::size_t m, double delta, double theta) {
  if (m == 0) throw std::invalid_argument("stage_epsilon needs m >= 1");
  const double md = static_cast<double>(m);
  return theta * delta * delta / (md * std::log(md / delta));
}

std::uint64_t stage_samples(std::size_t n, double delta, double c_n) {
  return static_cast<std::uint64_t>(
      std::ceil(c_n * static_cast<double>(n) / (delta * delta)));
}

double CountEstimate::estimate() const { return std::exp(log_estimate); }

nlohmann::json CountEstimate::to_json() const {
  nlohmann::json stages_json = nlohmann::json::array();
  for (const auto& s : stages) {
    stages_json.push_back({{"var", s.var},
                           {"value", s.value},
                           {"marginal", s.marginal},
                           {"samples", s.samples},
                           {"accepted", s.accepted},
                           {"errors", s.errors},
                           {"method", s.method},
                           {"admissible", s.admissible}});
  }
  nlohmann::json j = {{"log_estimate", log_estimate},
                      {"delta", delta},
                      {"eps_stage", eps_stage},
                      {"samples_per_stage", samples_per_stage},
                      {"seed", seed},
                      {"stages", stages_json}};
  if (ok()) {
    j["estimate"] = estimate();
  } else {
    j["error"] = error;
    j["error_stage"] = error_stage;
  }
  return j;
}

CountEstimate approx_count(const AtomicCSP& csp, const ProjectionScheme& scheme,
                           double delta, std::uint64_t seed,
                           const CountOptions& options) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0,1)");
  }
  if (scheme.num_vars() != csp.num_vars()) {
    throw std::invalid_argument("scheme/CSP variable count mismatch");
  }
  CountEstimate out;
  out.delta = delta;
  out.seed = seed;
  const std::size_t m = csp.num_constraints();
  out.eps_stage = m > 0 ? stage_epsilon(m, delta, options.theta) : 0.0;
  out.samples_per_stage = stage_samples(csp.num_vars(), delta, options.c_n);

  AtomicCSP current = csp;
  ProjectionScheme current_scheme = scheme;
  for (VarId stage = 0; stage < csp.num_vars(); ++stage) {
    StageRecord rec;
    rec.var = stage;
    const std::uint32_t alphabet = current.alphabet_size(0);
    if (current.num_constraints() == 0) {
      rec.method = "free";
      rec.admissible = true;
      rec.marginal = 1.0 / alphabet;
    } else {
      const auto report =
          check_admissibility(current, current_scheme, current_scheme.eta());
      rec.admissible = report.admissible();
      std::vector<std::uint64_t> freq(alphabet, 0);
      std::uint64_t accepted = 0;
      if (!rec.admissible && options.exact_fallback &&
          state_space_size(current.alphabet_sizes()) <= options.exact_limit) {
        rec.method = "exact";
        for_each_assignment(
            current.alphabet_sizes(),
            [&](const Assignment& x) {
              if (satisfies(current, x)) {
                ++freq[x[0]];
                ++accepted;
              }
            },
            options.exact_limit);
      } else {
        rec.method = "sampler";
        rec.samples = out.samples_per_stage;
        const auto cfg = SamplerConfig::for_instance(
            current, current_scheme, out.eps_stage, options.c_t, seed);
        Sampler sampler(current, current_scheme, cfg);
        Rng rng(stream_seed(seed, stage));
        for (std::uint64_t i = 0; i < rec.samples; ++i) {
          auto outcome = sampler.run(rng);
          if (outcome.x) {
            ++freq[(*outcome.x)[0]];
            ++accepted;
          } else {
            ++rec.errors;
          }
        }
        if (static_cast<double>(rec.errors) >
            options.max_error_rate * static_cast<double>(rec.samples)) {
          out.error = "ERROR rate " +
                      std::to_string(static_cast<double>(rec.errors) /
                                     static_cast<double>(rec.samples)) +
                      " exceeds " + std::to_string(options.max_error_rate);
        }
      }
      rec.accepted = accepted;
      if (out.error.empty() && accepted == 0) {
        out.error = "pinned instance is unsatisfiable";
      }
      if (!out.error.empty()) {
        out.error_stage = stage;
        out.stages.push_back(rec);
        return out;
      }
      // Most frequent value; ties go to the smallest.
      rec.value = static_cast<Value>(
          std::max_element(freq.begin(), freq.end()) - freq.begin());
      rec.marginal = static_cast<double>(freq[rec.value]) /
                     static_cast<double>(accepted);
    }
    out.log_estimate -= std::log(rec.marginal);
    out.stages.push_back(rec);
    if (stage + 1 == csp.num_vars()) break;
    auto pinned = pin_variable(current, 0, rec.value);
    if (!pinned) {
      out.error = "pinned instance is unsatisfiable";
      out.error_stage = stage;
      return out;
    }
    current = std::move(*pinned);
    current_scheme = current_scheme.without_variable(0);
  }
  return out;
}

}  // namespace lllsample
