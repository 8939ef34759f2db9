#include "lllsample/lll_solver.hpp"

namespace lllsample {

ResamplingProblem<Value> csp_resampling_problem(const AtomicCSP& csp) {
  ResamplingProblem<Value> problem;
  problem.num_vars = csp.num_vars();
  problem.sample = [&csp](std::uint32_t v, Rng& rng) {
    return static_cast<Value>(rng.below(csp.alphabet_size(v)));
  };
  problem.events.reserve(csp.num_constraints());
  for (ConstraintId c = 0; c < csp.num_constraints(); ++c) {
    const auto* con = &csp.constraint(c);
    problem.events.push_back(
        {con->vars, [con](const std::vector<Value>& x) {
           for (std::size_t i = 0; i < con->size(); ++i) {
             if (x[con->vars[i]] != con->forbidden[i]) return false;
           }
           return true;
         }});
  }
  return problem;
}

std::optional<MtResult<Value>> find_satisfying(const AtomicCSP& csp,
                                               double delta, Rng& rng,
                                               const MtOptions& options) {
  MtOptions opts = options;
  opts.delta = delta;
  auto result = moser_tardos(csp_resampling_problem(csp), rng, opts);
  if (result && !satisfies(csp, result->values)) {
    throw std::logic_error("Moser-Tardos returned a violating assignment");
  }
  return result;
}

}  // namespace lllsample
