#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lllsample {

inline constexpr const char* kToolVersion = "lllsample 1.0.0";

/// Looks up an environment variable; std::nullopt when unset.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// The process environment.
EnvLookup process_env();

/// Runs one command line (args exclude the program name) and writes JSON to
/// `out`, diagnostics to `err`. Returns 0 on success, 1 when the result is
/// an ERROR, 2 on usage, input or regime errors.
///
/// Subcommands: find, sample, count, check-projection, verify. The
/// environment may override C_T (LLLSAMPLE_CT) and the counting constants
/// (LLLSAMPLE_COUNT_THETA, LLLSAMPLE_COUNT_CN).
int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err, const EnvLookup& env = process_env());

}  // namespace lllsample
