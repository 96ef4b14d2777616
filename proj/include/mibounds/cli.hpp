#pragma once

#include "mibounds/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mibounds {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAssertion = 2;

const std::vector<std::string>& cli_subcommands();

struct CliInvocation {
  std::string subcommand;
  std::optional<std::string> config_path;
  ConfigMap overrides;  // flag values, keyed like the config file
  std::string out_dir = "results";
  int jobs = 1;
};

/// Runs one subcommand. Results go to <out_dir>/<subcommand>-<seed>/ as
/// results.csv and meta.json; a short summary goes to `out` and diagnostics
/// to `err`.
int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err);

/// Parses argv (flags override config-file values) and dispatches.
int run_cli(int argc, char** argv);

}  // namespace mibounds
