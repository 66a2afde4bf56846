#pragma once

#include <string>
#include <vector>

namespace fairdiv::cli {

// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_solver_error = 3;
inline constexpr int exit_acceptance_failure = 4;

struct CommandResult {
  int exit_code = exit_ok;
  std::vector<std::string> written_files;
  std::string message;  // printed to stdout (reports) or stderr (errors)
};

struct CommonFlags {
  std::string config_path;
  std::string out_dir;       // empty: take from config
  std::string mode;          // "", "quadrature", "mc", "auto"
  long long seed = -1;       // <0: take from config
  long long samples = -1;    // <0: take from config
};

CommandResult cmd_ceei(const CommonFlags& flags);
CommandResult cmd_shadow(const CommonFlags& flags);
CommandResult cmd_certify(const CommonFlags& flags);
CommandResult cmd_twogood(const CommonFlags& flags);
CommandResult cmd_evaluate(const CommonFlags& flags,
                           const std::string& menu_path);
CommandResult cmd_reproduce_examples(const CommonFlags& flags);

// Full argv dispatch; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace fairdiv::cli
