#ifndef FRACLAP_TOOLS_COMMANDS_HPP
#define FRACLAP_TOOLS_COMMANDS_HPP

#include <string>
#include <vector>

namespace fraclap::cli {

/// Runs one `fraclap` command line. `args` excludes the program name.
/// Returns the process exit code; diagnostics go to stderr.
int run_cli(const std::vector<std::string>& args);

int run_cli(int argc, const char* const* argv);

/// Applies FRACLAP_THREADS, if set, as the OpenMP thread cap.
void apply_thread_env();

}  // namespace fraclap::cli

#endif  // FRACLAP_TOOLS_COMMANDS_HPP
