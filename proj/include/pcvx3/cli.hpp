#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pcvx3::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotHalted = 2;
inline constexpr int kExitVerdictFailed = 3;

// args excludes the program name. Summary JSON goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main_entry(int argc, char** argv);

// "lo:hi:n" -> n log-spaced values.
std::vector<double> parse_delta_spec(const std::string& spec);

}  // namespace pcvx3::cli
