#ifndef KMISSING_CLI_HPP
#define KMISSING_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace kmissing {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitInsufficient = 3;

/// Entry point of the `kmissing` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace kmissing

#endif  // KMISSING_CLI_HPP
