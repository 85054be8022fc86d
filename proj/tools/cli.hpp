#ifndef HDX_TOOLS_CLI_HPP
#define HDX_TOOLS_CLI_HPP

#include <ostream>

namespace hdx::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kMismatch = 1;
inline constexpr int kUsage = 2;
inline constexpr int kIo = 3;

/// Entry point of the `hdx` tool with injectable streams (tests call this directly).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hdx::cli

#endif  // HDX_TOOLS_CLI_HPP
