#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace trajfid {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;  // schema/validation error, bad usage
inline constexpr int kExitIo = 2;          // I/O or parse error

// Entry point of `trajfid`. args[0] is the program name. Data goes to files
// named on the command line; messages go to `out` (help) and `err`.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace trajfid
