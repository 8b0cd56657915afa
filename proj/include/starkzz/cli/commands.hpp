// commands.hpp: subcommand dispatch for the starkzz executable.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace starkzz::cli {

// Environment variable naming the default output directory.
inline constexpr const char* output_dir_env = "STARKZZ_OUTPUT_DIR";

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_usage = 2 };

// Parses argv (argv[0] is the program name) and runs one subcommand.
// Exit code 0 iff the command completed without error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// FNV-1a 64-bit digest as 16 lowercase hex digits.
std::string digest_hex(const std::string& bytes);

}  // namespace starkzz::cli
