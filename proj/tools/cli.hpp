#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bpcross::cli
{

inline constexpr int exit_ok = 0;
inline constexpr int exit_failed_check = 1;
inline constexpr int exit_usage = 2;

/// Runs one subcommand. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bpcross::cli
