#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace levyfluct {

/// Exit codes of the levyfluct command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one levyfluct command. `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Formats a value with the shortest round-trip representation, keeping a
/// decimal point on integral values ("2.0").
[[nodiscard]] std::string format_value(double v);

} // namespace levyfluct
