#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace teichlab::cli {

inline constexpr const char* kToolVersion = "teichlab 1.0.0";

enum ExitCode : int { kOk = 0, kUsage = 2, kUnconverged = 3 };

/// Runs the command line; output goes to `out` unless --out names a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Flat key=value text; '#' starts a comment line.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

/// Positive finite doubles printed so they read back exactly.
std::string format_double(double v);
/// exp(logValue) printed without overflowing.
std::string format_from_log(double logValue);

}  // namespace teichlab::cli
