#pragma once

#include <ostream>
#include <string>

namespace geodeq::cli {

// Exit codes.
inline constexpr int kPass = 0;
inline constexpr int kMathFailure = 1;
inline constexpr int kInputError = 2;

// Entry point of the geodeq command; all output goes to the given streams.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// 17 significant digits, enough to round-trip a double.
std::string format_double(double v);

}  // namespace geodeq::cli
