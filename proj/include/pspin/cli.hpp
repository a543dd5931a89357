#pragma once

#include <string>
#include <vector>

#include "pspin/meanfield.hpp"

namespace pspin::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the `pspin` executable.
int run(int argc, char** argv);

/// "40:160:20" (inclusive), "40:60" (step 1), "40,60,80" or "40".
std::vector<int> parse_size_list(const std::string& text);

/// An integer or "inf".
InteractionOrder parse_order(const std::string& text);

/// "inf" or a positive number.
InverseTemperature parse_beta(const std::string& text);

/// "s:lambda,s:lambda,..."
std::vector<SchedulePoint> parse_points(const std::string& text);

}  // namespace pspin::cli
