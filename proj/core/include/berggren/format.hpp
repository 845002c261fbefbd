#pragma once

#include <string>

namespace berggren {

/// Shortest representation that parses back to the same double when
/// digits <= 0, otherwise `digits` significant digits.
std::string format_number(double value, int digits = 0);

}  // namespace berggren
