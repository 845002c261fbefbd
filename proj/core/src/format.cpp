#include "berggren/format.hpp"

#include <array>
#include <charconv>

namespace berggren {

std::string format_number(double value, int digits) {
  if (value == 0.0) value = 0.0;  // drop the sign of negative zero
  std::array<char, 64> buf{};
  const auto result = digits <= 0
                          ? std::to_chars(buf.data(), buf.data() + buf.size(), value)
                          : std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                          std::chars_format::general, digits);
  return std::string(buf.data(), result.ptr);
}

}  // namespace berggren
