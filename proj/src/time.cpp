#include "iotsim/time.hpp"

#include <charconv>

namespace iotsim {

std::optional<std::uint64_t> parse_duration(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  std::uint64_t unit = 1;
  switch (text.back()) {
    case 's': unit = 1; text.remove_suffix(1); break;
    case 'm': unit = kSecondsPerMinute; text.remove_suffix(1); break;
    case 'h': unit = kSecondsPerHour; text.remove_suffix(1); break;
    case 'd': unit = kSecondsPerDay; text.remove_suffix(1); break;
    default: break;
  }
  if (text.empty()) return std::nullopt;

  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  if (value != 0 && unit > UINT64_MAX / value) return std::nullopt;
  return value * unit;
}

std::string format_duration(std::uint64_t seconds) {
  if (seconds == 0) return "0s";
  if (seconds % kSecondsPerDay == 0) return std::to_string(seconds / kSecondsPerDay) + "d";
  if (seconds % kSecondsPerHour == 0) return std::to_string(seconds / kSecondsPerHour) + "h";
  if (seconds % kSecondsPerMinute == 0) return std::to_string(seconds / kSecondsPerMinute) + "m";
  return std::to_string(seconds) + "s";
}

}  // namespace iotsim
