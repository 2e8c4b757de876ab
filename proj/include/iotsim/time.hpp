#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace iotsim {

inline constexpr std::uint64_t kSecondsPerMinute = 60;
inline constexpr std::uint64_t kSecondsPerHour = 3600;
inline constexpr std::uint64_t kSecondsPerDay = 86400;

/// Simulated time in whole seconds since the start of a run.
struct SimTime {
  std::uint64_t seconds = 0;

  constexpr auto operator<=>(const SimTime&) const = default;
};

constexpr SimTime operator+(SimTime t, std::uint64_t delta) {
  return SimTime{t.seconds + delta};
}

/// Parses "90", "90s", "15m", "6h" or "30d" into seconds.
std::optional<std::uint64_t> parse_duration(std::string_view text);

/// Shortest exact rendering using the largest unit that divides evenly.
std::string format_duration(std::uint64_t seconds);

/// 1-based day that contains a positive instant; t = 86400 belongs to day 1.
constexpr std::uint32_t day_of(SimTime t) {
  return t.seconds == 0 ? 1u
                        : static_cast<std::uint32_t>((t.seconds - 1) / kSecondsPerDay + 1);
}

}  // namespace iotsim
