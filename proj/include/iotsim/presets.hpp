#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "iotsim/scenario.hpp"

namespace iotsim {

/// Readings of the environmental testbed's validation trace: three days of four
/// rounds for air sensors S1..S3 (deg C) and water sensors S4..S6 (mm).
struct ValidationFixture {
  std::array<std::vector<double>, 6> sensors;
};
const ValidationFixture& validation_fixture();

struct EnvIotOptions {
  std::uint32_t locations = 1;
  std::uint64_t interval_s = 6 * kSecondsPerHour;
  std::uint64_t days = 30;
  std::uint64_t seed = 42;
};

/// Per location: S1..S3 air temperature and S4..S6 surface-flow water sensors
/// on short-range radio, one relay, one gateway 0.5 km away on long-range
/// radio, and a single-host datacenter reached over 3G.
ScenarioSpec env_iot_preset(const EnvIotOptions& options = {});

struct JoseOptions {
  std::uint32_t sensors_per_type = 1000;
  std::uint64_t interval_s = 24 * kSecondsPerHour;
  std::uint64_t days = 30;
  std::uint64_t seed = 42;
};

inline constexpr std::uint32_t kJoseCities = 5;
inline constexpr std::uint32_t kJoseComputeCities = 3;
inline constexpr std::uint32_t kJoseStorageHostsPerCity = 10;
inline constexpr std::uint32_t kJoseComputeHostsPerCity = 400;
inline constexpr std::uint32_t kJoseVmsPerHost = 10;

/// Five cities, each with one gateway per sensor type (air temperature, air
/// humidity, air pressure, wind speed, precipitation), a 10-host storage
/// datacenter, and at three of the cities a 400-host compute datacenter. Every
/// host is filled with ten 2-vCPU VMs. Precipitation drives a flood alert.
ScenarioSpec jose_preset(const JoseOptions& options = {});

struct PresetOptions {
  std::optional<std::uint32_t> locations;
  std::optional<std::uint32_t> sensors_per_type;
  std::optional<std::uint64_t> interval_s;
  std::optional<std::uint64_t> horizon_s;
  std::optional<std::uint64_t> seed;
};

bool is_preset(std::string_view name);

/// Throws Error(UnknownPreset).
ScenarioSpec make_preset(std::string_view name, const PresetOptions& options = {});

}  // namespace iotsim
