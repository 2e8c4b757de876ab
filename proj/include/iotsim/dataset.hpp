#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "iotsim/packet.hpp"
#include "iotsim/random.hpp"
#include "iotsim/time.hpp"

namespace iotsim {

/// A column of readings loaded from a `timestamp,value` CSV (or given inline).
/// Row order is authoritative; timestamps are kept only for reference.
struct Dataset {
  std::string name;
  std::vector<double> values;

  std::size_t rows() const noexcept { return values.size(); }
};

/// Reads a dataset CSV. Header must be `timestamp,value`.
/// Throws Error(MissingFile), Error(BadHeader) or Error(NonNumericValue) naming the row.
Dataset load_dataset(const std::filesystem::path& path);

struct Sequential {
  bool operator==(const Sequential&) const = default;
};
struct RandomRow {
  bool operator==(const RandomRow&) const = default;
};
struct RandomInRange {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const RandomInRange&) const = default;
};
using SelectionMode = std::variant<Sequential, RandomRow, RandomInRange>;

/// Shared dataset plus the per-sensor read position.
class DatasetHandle {
 public:
  explicit DatasetHandle(std::shared_ptr<const Dataset> data);

  const Dataset& data() const noexcept { return *data_; }
  std::size_t position() const noexcept { return position_; }
  std::uint64_t wraps() const noexcept { return wraps_; }

 private:
  friend double next_value(DatasetHandle& handle, const SelectionMode& mode, RandomStream& rng,
                           bool* wrapped);

  std::shared_ptr<const Dataset> data_;
  std::size_t position_ = 0;
  std::uint64_t wraps_ = 0;
};

/// Sequential: next row, wrapping to the first after the last (`wrapped` is set
/// on the read that restarts). RandomRow: uniform row. RandomInRange: uniform
/// value in [min, max], dataset ignored. Throws Error(EmptyDataset) when a
/// row-based mode meets an empty dataset.
double next_value(DatasetHandle& handle, const SelectionMode& mode, RandomStream& rng,
                  bool* wrapped = nullptr);

struct Waypoint {
  SimTime t;
  Location location;

  bool operator==(const Waypoint&) const = default;
};

/// Reads a `t,x,y,z` trajectory CSV; times in seconds, coordinates in meters.
std::vector<Waypoint> load_trajectory(const std::filesystem::path& path);

}  // namespace iotsim
