#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "iotsim/scenario.hpp"

namespace iotsim {

struct SweepOptions {
  std::vector<std::uint32_t> locations{1};
  std::vector<std::uint64_t> intervals_s;  // empty = keep the scenario's intervals
  std::uint32_t repeats = 1;
  unsigned jobs = 1;
};

struct SweepRow {
  std::size_t index = 0;
  std::uint32_t locations = 1;
  std::uint64_t interval_s = 0;
  std::uint32_t repeat = 0;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
  std::uint64_t peak_mem = 0;
  std::string peak_mem_source;
  std::uint64_t events = 0;
  std::uint64_t trace_hash = 0;
  bool ok = true;
  std::string error;
};

/// Runs the cross product locations x intervals x repeats. Cell i uses seed
/// base.seed + i. A failing cell is recorded and the sweep continues. Rows come
/// back in cross-product order whatever order the workers finish in.
std::vector<SweepRow> run_sweep(const ScenarioSpec& base, const SweepOptions& options);

inline constexpr std::string_view kSweepCsvHeader =
    "locations,interval_s,repeat,seed,wall_ms,peak_mem,peak_mem_source,events,status,error";

std::string sweep_csv(std::span<const SweepRow> rows);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares of ys on xs.
LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

}  // namespace iotsim
