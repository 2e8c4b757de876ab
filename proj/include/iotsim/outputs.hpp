#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "iotsim/kernel.hpp"
#include "iotsim/trace.hpp"

namespace iotsim {

inline constexpr int kMetricsFormatVersion = 1;

/// Run identity and extra counters written next to RunStats in metrics JSON.
struct RunInfo {
  std::string scenario;
  std::uint64_t seed = 0;
  std::uint64_t horizon_s = 0;
  std::map<std::string, std::uint64_t> counters;

  bool operator==(const RunInfo&) const = default;
};

struct OutputPaths {
  std::optional<std::filesystem::path> trace;
  std::optional<std::filesystem::path> metrics;
};

/// Metrics JSON: format_version, scenario, seed, horizon_s, every RunStats
/// field (trace_hash as 16 hex digits), and `counters`.
std::string metrics_json(const RunStats& stats, const RunInfo& info);
void write_metrics(const RunStats& stats, const RunInfo& info, const std::filesystem::path& path);

struct MetricsDocument {
  RunStats stats;
  RunInfo info;
};
/// Throws Error(IoFailure) on unreadable or malformed files.
MetricsDocument read_metrics(const std::filesystem::path& path);

/// Writes the trace CSV (if a path is given) and the metrics JSON (if given).
/// Throws Error(IoFailure) if a destination is not writable.
void write_outputs(const RunStats& stats, const RunInfo& info, std::span<const TraceRecord> trace,
                   const OutputPaths& paths);

}  // namespace iotsim
