#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iotsim/time.hpp"

namespace iotsim {

enum class TraceKind : std::uint8_t {
  Sense,
  PacketSent,
  PacketDelivered,
  PacketLost,
  Aggregate,
  DailyAvg,
  Alert,
  Battery,
  Provision,
  CloudletDone,
  Failure,
  Move,
  Actuate,
};

inline constexpr std::size_t kTraceKindCount = 13;

std::string_view to_string(TraceKind kind);
std::optional<TraceKind> trace_kind_from_string(std::string_view text);

using TraceDetail = std::vector<std::pair<std::string, std::string>>;

struct TraceRecord {
  SimTime time;
  TraceKind kind = TraceKind::Sense;
  std::string subject;
  TraceDetail detail;

  /// Value of a detail key, or nullptr.
  const std::string* find(std::string_view key) const;

  bool operator==(const TraceRecord&) const = default;
};

/// Receives records in emission order. One sink belongs to one run.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void record(const TraceRecord& rec) = 0;
};

class MemoryTrace : public TraceSink {
 public:
  void record(const TraceRecord& rec) override { records_.push_back(rec); }

  const std::vector<TraceRecord>& records() const noexcept { return records_; }
  std::size_t count(TraceKind kind) const;
  std::vector<TraceRecord> of_kind(TraceKind kind) const;

 private:
  std::vector<TraceRecord> records_;
};

/// CSV columns: time,kind,subject,detail. Detail is `key=value` pairs joined by ';'.
inline constexpr std::string_view kTraceCsvHeader = "time,kind,subject,detail";

std::string format_trace_row(const TraceRecord& rec);

/// Parses one data row written by format_trace_row.
std::optional<TraceRecord> parse_trace_row(std::string_view line);

/// Streams records to a CSV file as they are emitted.
class CsvTraceWriter : public TraceSink {
 public:
  /// Throws Error(IoFailure) if the file cannot be opened.
  explicit CsvTraceWriter(const std::filesystem::path& path);

  void record(const TraceRecord& rec) override;
  void flush();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Reads a trace CSV back; throws Error(IoFailure) on unreadable files.
std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path);

}  // namespace iotsim
