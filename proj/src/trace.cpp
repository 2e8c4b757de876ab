#include "iotsim/trace.hpp"

#include <algorithm>
#include <charconv>

#include "iotsim/error.hpp"

namespace iotsim {

namespace {

constexpr std::string_view kKindNames[kTraceKindCount] = {
    "sense",     "packet_sent", "packet_delivered", "packet_lost",   "aggregate",
    "daily_avg", "alert",       "battery",          "provision",     "cloudlet_done",
    "failure",   "move",        "actuate"};

// Detail values never contain the separators; keep the CSV unquoted.
void sanitize_into(std::string& out, std::string_view text) {
  for (char c : text) {
    out.push_back(c == ',' || c == ';' || c == '=' || c == '\n' || c == '\r' ? '_' : c);
  }
}

}  // namespace

std::string_view to_string(TraceKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<TraceKind> trace_kind_from_string(std::string_view text) {
  for (std::size_t i = 0; i < kTraceKindCount; ++i) {
    if (kKindNames[i] == text) return static_cast<TraceKind>(i);
  }
  return std::nullopt;
}

const std::string* TraceRecord::find(std::string_view key) const {
  for (const auto& [k, v] : detail) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::size_t MemoryTrace::count(TraceKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      records_.begin(), records_.end(), [kind](const TraceRecord& r) { return r.kind == kind; }));
}

std::vector<TraceRecord> MemoryTrace::of_kind(TraceKind kind) const {
  std::vector<TraceRecord> out;
  std::copy_if(records_.begin(), records_.end(), std::back_inserter(out),
               [kind](const TraceRecord& r) { return r.kind == kind; });
  return out;
}

std::string format_trace_row(const TraceRecord& rec) {
  std::string row = std::to_string(rec.time.seconds);
  row += ',';
  row += to_string(rec.kind);
  row += ',';
  sanitize_into(row, rec.subject);
  row += ',';
  bool first = true;
  for (const auto& [k, v] : rec.detail) {
    if (!first) row += ';';
    first = false;
    sanitize_into(row, k);
    row += '=';
    sanitize_into(row, v);
  }
  return row;
}

std::optional<TraceRecord> parse_trace_row(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::string_view fields[4];
  for (int i = 0; i < 3; ++i) {
    const auto pos = line.find(',');
    if (pos == std::string_view::npos) return std::nullopt;
    fields[i] = line.substr(0, pos);
    line.remove_prefix(pos + 1);
  }
  fields[3] = line;

  TraceRecord rec;
  auto [ptr, ec] =
      std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), rec.time.seconds);
  if (ec != std::errc{} || ptr != fields[0].data() + fields[0].size()) return std::nullopt;
  const auto kind = trace_kind_from_string(fields[1]);
  if (!kind) return std::nullopt;
  rec.kind = *kind;
  rec.subject = std::string(fields[2]);

  std::string_view detail = fields[3];
  while (!detail.empty()) {
    const auto end = detail.find(';');
    const auto pair = detail.substr(0, end);
    const auto eq = pair.find('=');
    if (eq == std::string_view::npos) return std::nullopt;
    rec.detail.emplace_back(std::string(pair.substr(0, eq)), std::string(pair.substr(eq + 1)));
    if (end == std::string_view::npos) break;
    detail.remove_prefix(end + 1);
  }
  return rec;
}

CsvTraceWriter::CsvTraceWriter(const std::filesystem::path& path) : path_(path), out_(path) {
  if (!out_) throw Error(Errc::IoFailure, "cannot write trace to " + path.string());
  out_ << kTraceCsvHeader << '\n';
}

void CsvTraceWriter::record(const TraceRecord& rec) {
  out_ << format_trace_row(rec) << '\n';
}

void CsvTraceWriter::flush() {
  out_.flush();
  if (!out_) throw Error(Errc::IoFailure, "failed writing trace to " + path_.string());
}

std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot read trace " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<TraceRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto rec = parse_trace_row(line);
    if (!rec) {
      throw Error(Errc::IoFailure, path.string() + ": malformed trace row " + std::to_string(line_no));
    }
    out.push_back(std::move(*rec));
  }
  return out;
}

}  // namespace iotsim
