#include "iotsim/outputs.hpp"

#include <fmt/format.h>

#include <fstream>
#include <json.hpp>

#include "iotsim/error.hpp"

namespace iotsim {

using nlohmann::ordered_json;

std::string metrics_json(const RunStats& stats, const RunInfo& info) {
  ordered_json j;
  j["format_version"] = kMetricsFormatVersion;
  j["scenario"] = info.scenario;
  j["seed"] = info.seed;
  j["horizon_s"] = info.horizon_s;
  j["events_processed"] = stats.events_processed;
  j["final_time_s"] = stats.final_time.seconds;
  j["packets_sent"] = stats.packets_sent;
  j["packets_delivered"] = stats.packets_delivered;
  j["packets_lost"] = stats.packets_lost;
  j["packets_in_flight"] = stats.packets_in_flight;
  j["readings_emitted"] = stats.readings_emitted;
  j["wall_clock_ms"] = stats.wall_clock_ms;
  j["peak_memory_bytes"] = stats.peak_memory_bytes;
  j["peak_memory_source"] = stats.peak_memory_source;
  j["trace_hash"] = fmt::format("{:016x}", stats.trace_hash);
  j["counters"] = ordered_json::object();
  for (const auto& [k, v] : info.counters) j["counters"][k] = v;
  return j.dump(2) + "\n";
}

void write_metrics(const RunStats& stats, const RunInfo& info, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoFailure, "cannot write metrics to " + path.string());
  out << metrics_json(stats, info);
  out.flush();
  if (!out) throw Error(Errc::IoFailure, "failed writing metrics to " + path.string());
}

MetricsDocument read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot read metrics " + path.string());
  MetricsDocument doc;
  try {
    const auto j = nlohmann::json::parse(in);
    doc.info.scenario = j.at("scenario").get<std::string>();
    doc.info.seed = j.at("seed").get<std::uint64_t>();
    doc.info.horizon_s = j.at("horizon_s").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("counters").items()) doc.info.counters[k] = v.get<std::uint64_t>();
    RunStats& s = doc.stats;
    s.events_processed = j.at("events_processed").get<std::uint64_t>();
    s.final_time = SimTime{j.at("final_time_s").get<std::uint64_t>()};
    s.packets_sent = j.at("packets_sent").get<std::uint64_t>();
    s.packets_delivered = j.at("packets_delivered").get<std::uint64_t>();
    s.packets_lost = j.at("packets_lost").get<std::uint64_t>();
    s.packets_in_flight = j.at("packets_in_flight").get<std::uint64_t>();
    s.readings_emitted = j.at("readings_emitted").get<std::uint64_t>();
    s.wall_clock_ms = j.at("wall_clock_ms").get<double>();
    s.peak_memory_bytes = j.at("peak_memory_bytes").get<std::uint64_t>();
    s.peak_memory_source = j.at("peak_memory_source").get<std::string>();
    s.trace_hash = std::stoull(j.at("trace_hash").get<std::string>(), nullptr, 16);
  } catch (const std::exception& e) {
    throw Error(Errc::IoFailure, path.string() + ": malformed metrics: " + e.what());
  }
  return doc;
}

void write_outputs(const RunStats& stats, const RunInfo& info, std::span<const TraceRecord> trace,
                   const OutputPaths& paths) {
  if (paths.trace) {
    CsvTraceWriter writer(*paths.trace);
    for (const auto& rec : trace) writer.record(rec);
    writer.flush();
  }
  if (paths.metrics) write_metrics(stats, info, *paths.metrics);
}

}  // namespace iotsim
