#include "iotsim/dataset.hpp"

#include <charconv>
#include <fstream>
#include <string>

#include "iotsim/error.hpp"

namespace iotsim {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::MissingFile, "cannot open " + path.string());
  return in;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  Dataset data;
  data.name = path.stem().string();

  std::string line;
  if (!std::getline(in, line) || split(trim(line), ',') != std::vector<std::string_view>{"timestamp", "value"}) {
    throw Error(Errc::BadHeader,
                path.string() + ": expected header 'timestamp,value', got '" + std::string(trim(line)) + "'");
  }

  std::size_t row = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    ++row;
    const auto fields = split(t, ',');
    const auto value = fields.size() == 2 ? parse_double(fields[1]) : std::nullopt;
    if (!value) {
      throw Error(Errc::NonNumericValue,
                  path.string() + ": row " + std::to_string(row) + " (line " +
                      std::to_string(line_no) + ") has non-numeric value '" +
                      std::string(fields.size() >= 2 ? fields[1] : t) + "'");
    }
    data.values.push_back(*value);
  }
  return data;
}

DatasetHandle::DatasetHandle(std::shared_ptr<const Dataset> data) : data_(std::move(data)) {}

double next_value(DatasetHandle& handle, const SelectionMode& mode, RandomStream& rng,
                  bool* wrapped) {
  if (wrapped) *wrapped = false;
  if (const auto* range = std::get_if<RandomInRange>(&mode)) {
    return rng.uniform(range->min, range->max);
  }
  const auto& values = handle.data_->values;
  if (values.empty()) {
    throw Error(Errc::EmptyDataset, "dataset '" + handle.data_->name + "' is empty");
  }
  if (std::holds_alternative<RandomRow>(mode)) {
    return values[rng.index(values.size())];
  }
  if (handle.position_ == values.size()) {
    handle.position_ = 0;
    ++handle.wraps_;
    if (wrapped) *wrapped = true;
  }
  return values[handle.position_++];
}

std::vector<Waypoint> load_trajectory(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line) ||
      split(trim(line), ',') != std::vector<std::string_view>{"t", "x", "y", "z"}) {
    throw Error(Errc::BadHeader, path.string() + ": expected header 't,x,y,z'");
  }
  std::vector<Waypoint> out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    ++row;
    const auto fields = split(t, ',');
    std::optional<double> v[4];
    if (fields.size() == 4) {
      for (int i = 0; i < 4; ++i) v[i] = parse_double(fields[i]);
    }
    if (fields.size() != 4 || !v[0] || !v[1] || !v[2] || !v[3] || *v[0] < 0 ||
        *v[0] != static_cast<double>(static_cast<std::uint64_t>(*v[0]))) {
      throw Error(Errc::NonNumericValue,
                  path.string() + ": row " + std::to_string(row) + " is not 't,x,y,z' with whole-second t");
    }
    out.push_back(Waypoint{SimTime{static_cast<std::uint64_t>(*v[0])}, Location{*v[1], *v[2], *v[3]}});
  }
  return out;
}

}  // namespace iotsim
