#include "iotsim/scenario.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <functional>
#include <fstream>
#include <set>
#include <sstream>

#include "iotsim/error.hpp"

namespace iotsim {

// ---------------------------------------------------------------------------
// Spec helpers

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Sensor: return "sensor";
    case NodeKind::MobileSensor: return "mobile_sensor";
    case NodeKind::Link: return "link";
    case NodeKind::Gateway: return "gateway";
    case NodeKind::Edge: return "edge";
    case NodeKind::Fog: return "fog";
  }
  return "sensor";
}

std::optional<NodeKind> node_kind_from_string(std::string_view text) {
  for (auto k : {NodeKind::Sensor, NodeKind::MobileSensor, NodeKind::Link, NodeKind::Gateway,
                 NodeKind::Edge, NodeKind::Fog}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

NodeKind NodeSpec::kind() const { return static_cast<NodeKind>(role.index()); }

const SensorSpec* NodeSpec::sensor() const {
  if (const auto* s = std::get_if<SensorSpec>(&role)) return s;
  if (const auto* m = std::get_if<MobileSensorSpec>(&role)) return &m->sensor;
  return nullptr;
}

SensorSpec* NodeSpec::sensor() {
  return const_cast<SensorSpec*>(std::as_const(*this).sensor());
}

const NodeSpec* ScenarioSpec::find_node(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

NodeSpec* ScenarioSpec::find_node(std::string_view id) {
  return const_cast<NodeSpec*>(std::as_const(*this).find_node(id));
}

const DatasetSpec* ScenarioSpec::find_dataset(std::string_view name) const {
  for (const auto& d : datasets) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const DatacenterSpec* ScenarioSpec::find_datacenter(std::string_view id) const {
  for (const auto& d : datacenters) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

std::string Diagnostic::str() const {
  std::string out = severity == Severity::Error ? "error" : "warning";
  if (line > 0) out += fmt::format(" at {}:{}", line, column);
  if (!path.empty()) out += " [" + path + "]";
  return out + ": " + message;
}

bool ParseResult::ok() const {
  return spec.has_value() &&
         std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

// ---------------------------------------------------------------------------
// Validation

namespace {

using Marks = std::map<std::string, std::pair<int, int>>;

class Reporter {
 public:
  Reporter(std::vector<Diagnostic>& out, const Marks& marks) : out_(out), marks_(marks) {}

  void error(const std::string& path, std::string message) { add(Severity::Error, path, std::move(message)); }
  void warning(const std::string& path, std::string message) {
    add(Severity::Warning, path, std::move(message));
  }

 private:
  void add(Severity severity, const std::string& path, std::string message) {
    Diagnostic d{severity, path, 0, 0, std::move(message)};
    // Fall back to the closest enclosing path that has a position.
    std::string p = path;
    for (;;) {
      auto it = marks_.find(p);
      if (it != marks_.end()) {
        d.line = it->second.first;
        d.column = it->second.second;
        break;
      }
      const auto cut = p.find_last_of(".[");
      if (cut == std::string::npos || cut == 0) {
        if (auto root = marks_.find(""); root != marks_.end()) {
          d.line = root->second.first;
          d.column = root->second.second;
        }
        break;
      }
      p.resize(cut);
    }
    out_.push_back(std::move(d));
  }

  std::vector<Diagnostic>& out_;
  const Marks& marks_;
};

std::string at(std::string_view list, std::size_t i) { return fmt::format("{}[{}]", list, i); }

}  // namespace

std::vector<Diagnostic> validate(const ScenarioSpec& spec, const Marks& marks) {
  std::vector<Diagnostic> out;
  Reporter r(out, marks);

  if (spec.nodes.empty()) {
    r.error("nodes", "missing topology: no nodes declared");
  }
  if (spec.horizon_s == 0) r.error("horizon", "horizon must be positive");

  std::set<std::string, std::less<>> datasets;
  for (std::size_t i = 0; i < spec.datasets.size(); ++i) {
    const auto& d = spec.datasets[i];
    if (!datasets.insert(d.name).second) r.error(at("datasets", i) + ".name", "duplicate dataset '" + d.name + "'");
    if (d.values.empty()) r.error(at("datasets", i), "dataset '" + d.name + "' is empty");
  }

  // Every addressable name: nodes and datacenters share one namespace.
  std::map<std::string, std::string, std::less<>> names;  // name -> kind
  auto declare = [&](const std::string& id, const std::string& path, const std::string& kind) {
    if (id.empty()) {
      r.error(path + ".id", "missing id");
    } else if (id == "broker") {
      r.error(path + ".id", "'broker' is reserved");
    } else if (!names.emplace(id, kind).second) {
      r.error(path + ".id", "duplicate id '" + id + "'");
    }
  };
  for (std::size_t i = 0; i < spec.nodes.size(); ++i) declare(spec.nodes[i].id, at("nodes", i), "node");
  for (std::size_t i = 0; i < spec.datacenters.size(); ++i) {
    declare(spec.datacenters[i].id, at("datacenters", i), "datacenter");
  }

  auto check_ref = [&](const std::optional<std::string>& ref, const std::string& path) {
    if (ref && !names.contains(*ref)) r.error(path, "undeclared target '" + *ref + "'");
  };

  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    const NodeSpec& n = spec.nodes[i];
    const std::string p = at("nodes", i);
    check_ref(n.forward, p + ".forward");
    if (n.forward && *n.forward == n.id) r.error(p + ".forward", "node '" + n.id + "' forwards to itself");
    if (n.connection.strength < 0.0 || n.connection.strength > 1.0) {
      r.error(p + ".connection.strength", "strength must be within [0, 1]");
    }
    if (n.connection.base_loss < 0.0 || n.connection.base_loss > 1.0) {
      r.error(p + ".connection.base_loss", "base_loss must be within [0, 1]");
    }
    if (n.power.kind == PowerKind::Battery && n.power.capacity_J <= 0.0) {
      r.error(p + ".power.capacity_J", "battery capacity must be positive");
    }
    if (const SensorSpec* s = n.sensor()) {
      if (s->metric.empty()) r.error(p + ".metric", "sensor needs a metric");
      if (s->interval_s == 0) r.error(p + ".interval", "reading interval must be positive");
      if (const auto* range = std::get_if<RandomInRange>(&s->selection)) {
        if (range->min > range->max) r.error(p + ".selection", "random_in_range needs min <= max");
      } else if (!datasets.contains(s->dataset)) {
        r.error(p + ".dataset", "unknown dataset '" + s->dataset + "'");
      }
      if (!n.forward) r.warning(p + ".forward", "sensor '" + n.id + "' has no forward target");
    }
    if (const auto* m = std::get_if<MobileSensorSpec>(&n.role)) {
      if (!std::is_sorted(m->trajectory.begin(), m->trajectory.end(),
                          [](const Waypoint& a, const Waypoint& b) { return a.t < b.t; })) {
        r.error(p + ".trajectory", "waypoints must be in time order");
      }
    }
    if (const auto* g = std::get_if<GatewaySpec>(&n.role)) {
      if (g->round_interval_s && *g->round_interval_s == 0) {
        r.error(p + ".round_interval", "round interval must be positive");
      }
    }
    if (const auto* e = std::get_if<EdgeSpec>(&n.role)) {
      check_ref(e->cloud, p + ".cloud");
      check_ref(e->iot, p + ".iot");
      if (e->mips < 0.0) r.error(p + ".mips", "mips must not be negative");
      if (const auto* d = std::get_if<Downsample>(&e->processing); d && d->keep_one_in == 0) {
        r.error(p + ".processing", "downsample keeps one in at least 1");
      }
      if (const auto* t = std::get_if<ThresholdFilter>(&e->processing); t && t->min > t->max) {
        r.error(p + ".processing", "threshold needs min <= max");
      }
    }
  }

  // Forwarding graph (forward plus edge targets) must be acyclic.
  {
    std::map<std::string, std::vector<std::string>, std::less<>> edges;
    for (const auto& n : spec.nodes) {
      auto& e = edges[n.id];
      if (n.forward) e.push_back(*n.forward);
      if (const auto* edge = std::get_if<EdgeSpec>(&n.role)) {
        if (edge->cloud) e.push_back(*edge->cloud);
        if (edge->iot) e.push_back(*edge->iot);
      }
    }
    std::map<std::string, int, std::less<>> state;  // 1 visiting, 2 done
    std::function<bool(const std::string&)> visit = [&](const std::string& id) {
      auto& s = state[id];
      if (s == 2) return false;
      if (s == 1) return true;
      s = 1;
      bool cycle = false;
      if (auto it = edges.find(id); it != edges.end()) {
        for (const auto& next : it->second) {
          if (next != id && visit(next)) cycle = true;
        }
      }
      state[id] = 2;
      return cycle;
    };
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
      if (visit(spec.nodes[i].id)) {
        r.error(at("nodes", i) + ".forward", "forwarding cycle through '" + spec.nodes[i].id + "'");
        break;
      }
    }
  }

  std::set<std::string, std::less<>> services;
  for (std::size_t i = 0; i < spec.service_types.size(); ++i) {
    const auto& s = spec.service_types[i];
    if (!services.insert(s.id).second) r.error(at("services", i) + ".id", "duplicate service '" + s.id + "'");
    if (s.demand_mi < 0.0) r.error(at("services", i) + ".demand_mi", "demand must not be negative");
  }

  for (std::size_t i = 0; i < spec.datacenters.size(); ++i) {
    const auto& d = spec.datacenters[i];
    const std::string p = at("datacenters", i);
    if (d.analysis_service && !services.contains(*d.analysis_service)) {
      r.error(p + ".analysis_service", "unknown service type '" + *d.analysis_service + "'");
    }
    for (std::size_t h = 0; h < d.hosts.size(); ++h) {
      const auto& host = d.hosts[h];
      const std::string hp = p + at(".hosts", h);
      if (host.count == 0) r.error(hp + ".count", "host count must be positive");
      if (host.pes == 0) r.error(hp + ".pes", "host needs at least one PE");
      if (host.mips_per_pe <= 0.0) r.error(hp + ".mips_per_pe", "mips_per_pe must be positive");
    }
  }

  for (std::size_t i = 0; i < spec.vms.size(); ++i) {
    const auto& v = spec.vms[i];
    const std::string p = at("vms", i);
    if (v.datacenter && !spec.find_datacenter(*v.datacenter)) {
      r.error(p + ".datacenter", "unknown datacenter '" + *v.datacenter + "'");
    }
    if (v.pes == 0) r.error(p + ".pes", "VM needs at least one PE");
    if (v.mips_per_pe <= 0.0) r.error(p + ".mips_per_pe", "mips_per_pe must be positive");
    for (const auto& s : v.services) {
      if (!services.contains(s)) r.error(p + ".services", "unknown service type '" + s + "'");
    }
  }

  for (std::size_t i = 0; i < spec.alerts.size(); ++i) {
    if (spec.alerts[i].metric.empty()) r.error(at("alerts", i) + ".metric", "alert needs a metric");
  }

  for (std::size_t i = 0; i < spec.workloads.size(); ++i) {
    const auto& w = spec.workloads[i];
    const std::string p = at("workloads", i);
    if (w.intervals > 1 && w.interval_length_s == 0) r.error(p + ".interval", "interval must be positive");
    for (const auto& [type, count] : w.requests) {
      if (!services.contains(type)) r.error(p + ".requests", "unknown service type '" + type + "'");
    }
  }

  auto check_iot_node = [&](const std::string& id, const std::string& path) {
    if (!spec.find_node(id)) r.error(path, "unknown node '" + id + "'");
  };
  std::map<std::string, std::vector<OutageWindow>> outages;
  for (std::size_t i = 0; i < spec.failures.size(); ++i) {
    const std::string p = at("failures", i);
    if (const auto* f = std::get_if<NodeFailureSpec>(&spec.failures[i])) {
      check_iot_node(f->node, p + ".node");
    } else if (const auto* o = std::get_if<OutageSpec>(&spec.failures[i])) {
      check_iot_node(o->node, p + ".node");
      if (o->from_s >= o->to_s) {
        r.error(p, "outage window must satisfy from < to");
      } else {
        const OutageWindow w{SimTime{o->from_s}, SimTime{o->to_s}};
        auto& list = outages[o->node];
        for (const auto& other : list) {
          if (w.start < other.end && other.start < w.end) {
            r.error(p, "outage overlaps another window on '" + o->node + "'");
          }
        }
        list.push_back(w);
      }
    } else if (const auto* s = std::get_if<SignalSpec>(&spec.failures[i])) {
      check_iot_node(s->node, p + ".node");
      if (s->strength < 0.0 || s->strength > 1.0) r.error(p + ".strength", "strength must be within [0, 1]");
    }
  }

  for (std::size_t i = 0; i < spec.actuators.size(); ++i) {
    const auto& a = spec.actuators[i];
    const std::string p = at("actuators", i);
    check_iot_node(a.node, p + ".node");
    check_iot_node(a.watch, p + ".watch");
    if (!names.contains(a.rewire_to)) r.error(p + ".rewire_to", "undeclared target '" + a.rewire_to + "'");
  }

  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Ctx {
  std::vector<Diagnostic> diagnostics;
  Marks marks;
  std::filesystem::path base_dir;

  void mark(const std::string& path, const YAML::Node& node) {
    const auto m = node.Mark();
    if (m.line >= 0) marks.emplace(path, std::make_pair(m.line + 1, m.column + 1));
  }

  void error(const std::string& path, const YAML::Node& node, std::string message) {
    Diagnostic d{Severity::Error, path, 0, 0, std::move(message)};
    const auto m = node.Mark();
    if (m.line >= 0) {
      d.line = m.line + 1;
      d.column = m.column + 1;
    } else if (auto it = marks.find(path); it != marks.end()) {
      d.line = it->second.first;
      d.column = it->second.second;
    }
    diagnostics.push_back(std::move(d));
  }

  void warning(const std::string& path, const YAML::Node& node, std::string message) {
    error(path, node, std::move(message));
    diagnostics.back().severity = Severity::Warning;
  }

  std::filesystem::path resolve(const std::string& p) const {
    const std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  }
};

// Reads `map[key]` into `out` if present; reports type errors.
template <typename T>
bool read(Ctx& ctx, const YAML::Node& map, const char* key, const std::string& path, T& out) {
  const YAML::Node node = map[key];
  if (!node) return false;
  const std::string p = path.empty() ? key : path + "." + key;
  ctx.mark(p, node);
  try {
    if (!node.IsScalar()) throw YAML::Exception(node.Mark(), "expected a scalar");
    if constexpr (std::is_same_v<T, std::string>) {
      out = node.Scalar();
    } else if constexpr (std::is_unsigned_v<T>) {
      const std::string& text = node.Scalar();
      if (!text.empty() && text.front() == '-') throw YAML::Exception(node.Mark(), "negative");
      out = node.as<T>();
    } else {
      out = node.as<T>();
    }
    return true;
  } catch (const YAML::Exception&) {
    ctx.error(p, node, fmt::format("'{}' has the wrong type", key));
    return false;
  }
}

template <typename T>
void read_opt(Ctx& ctx, const YAML::Node& map, const char* key, const std::string& path,
              std::optional<T>& out) {
  T value{};
  if (read(ctx, map, key, path, value)) out = std::move(value);
}

bool read_duration(Ctx& ctx, const YAML::Node& map, const char* key, const std::string& path,
                   std::uint64_t& out) {
  std::string text;
  if (!read(ctx, map, key, path, text)) return false;
  const auto d = parse_duration(text);
  if (!d) {
    ctx.error(path.empty() ? key : path + "." + key, map[key],
              "'" + text + "' is not a duration (use s, m, h or d suffixes)");
    return false;
  }
  out = *d;
  return true;
}

void read_opt_duration(Ctx& ctx, const YAML::Node& map, const char* key, const std::string& path,
                       std::optional<std::uint64_t>& out) {
  std::uint64_t v = 0;
  if (read_duration(ctx, map, key, path, v)) out = v;
}

void check_keys(Ctx& ctx, const YAML::Node& map, const std::string& path,
                std::initializer_list<std::string_view> known) {
  if (!map.IsMap()) return;
  for (const auto& kv : map) {
    const std::string key = kv.first.Scalar();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      ctx.warning(path.empty() ? key : path + "." + key, kv.first, "unknown key '" + key + "'");
    }
  }
}

bool expect_map(Ctx& ctx, const YAML::Node& node, const std::string& path) {
  if (node.IsMap()) return true;
  ctx.error(path, node, "expected a mapping");
  return false;
}

YAML::Node seq_of(Ctx& ctx, const YAML::Node& root, const char* key) {
  const YAML::Node node = root[key];
  if (!node || node.IsNull()) return YAML::Node(YAML::NodeType::Sequence);
  ctx.mark(key, node);
  if (!node.IsSequence()) {
    ctx.error(key, node, fmt::format("'{}' must be a list", key));
    return YAML::Node(YAML::NodeType::Sequence);
  }
  return node;
}

std::optional<std::vector<double>> read_numbers(Ctx& ctx, const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence()) {
    ctx.error(path, node, "expected a list of numbers");
    return std::nullopt;
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    try {
      out.push_back(node[i].as<double>());
    } catch (const YAML::Exception&) {
      ctx.error(at(path, i), node[i], "expected a number");
      return std::nullopt;
    }
  }
  return out;
}

SelectionMode read_selection(Ctx& ctx, const YAML::Node& node, const std::string& path) {
  if (!node) return Sequential{};
  ctx.mark(path, node);
  if (node.IsScalar()) {
    const std::string& s = node.Scalar();
    if (s == "sequential") return Sequential{};
    if (s == "random") return RandomRow{};
  } else if (node.IsMap() && node["random_in_range"]) {
    const auto v = read_numbers(ctx, node["random_in_range"], path + ".random_in_range");
    if (v && v->size() == 2) return RandomInRange{(*v)[0], (*v)[1]};
    ctx.error(path, node, "random_in_range takes [min, max]");
    return Sequential{};
  }
  ctx.error(path, node, "selection must be sequential, random or {random_in_range: [min, max]}");
  return Sequential{};
}

std::optional<Location> read_location(Ctx& ctx, const YAML::Node& node, const std::string& path) {
  const auto v = read_numbers(ctx, node, path);
  if (!v) return std::nullopt;
  if (v->size() != 3) {
    ctx.error(path, node, "location takes [x, y, z]");
    return std::nullopt;
  }
  return Location{(*v)[0], (*v)[1], (*v)[2]};
}

void parse_connection_defaults(Ctx& ctx, const YAML::Node& node, ConnectionTable& table) {
  if (!expect_map(ctx, node, "defaults.connections")) return;
  for (const auto& kv : node) {
    const std::string name = kv.first.Scalar();
    const std::string p = "defaults.connections." + name;
    const auto kind = connection_kind_from_string(name);
    if (!kind) {
      ctx.error(p, kv.first, "unknown connection type '" + name + "'");
      continue;
    }
    if (!expect_map(ctx, kv.second, p)) continue;
    check_keys(ctx, kv.second, p,
               {"signal_kind", "range_m", "bandwidth_Bps", "propagation", "tx_J_per_byte", "rx_J_per_byte"});
    ConnectionType& t = table.get(*kind);
    read(ctx, kv.second, "signal_kind", p, t.signal_kind);
    read(ctx, kv.second, "range_m", p, t.range_m);
    read(ctx, kv.second, "bandwidth_Bps", p, t.bandwidth_Bps);
    read_duration(ctx, kv.second, "propagation", p, t.propagation_s);
    read(ctx, kv.second, "tx_J_per_byte", p, t.tx_energy_J_per_byte);
    read(ctx, kv.second, "rx_J_per_byte", p, t.rx_energy_J_per_byte);
    if (t.bandwidth_Bps <= 0.0) ctx.error(p + ".bandwidth_Bps", kv.second, "bandwidth must be positive");
  }
}

SensorSpec parse_sensor(Ctx& ctx, const YAML::Node& n, const std::string& p) {
  SensorSpec s;
  if (!read(ctx, n, "metric", p, s.metric)) ctx.error(p + ".metric", n, "sensor needs a metric");
  if (!read_duration(ctx, n, "interval", p, s.interval_s)) {
    if (!n["interval"]) ctx.error(p + ".interval", n, "sensor needs an interval");
  }
  read(ctx, n, "dataset", p, s.dataset);
  s.selection = read_selection(ctx, n["selection"], p + ".selection");
  return s;
}

std::optional<NodeSpec> parse_node(Ctx& ctx, const YAML::Node& n, const std::string& p) {
  ctx.mark(p, n);
  if (!expect_map(ctx, n, p)) return std::nullopt;
  NodeSpec spec;
  if (!read(ctx, n, "id", p, spec.id)) ctx.error(p + ".id", n, "node needs an id");
  std::string kind_text;
  if (!read(ctx, n, "kind", p, kind_text)) {
    ctx.error(p + ".kind", n, "node needs a kind");
    return std::nullopt;
  }
  const auto kind = node_kind_from_string(kind_text);
  if (!kind) {
    ctx.error(p + ".kind", n["kind"], "unknown node kind '" + kind_text + "'");
    return std::nullopt;
  }

  const std::initializer_list<std::string_view> common = {
      "id", "kind", "location", "coverage_m", "connection", "power", "forward"};
  auto keys = [&](std::initializer_list<std::string_view> extra) {
    std::vector<std::string_view> all(common);
    all.insert(all.end(), extra);
    if (!n.IsMap()) return;
    for (const auto& kv : n) {
      const std::string key = kv.first.Scalar();
      if (std::find(all.begin(), all.end(), key) == all.end()) {
        ctx.warning(p + "." + key, kv.first, "unknown key '" + key + "' for " + kind_text);
      }
    }
  };

  if (n["location"]) {
    ctx.mark(p + ".location", n["location"]);
    if (auto loc = read_location(ctx, n["location"], p + ".location")) spec.location = *loc;
  }
  read(ctx, n, "coverage_m", p, spec.coverage_m);
  read_opt(ctx, n, "forward", p, spec.forward);

  if (const YAML::Node c = n["connection"]) {
    const std::string cp = p + ".connection";
    ctx.mark(cp, c);
    if (expect_map(ctx, c, cp)) {
      check_keys(ctx, c, cp, {"type", "strength", "base_loss", "protocol"});
      std::string type;
      if (read(ctx, c, "type", cp, type)) {
        if (auto k = connection_kind_from_string(type)) {
          spec.connection.type = *k;
        } else {
          ctx.error(cp + ".type", c["type"], "unknown connection type '" + type + "'");
        }
      }
      read(ctx, c, "strength", cp, spec.connection.strength);
      read(ctx, c, "base_loss", cp, spec.connection.base_loss);
      read(ctx, c, "protocol", cp, spec.connection.protocol);
    }
  }
  if (const YAML::Node pw = n["power"]) {
    const std::string pp = p + ".power";
    ctx.mark(pp, pw);
    if (expect_map(ctx, pw, pp)) {
      check_keys(ctx, pw, pp, {"kind", "capacity_J"});
      std::string kind;
      if (read(ctx, pw, "kind", pp, kind)) {
        if (auto k = power_kind_from_string(kind)) {
          spec.power.kind = *k;
        } else {
          ctx.error(pp + ".kind", pw["kind"], "unknown power kind '" + kind + "'");
        }
      }
      read(ctx, pw, "capacity_J", pp, spec.power.capacity_J);
    }
  }

  switch (*kind) {
    case NodeKind::Sensor:
      keys({"metric", "interval", "dataset", "selection"});
      spec.role = parse_sensor(ctx, n, p);
      break;
    case NodeKind::MobileSensor: {
      keys({"metric", "interval", "dataset", "selection", "trajectory"});
      MobileSensorSpec m;
      m.sensor = parse_sensor(ctx, n, p);
      const YAML::Node t = n["trajectory"];
      const std::string tp = p + ".trajectory";
      if (!t) {
        ctx.error(tp, n, "mobile sensor needs a trajectory");
      } else if (t.IsScalar()) {
        ctx.mark(tp, t);
        m.trajectory_path = t.Scalar();
        try {
          m.trajectory = load_trajectory(ctx.resolve(t.Scalar()));
        } catch (const Error& e) {
          ctx.error(tp, t, e.what());
        }
      } else if (t.IsSequence()) {
        ctx.mark(tp, t);
        for (std::size_t i = 0; i < t.size(); ++i) {
          const auto v = read_numbers(ctx, t[i], at(tp, i));
          if (!v) continue;
          if (v->size() != 4 || (*v)[0] < 0) {
            ctx.error(at(tp, i), t[i], "waypoint takes [t, x, y, z] with t >= 0");
            continue;
          }
          m.trajectory.push_back(Waypoint{SimTime{static_cast<std::uint64_t>((*v)[0])},
                                          Location{(*v)[1], (*v)[2], (*v)[3]}});
        }
      } else {
        ctx.error(tp, t, "trajectory is a CSV path or a list of [t, x, y, z]");
      }
      spec.role = std::move(m);
      break;
    }
    case NodeKind::Link:
      keys({});
      spec.role = LinkSpec{};
      break;
    case NodeKind::Gateway: {
      keys({"round_interval", "round_timeout"});
      GatewaySpec g;
      read_opt_duration(ctx, n, "round_interval", p, g.round_interval_s);
      read_opt_duration(ctx, n, "round_timeout", p, g.round_timeout_s);
      spec.role = g;
      break;
    }
    case NodeKind::Edge: {
      keys({"mips", "storage_bytes", "processing", "cloud", "iot"});
      EdgeSpec e;
      read(ctx, n, "mips", p, e.mips);
      read(ctx, n, "storage_bytes", p, e.storage_bytes);
      read_opt(ctx, n, "cloud", p, e.cloud);
      read_opt(ctx, n, "iot", p, e.iot);
      if (const YAML::Node pr = n["processing"]) {
        const std::string pp = p + ".processing";
        ctx.mark(pp, pr);
        if (pr.IsScalar() && pr.Scalar() == "passthrough") {
          e.processing = Passthrough{};
        } else if (pr.IsMap() && pr["downsample"]) {
          Downsample d;
          read(ctx, pr, "downsample", pp, d.keep_one_in);
          e.processing = d;
        } else if (pr.IsMap() && pr["threshold"]) {
          const auto v = read_numbers(ctx, pr["threshold"], pp + ".threshold");
          if (v && v->size() == 2) {
            e.processing = ThresholdFilter{(*v)[0], (*v)[1]};
          } else {
            ctx.error(pp, pr, "threshold takes [min, max]");
          }
        } else {
          ctx.error(pp, pr, "processing must be passthrough, {downsample: n} or {threshold: [min, max]}");
        }
      }
      spec.role = std::move(e);
      break;
    }
    case NodeKind::Fog: {
      keys({"mips"});
      FogSpec f;
      read(ctx, n, "mips", p, f.mips);
      spec.role = f;
      break;
    }
  }
  return spec;
}

std::optional<DatacenterSpec> parse_datacenter(Ctx& ctx, const YAML::Node& n, const std::string& p) {
  ctx.mark(p, n);
  if (!expect_map(ctx, n, p)) return std::nullopt;
  check_keys(ctx, n, p, {"id", "hosts", "analysis_service"});
  DatacenterSpec dc;
  if (!read(ctx, n, "id", p, dc.id)) ctx.error(p + ".id", n, "datacenter needs an id");
  read_opt(ctx, n, "analysis_service", p, dc.analysis_service);
  const YAML::Node hosts = n["hosts"];
  if (hosts && !hosts.IsSequence()) ctx.error(p + ".hosts", hosts, "'hosts' must be a list");
  if (hosts && hosts.IsSequence()) {
    for (std::size_t i = 0; i < hosts.size(); ++i) {
      const YAML::Node h = hosts[i];
      const std::string hp = p + at(".hosts", i);
      ctx.mark(hp, h);
      if (!expect_map(ctx, h, hp)) continue;
      check_keys(ctx, h, hp,
                 {"id", "count", "pes", "mips_per_pe", "ram_bytes", "storage_bytes", "idle_W", "full_W", "max_vms"});
      HostSpec host;
      if (!read(ctx, h, "id", hp, host.id)) host.id = fmt::format("{}.host{}", dc.id, i);
      read(ctx, h, "count", hp, host.count);
      read(ctx, h, "pes", hp, host.pes);
      read(ctx, h, "mips_per_pe", hp, host.mips_per_pe);
      read(ctx, h, "ram_bytes", hp, host.ram_bytes);
      read(ctx, h, "storage_bytes", hp, host.storage_bytes);
      read(ctx, h, "idle_W", hp, host.idle_W);
      read(ctx, h, "full_W", hp, host.full_W);
      read(ctx, h, "max_vms", hp, host.max_vms);
      dc.hosts.push_back(std::move(host));
    }
  }
  return dc;
}

std::optional<FailureSpec> parse_failure(Ctx& ctx, const YAML::Node& n, const std::string& p) {
  ctx.mark(p, n);
  if (!expect_map(ctx, n, p)) return std::nullopt;
  std::string type;
  if (!read(ctx, n, "type", p, type)) {
    ctx.error(p + ".type", n, "failure needs a type");
    return std::nullopt;
  }
  if (type == "node_failure") {
    check_keys(ctx, n, p, {"type", "node", "at"});
    NodeFailureSpec f;
    read(ctx, n, "node", p, f.node);
    if (!read_duration(ctx, n, "at", p, f.at_s) && !n["at"]) ctx.error(p + ".at", n, "missing 'at'");
    return f;
  }
  if (type == "outage") {
    check_keys(ctx, n, p, {"type", "node", "from", "to"});
    OutageSpec o;
    read(ctx, n, "node", p, o.node);
    if (!read_duration(ctx, n, "from", p, o.from_s) && !n["from"]) ctx.error(p + ".from", n, "missing 'from'");
    if (!read_duration(ctx, n, "to", p, o.to_s) && !n["to"]) ctx.error(p + ".to", n, "missing 'to'");
    return o;
  }
  if (type == "signal") {
    check_keys(ctx, n, p, {"type", "node", "at", "strength"});
    SignalSpec s;
    read(ctx, n, "node", p, s.node);
    if (!read_duration(ctx, n, "at", p, s.at_s) && !n["at"]) ctx.error(p + ".at", n, "missing 'at'");
    read(ctx, n, "strength", p, s.strength);
    return s;
  }
  ctx.error(p + ".type", n["type"], "unknown failure type '" + type + "'");
  return std::nullopt;
}

void parse_document(Ctx& ctx, const YAML::Node& root, ScenarioSpec& spec) {
  check_keys(ctx, root, "",
             {"format_version", "name", "seed", "horizon", "defaults", "datasets", "nodes", "datacenters",
              "vms", "services", "alerts", "workloads", "failures", "actuators"});
  int version = kScenarioFormatVersion;
  if (read(ctx, root, "format_version", "", version) && version != kScenarioFormatVersion) {
    ctx.error("format_version", root["format_version"],
              fmt::format("unsupported format_version {} (expected {})", version, kScenarioFormatVersion));
  }
  read(ctx, root, "name", "", spec.name);
  read(ctx, root, "seed", "", spec.seed);
  if (!read_duration(ctx, root, "horizon", "", spec.horizon_s) && !root["horizon"]) {
    ctx.error("horizon", root, "missing 'horizon'");
  }

  if (const YAML::Node d = root["defaults"]) {
    ctx.mark("defaults", d);
    if (expect_map(ctx, d, "defaults")) {
      check_keys(ctx, d, "defaults", {"sense_J", "edge_instructions_per_reading", "drain", "day_close", "connections"});
      read(ctx, d, "sense_J", "defaults", spec.defaults.sense_J);
      read(ctx, d, "edge_instructions_per_reading", "defaults", spec.defaults.edge_instructions_per_reading);
      read_duration(ctx, d, "drain", "defaults", spec.defaults.timing.drain_s);
      read_duration(ctx, d, "day_close", "defaults", spec.defaults.timing.day_close_s);
      if (d["connections"]) parse_connection_defaults(ctx, d["connections"], spec.defaults.connections);
    }
  }

  const YAML::Node datasets = seq_of(ctx, root, "datasets");
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const YAML::Node n = datasets[i];
    const std::string p = at("datasets", i);
    ctx.mark(p, n);
    if (!expect_map(ctx, n, p)) continue;
    check_keys(ctx, n, p, {"name", "path", "values"});
    DatasetSpec d;
    if (!read(ctx, n, "name", p, d.name)) ctx.error(p + ".name", n, "dataset needs a name");
    if (read_opt(ctx, n, "path", p, d.path), d.path) {
      try {
        d.values = load_dataset(ctx.resolve(*d.path)).values;
      } catch (const Error& e) {
        ctx.error(p + ".path", n["path"], e.what());
        continue;
      }
    } else if (n["values"]) {
      if (auto v = read_numbers(ctx, n["values"], p + ".values")) d.values = std::move(*v);
    } else {
      ctx.error(p, n, "dataset needs 'path' or 'values'");
      continue;
    }
    spec.datasets.push_back(std::move(d));
  }

  const YAML::Node nodes = seq_of(ctx, root, "nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (auto n = parse_node(ctx, nodes[i], at("nodes", i))) spec.nodes.push_back(std::move(*n));
  }

  const YAML::Node dcs = seq_of(ctx, root, "datacenters");
  for (std::size_t i = 0; i < dcs.size(); ++i) {
    if (auto d = parse_datacenter(ctx, dcs[i], at("datacenters", i))) spec.datacenters.push_back(std::move(*d));
  }

  const YAML::Node vms = seq_of(ctx, root, "vms");
  for (std::size_t i = 0; i < vms.size(); ++i) {
    const YAML::Node n = vms[i];
    const std::string p = at("vms", i);
    ctx.mark(p, n);
    if (!expect_map(ctx, n, p)) continue;
    check_keys(ctx, n, p, {"id", "count", "datacenter", "pes", "mips_per_pe", "ram_bytes", "services"});
    VmSpec v;
    if (!read(ctx, n, "id", p, v.id)) ctx.error(p + ".id", n, "VM needs an id");
    read(ctx, n, "count", p, v.count);
    read_opt(ctx, n, "datacenter", p, v.datacenter);
    read(ctx, n, "pes", p, v.pes);
    read(ctx, n, "mips_per_pe", p, v.mips_per_pe);
    read(ctx, n, "ram_bytes", p, v.ram_bytes);
    if (const YAML::Node s = n["services"]) {
      ctx.mark(p + ".services", s);
      try {
        v.services = s.as<std::vector<std::string>>();
      } catch (const YAML::Exception&) {
        ctx.error(p + ".services", s, "services must be a list of names");
      }
    }
    spec.vms.push_back(std::move(v));
  }

  const YAML::Node services = seq_of(ctx, root, "services");
  for (std::size_t i = 0; i < services.size(); ++i) {
    const YAML::Node n = services[i];
    const std::string p = at("services", i);
    ctx.mark(p, n);
    if (!expect_map(ctx, n, p)) continue;
    check_keys(ctx, n, p, {"id", "demand_mi"});
    IoTServiceType t;
    if (!read(ctx, n, "id", p, t.id)) ctx.error(p + ".id", n, "service needs an id");
    read(ctx, n, "demand_mi", p, t.demand_mi);
    spec.service_types.push_back(std::move(t));
  }

  const YAML::Node alerts = seq_of(ctx, root, "alerts");
  for (std::size_t i = 0; i < alerts.size(); ++i) {
    const YAML::Node n = alerts[i];
    const std::string p = at("alerts", i);
    ctx.mark(p, n);
    if (!expect_map(ctx, n, p)) continue;
    check_keys(ctx, n, p, {"metric", "red_threshold", "rise_epsilon"});
    AlertPolicy a;
    read(ctx, n, "metric", p, a.metric);
    if (!read(ctx, n, "red_threshold", p, a.red_threshold) && !n["red_threshold"]) {
      ctx.error(p + ".red_threshold", n, "alert needs red_threshold");
    }
    read(ctx, n, "rise_epsilon", p, a.rise_epsilon);
    spec.alerts.push_back(std::move(a));
  }

  const YAML::Node workloads = seq_of(ctx, root, "workloads");
  for (std::size_t i = 0; i < workloads.size(); ++i) {
    const YAML::Node n = workloads[i];
    const std::string p = at("workloads", i);
    ctx.mark(p, n);
    if (!expect_map(ctx, n, p)) continue;
    check_keys(ctx, n, p, {"start", "intervals", "interval", "requests"});
    RuntimeWorkload w;
    std::uint64_t start = 0;
    read_duration(ctx, n, "start", p, start);
    w.start = SimTime{start};
    read(ctx, n, "intervals", p, w.intervals);
    read_duration(ctx, n, "interval", p, w.interval_length_s);
    if (const YAML::Node r = n["requests"]) {
      ctx.mark(p + ".requests", r);
      if (!r.IsMap()) {
        ctx.error(p + ".requests", r, "requests map service type to count");
      } else {
        for (const auto& kv : r) {
          std::uint64_t count = 0;
          if (read(ctx, r, kv.first.Scalar().c_str(), p + ".requests", count)) {
            w.requests.emplace_back(kv.first.Scalar(), count);
          }
        }
      }
    }
    spec.workloads.push_back(std::move(w));
  }

  const YAML::Node failures = seq_of(ctx, root, "failures");
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (auto f = parse_failure(ctx, failures[i], at("failures", i))) spec.failures.push_back(std::move(*f));
  }

  const YAML::Node actuators = seq_of(ctx, root, "actuators");
  for (std::size_t i = 0; i < actuators.size(); ++i) {
    const YAML::Node n = actuators[i];
    const std::string p = at("actuators", i);
    ctx.mark(p, n);
    if (!expect_map(ctx, n, p)) continue;
    check_keys(ctx, n, p, {"node", "on", "watch", "rewire_to"});
    ActuatorSpec a;
    read(ctx, n, "node", p, a.node);
    std::string on = "node_failure";
    read(ctx, n, "on", p, on);
    if (on == "node_failure") {
      a.on = ActuatorTrigger::NodeFailure;
    } else if (on == "signal_lost") {
      a.on = ActuatorTrigger::SignalLost;
    } else {
      ctx.error(p + ".on", n["on"], "trigger must be node_failure or signal_lost");
    }
    read(ctx, n, "watch", p, a.watch);
    read(ctx, n, "rewire_to", p, a.rewire_to);
    spec.actuators.push_back(std::move(a));
  }
}

}  // namespace

ParseResult parse_scenario(std::string_view document, const std::filesystem::path& base_dir) {
  Ctx ctx;
  ctx.base_dir = base_dir;
  ParseResult result;

  YAML::Node root;
  try {
    root = YAML::Load(std::string(document));
  } catch (const YAML::ParserException& e) {
    result.diagnostics.push_back(
        Diagnostic{Severity::Error, "", e.mark.line + 1, e.mark.column + 1, "syntax error: " + e.msg});
    return result;
  }
  if (!root || root.IsNull()) {
    result.diagnostics.push_back(Diagnostic{Severity::Error, "", 1, 1, "missing topology: empty document"});
    return result;
  }
  if (!root.IsMap()) {
    ctx.error("", root, "scenario document must be a mapping");
    result.diagnostics = std::move(ctx.diagnostics);
    return result;
  }
  ctx.mark("", root);

  ScenarioSpec spec;
  parse_document(ctx, root, spec);
  auto semantic = validate(spec, ctx.marks);
  result.diagnostics = std::move(ctx.diagnostics);
  result.diagnostics.insert(result.diagnostics.end(), semantic.begin(), semantic.end());
  if (std::none_of(result.diagnostics.begin(), result.diagnostics.end(),
                   [](const Diagnostic& d) { return d.severity == Severity::Error; })) {
    result.spec = std::move(spec);
  }
  return result;
}

ParseResult parse_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.diagnostics.push_back(Diagnostic{Severity::Error, "", 0, 0, "cannot open " + path.string()});
    return r;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.parent_path());
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string num(double v) { return fmt::format("{}", v); }

void emit_numbers(YAML::Emitter& out, std::initializer_list<double> values) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double v : values) out << num(v);
  out << YAML::EndSeq;
}

void emit_sensor(YAML::Emitter& out, const SensorSpec& s) {
  out << YAML::Key << "metric" << YAML::Value << s.metric;
  out << YAML::Key << "interval" << YAML::Value << format_duration(s.interval_s);
  if (!s.dataset.empty()) out << YAML::Key << "dataset" << YAML::Value << s.dataset;
  out << YAML::Key << "selection" << YAML::Value;
  if (std::holds_alternative<Sequential>(s.selection)) {
    out << "sequential";
  } else if (std::holds_alternative<RandomRow>(s.selection)) {
    out << "random";
  } else {
    const auto& r = std::get<RandomInRange>(s.selection);
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "random_in_range" << YAML::Value;
    emit_numbers(out, {r.min, r.max});
    out << YAML::EndMap;
  }
}

}  // namespace

std::string serialize_scenario(const ScenarioSpec& spec) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "format_version" << YAML::Value << kScenarioFormatVersion;
  out << YAML::Key << "name" << YAML::Value << spec.name;
  out << YAML::Key << "seed" << YAML::Value << spec.seed;
  out << YAML::Key << "horizon" << YAML::Value << format_duration(spec.horizon_s);

  const DefaultsSpec base;
  out << YAML::Key << "defaults" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "sense_J" << YAML::Value << num(spec.defaults.sense_J);
  out << YAML::Key << "edge_instructions_per_reading" << YAML::Value
      << num(spec.defaults.edge_instructions_per_reading);
  out << YAML::Key << "drain" << YAML::Value << format_duration(spec.defaults.timing.drain_s);
  out << YAML::Key << "day_close" << YAML::Value << format_duration(spec.defaults.timing.day_close_s);
  bool any_override = false;
  for (std::size_t k = 0; k < kConnectionKindCount; ++k) {
    const auto kind = static_cast<ConnectionKind>(k);
    const ConnectionType& t = spec.defaults.connections.get(kind);
    if (t == base.connections.get(kind)) continue;
    if (!any_override) {
      out << YAML::Key << "connections" << YAML::Value << YAML::BeginMap;
      any_override = true;
    }
    out << YAML::Key << std::string(to_string(kind)) << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "signal_kind" << YAML::Value << t.signal_kind;
    out << YAML::Key << "range_m" << YAML::Value << num(t.range_m);
    out << YAML::Key << "bandwidth_Bps" << YAML::Value << num(t.bandwidth_Bps);
    out << YAML::Key << "propagation" << YAML::Value << format_duration(t.propagation_s);
    out << YAML::Key << "tx_J_per_byte" << YAML::Value << num(t.tx_energy_J_per_byte);
    out << YAML::Key << "rx_J_per_byte" << YAML::Value << num(t.rx_energy_J_per_byte);
    out << YAML::EndMap;
  }
  if (any_override) out << YAML::EndMap;
  out << YAML::EndMap;

  out << YAML::Key << "datasets" << YAML::Value << YAML::BeginSeq;
  for (const auto& d : spec.datasets) {
    out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << d.name;
    if (d.path) {
      out << YAML::Key << "path" << YAML::Value << *d.path;
    } else {
      out << YAML::Key << "values" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (double v : d.values) out << num(v);
      out << YAML::EndSeq;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
  for (const auto& n : spec.nodes) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << n.id;
    out << YAML::Key << "kind" << YAML::Value << std::string(to_string(n.kind()));
    out << YAML::Key << "location" << YAML::Value;
    emit_numbers(out, {n.location.x, n.location.y, n.location.z});
    if (n.coverage_m != 0.0) out << YAML::Key << "coverage_m" << YAML::Value << num(n.coverage_m);
    out << YAML::Key << "connection" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "type" << YAML::Value << std::string(to_string(n.connection.type));
    out << YAML::Key << "strength" << YAML::Value << num(n.connection.strength);
    out << YAML::Key << "base_loss" << YAML::Value << num(n.connection.base_loss);
    if (!n.connection.protocol.empty()) out << YAML::Key << "protocol" << YAML::Value << n.connection.protocol;
    out << YAML::EndMap;
    out << YAML::Key << "power" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << std::string(to_string(n.power.kind));
    if (n.power.capacity_J != 0.0) out << YAML::Key << "capacity_J" << YAML::Value << num(n.power.capacity_J);
    out << YAML::EndMap;
    if (n.forward) out << YAML::Key << "forward" << YAML::Value << *n.forward;

    if (const auto* s = std::get_if<SensorSpec>(&n.role)) {
      emit_sensor(out, *s);
    } else if (const auto* m = std::get_if<MobileSensorSpec>(&n.role)) {
      emit_sensor(out, m->sensor);
      out << YAML::Key << "trajectory" << YAML::Value;
      if (m->trajectory_path) {
        out << *m->trajectory_path;
      } else {
        out << YAML::BeginSeq;
        for (const auto& w : m->trajectory) {
          emit_numbers(out, {static_cast<double>(w.t.seconds), w.location.x, w.location.y, w.location.z});
        }
        out << YAML::EndSeq;
      }
    } else if (const auto* g = std::get_if<GatewaySpec>(&n.role)) {
      if (g->round_interval_s) out << YAML::Key << "round_interval" << YAML::Value << format_duration(*g->round_interval_s);
      if (g->round_timeout_s) out << YAML::Key << "round_timeout" << YAML::Value << format_duration(*g->round_timeout_s);
    } else if (const auto* e = std::get_if<EdgeSpec>(&n.role)) {
      out << YAML::Key << "mips" << YAML::Value << num(e->mips);
      out << YAML::Key << "storage_bytes" << YAML::Value << e->storage_bytes;
      out << YAML::Key << "processing" << YAML::Value;
      if (std::holds_alternative<Passthrough>(e->processing)) {
        out << "passthrough";
      } else if (const auto* d = std::get_if<Downsample>(&e->processing)) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "downsample" << YAML::Value << d->keep_one_in
            << YAML::EndMap;
      } else {
        const auto& t = std::get<ThresholdFilter>(e->processing);
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "threshold" << YAML::Value;
        emit_numbers(out, {t.min, t.max});
        out << YAML::EndMap;
      }
      if (e->cloud) out << YAML::Key << "cloud" << YAML::Value << *e->cloud;
      if (e->iot) out << YAML::Key << "iot" << YAML::Value << *e->iot;
    } else if (const auto* f = std::get_if<FogSpec>(&n.role)) {
      out << YAML::Key << "mips" << YAML::Value << num(f->mips);
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "datacenters" << YAML::Value << YAML::BeginSeq;
  for (const auto& d : spec.datacenters) {
    out << YAML::BeginMap << YAML::Key << "id" << YAML::Value << d.id;
    if (d.analysis_service) out << YAML::Key << "analysis_service" << YAML::Value << *d.analysis_service;
    out << YAML::Key << "hosts" << YAML::Value << YAML::BeginSeq;
    for (const auto& h : d.hosts) {
      out << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "id" << YAML::Value << h.id;
      out << YAML::Key << "count" << YAML::Value << h.count;
      out << YAML::Key << "pes" << YAML::Value << h.pes;
      out << YAML::Key << "mips_per_pe" << YAML::Value << num(h.mips_per_pe);
      out << YAML::Key << "ram_bytes" << YAML::Value << h.ram_bytes;
      out << YAML::Key << "storage_bytes" << YAML::Value << h.storage_bytes;
      out << YAML::Key << "idle_W" << YAML::Value << num(h.idle_W);
      out << YAML::Key << "full_W" << YAML::Value << num(h.full_W);
      out << YAML::Key << "max_vms" << YAML::Value << h.max_vms;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "vms" << YAML::Value << YAML::BeginSeq;
  for (const auto& v : spec.vms) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << v.id;
    out << YAML::Key << "count" << YAML::Value << v.count;
    if (v.datacenter) out << YAML::Key << "datacenter" << YAML::Value << *v.datacenter;
    out << YAML::Key << "pes" << YAML::Value << v.pes;
    out << YAML::Key << "mips_per_pe" << YAML::Value << num(v.mips_per_pe);
    out << YAML::Key << "ram_bytes" << YAML::Value << v.ram_bytes;
    out << YAML::Key << "services" << YAML::Value << YAML::Flow << v.services;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "services" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : spec.service_types) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << s.id << YAML::Key << "demand_mi"
        << YAML::Value << num(s.demand_mi) << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "alerts" << YAML::Value << YAML::BeginSeq;
  for (const auto& a : spec.alerts) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "metric" << YAML::Value << a.metric << YAML::Key
        << "red_threshold" << YAML::Value << num(a.red_threshold) << YAML::Key << "rise_epsilon" << YAML::Value
        << num(a.rise_epsilon) << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "workloads" << YAML::Value << YAML::BeginSeq;
  for (const auto& w : spec.workloads) {
    out << YAML::BeginMap;
    out << YAML::Key << "start" << YAML::Value << format_duration(w.start.seconds);
    out << YAML::Key << "intervals" << YAML::Value << w.intervals;
    out << YAML::Key << "interval" << YAML::Value << format_duration(w.interval_length_s);
    out << YAML::Key << "requests" << YAML::Value << YAML::Flow << YAML::BeginMap;
    for (const auto& [type, count] : w.requests) out << YAML::Key << type << YAML::Value << count;
    out << YAML::EndMap << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "failures" << YAML::Value << YAML::BeginSeq;
  for (const auto& f : spec.failures) {
    out << YAML::Flow << YAML::BeginMap;
    if (const auto* nf = std::get_if<NodeFailureSpec>(&f)) {
      out << YAML::Key << "type" << YAML::Value << "node_failure" << YAML::Key << "node" << YAML::Value << nf->node
          << YAML::Key << "at" << YAML::Value << format_duration(nf->at_s);
    } else if (const auto* o = std::get_if<OutageSpec>(&f)) {
      out << YAML::Key << "type" << YAML::Value << "outage" << YAML::Key << "node" << YAML::Value << o->node
          << YAML::Key << "from" << YAML::Value << format_duration(o->from_s) << YAML::Key << "to" << YAML::Value
          << format_duration(o->to_s);
    } else if (const auto* s = std::get_if<SignalSpec>(&f)) {
      out << YAML::Key << "type" << YAML::Value << "signal" << YAML::Key << "node" << YAML::Value << s->node
          << YAML::Key << "at" << YAML::Value << format_duration(s->at_s) << YAML::Key << "strength"
          << YAML::Value << num(s->strength);
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "actuators" << YAML::Value << YAML::BeginSeq;
  for (const auto& a : spec.actuators) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "node" << YAML::Value << a.node;
    out << YAML::Key << "on" << YAML::Value
        << (a.on == ActuatorTrigger::NodeFailure ? "node_failure" : "signal_lost");
    out << YAML::Key << "watch" << YAML::Value << a.watch;
    out << YAML::Key << "rewire_to" << YAML::Value << a.rewire_to;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Scaling helpers

ScenarioSpec replicate(const ScenarioSpec& spec, std::uint32_t copies, double spacing_m) {
  if (copies <= 1) return spec;
  ScenarioSpec out = spec;
  out.nodes.clear();
  out.datacenters.clear();
  out.vms.clear();
  out.failures.clear();
  out.actuators.clear();

  for (std::uint32_t c = 0; c < copies; ++c) {
    const std::string prefix = fmt::format("L{}.", c);
    auto rename = [&](const std::string& id) { return prefix + id; };
    auto rename_opt = [&](const std::optional<std::string>& id) -> std::optional<std::string> {
      if (!id) return std::nullopt;
      return rename(*id);
    };
    const double dx = spacing_m * c;

    for (NodeSpec n : spec.nodes) {
      n.id = rename(n.id);
      n.forward = rename_opt(n.forward);
      n.location.x += dx;
      if (auto* m = std::get_if<MobileSensorSpec>(&n.role)) {
        for (auto& w : m->trajectory) w.location.x += dx;
        m->trajectory_path.reset();
      }
      if (auto* e = std::get_if<EdgeSpec>(&n.role)) {
        e->cloud = rename_opt(e->cloud);
        e->iot = rename_opt(e->iot);
      }
      out.nodes.push_back(std::move(n));
    }
    for (DatacenterSpec d : spec.datacenters) {
      d.id = rename(d.id);
      for (auto& h : d.hosts) h.id = rename(h.id);
      out.datacenters.push_back(std::move(d));
    }
    for (VmSpec v : spec.vms) {
      v.id = rename(v.id);
      v.datacenter = rename_opt(v.datacenter);
      out.vms.push_back(std::move(v));
    }
    for (FailureSpec f : spec.failures) {
      std::visit([&](auto& x) { x.node = rename(x.node); }, f);
      out.failures.push_back(std::move(f));
    }
    for (ActuatorSpec a : spec.actuators) {
      a.node = rename(a.node);
      a.watch = rename(a.watch);
      a.rewire_to = rename(a.rewire_to);
      out.actuators.push_back(std::move(a));
    }
  }
  return out;
}

void set_reading_interval(ScenarioSpec& spec, std::uint64_t interval_s) {
  for (auto& n : spec.nodes) {
    if (SensorSpec* s = n.sensor()) s->interval_s = interval_s;
    if (auto* g = std::get_if<GatewaySpec>(&n.role)) {
      if (g->round_interval_s) g->round_interval_s = interval_s;
      if (g->round_timeout_s) g->round_timeout_s = interval_s;
    }
  }
}

}  // namespace iotsim
