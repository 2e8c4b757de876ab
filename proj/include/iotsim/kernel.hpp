#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iotsim/packet.hpp"
#include "iotsim/power.hpp"
#include "iotsim/time.hpp"

namespace iotsim {

// Event payloads. Each variant maps to exactly one handler on the target entity.
struct SenseTick {};
struct PacketArrival {
  DataPacket packet;
  Energy rx_cost;  // charged to the receiver on arrival
};
struct CloudletCompletion {
  std::uint64_t cloudlet = 0;
  std::uint32_t vm = 0;
};
struct BatteryDepleted {};
struct NodeFailure {};
struct OutageStart {};
struct OutageEnd {};
struct SignalChange {
  double strength = 1.0;
};
struct WorkloadTick {
  std::uint32_t workload = 0;
  std::uint32_t interval = 0;
};
struct MoveWaypoint {
  std::uint32_t index = 0;
};
struct FlushAggregate {
  std::uint64_t round = 0;
};
struct DayBoundary {
  std::uint32_t day = 0;
};

using Payload = std::variant<SenseTick, PacketArrival, CloudletCompletion, BatteryDepleted,
                             NodeFailure, OutageStart, OutageEnd, SignalChange, WorkloadTick,
                             MoveWaypoint, FlushAggregate, DayBoundary>;

std::string_view payload_name(const Payload& payload);

struct Event {
  SimTime fire_at;
  std::uint64_t seq = 0;
  EntityId target = 0;
  Payload payload;
};

/// Something that receives events from the kernel.
class Entity {
 public:
  virtual ~Entity() = default;
  virtual void handle(Event& event) = 0;
};

struct EventHandle {
  std::uint64_t seq = 0;
  SimTime fire_at;

  bool operator==(const EventHandle&) const = default;
};

struct RunStats {
  std::uint64_t events_processed = 0;
  SimTime final_time;
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t packets_lost = 0;
  std::uint64_t packets_in_flight = 0;
  std::uint64_t readings_emitted = 0;
  double wall_clock_ms = 0.0;          // not part of determinism checks
  std::uint64_t peak_memory_bytes = 0;  // not part of determinism checks
  std::string peak_memory_source;
  std::uint64_t trace_hash = 0;

  bool operator==(const RunStats&) const = default;
};

/// Deterministic future-event list and clock. Events pop in (fire_at, seq)
/// order; seq is the insertion counter, so simultaneous events run in the
/// order they were scheduled.
class Kernel {
 public:
  Kernel() = default;
  Kernel(const Kernel&) = delete;
  Kernel& operator=(const Kernel&) = delete;

  /// Registers an entity; ids are dense and assigned in registration order.
  EntityId add_entity(Entity& entity);
  std::size_t entity_count() const noexcept { return entities_.size(); }

  /// Throws Error(PastTime) if `at` is before now, Error(UnknownEntity) for a bad target.
  EventHandle schedule(SimTime at, EntityId target, Payload payload);

  /// True iff the event was pending and is now removed.
  bool cancel(EventHandle handle);

  /// Dispatches events until the queue is empty or the next one is later than
  /// `until`. Unprocessed events stay queued, so a later call resumes. Entity
  /// exceptions are rethrown as Error(HandlerFailure) naming the event.
  /// Returned stats are cumulative over all calls; only kernel fields are set.
  RunStats run(SimTime until);

  SimTime now() const noexcept { return now_; }
  std::size_t pending() const noexcept { return pending_; }
  std::size_t peak_pending() const noexcept { return peak_pending_; }
  std::uint64_t events_processed() const noexcept { return processed_; }
  std::uint64_t trace_hash() const noexcept { return hash_; }

  /// Called before each dispatch; used by tests to record the pop order.
  void set_observer(std::function<void(const Event&)> observer) { observer_ = std::move(observer); }

 private:
  enum class Status : std::uint8_t { Pending, Fired, Cancelled };

  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  void fold_into_hash(const Event& event);

  std::vector<Entity*> entities_;
  std::vector<Event> heap_;
  std::vector<Status> status_;  // indexed by seq
  std::uint64_t next_seq_ = 0;
  std::size_t pending_ = 0;
  std::size_t peak_pending_ = 0;
  SimTime now_;
  std::uint64_t processed_ = 0;
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
  std::function<void(const Event&)> observer_;
};

}  // namespace iotsim
