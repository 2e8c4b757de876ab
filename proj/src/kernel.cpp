#include "iotsim/kernel.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string>

#include "iotsim/error.hpp"

namespace iotsim {

namespace {

constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xffu;
    h *= kFnvPrime;
  }
}

std::uint64_t payload_digest(const Payload& payload) {
  if (const auto* arrival = std::get_if<PacketArrival>(&payload)) {
    std::uint64_t h = arrival->packet.id * 31 + arrival->packet.size_bytes;
    if (const auto* rs = std::get_if<std::vector<Reading>>(&arrival->packet.payload)) {
      for (const auto& r : *rs) h = h * 131 + std::bit_cast<std::uint64_t>(r.value);
    }
    return h;
  }
  if (const auto* c = std::get_if<CloudletCompletion>(&payload)) return c->cloudlet;
  if (const auto* w = std::get_if<WorkloadTick>(&payload)) {
    return (static_cast<std::uint64_t>(w->workload) << 32) | w->interval;
  }
  if (const auto* m = std::get_if<MoveWaypoint>(&payload)) return m->index;
  if (const auto* f = std::get_if<FlushAggregate>(&payload)) return f->round;
  if (const auto* d = std::get_if<DayBoundary>(&payload)) return d->day;
  if (const auto* s = std::get_if<SignalChange>(&payload)) return std::bit_cast<std::uint64_t>(s->strength);
  return 0;
}

}  // namespace

std::string_view payload_name(const Payload& payload) {
  static constexpr std::string_view names[] = {
      "SenseTick", "PacketArrival", "CloudletCompletion", "BatteryDepleted",
      "NodeFailure", "OutageStart", "OutageEnd", "SignalChange",
      "WorkloadTick", "MoveWaypoint", "FlushAggregate", "DayBoundary"};
  return names[payload.index()];
}

EntityId Kernel::add_entity(Entity& entity) {
  entities_.push_back(&entity);
  return static_cast<EntityId>(entities_.size() - 1);
}

EventHandle Kernel::schedule(SimTime at, EntityId target, Payload payload) {
  if (at < now_) {
    throw Error(Errc::PastTime, "event at t=" + std::to_string(at.seconds) +
                                    " scheduled when now=" + std::to_string(now_.seconds));
  }
  if (target >= entities_.size()) {
    throw Error(Errc::UnknownEntity, "event target " + std::to_string(target) + " not registered");
  }
  const std::uint64_t seq = next_seq_++;
  heap_.push_back(Event{at, seq, target, std::move(payload)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  status_.push_back(Status::Pending);
  ++pending_;
  peak_pending_ = std::max(peak_pending_, pending_);
  return EventHandle{seq, at};
}

bool Kernel::cancel(EventHandle handle) {
  if (handle.seq >= status_.size() || status_[handle.seq] != Status::Pending) return false;
  status_[handle.seq] = Status::Cancelled;
  --pending_;
  return true;
}

void Kernel::fold_into_hash(const Event& event) {
  fnv_mix(hash_, event.fire_at.seconds);
  fnv_mix(hash_, event.seq);
  fnv_mix(hash_, event.target);
  fnv_mix(hash_, event.payload.index());
  fnv_mix(hash_, payload_digest(event.payload));
}

RunStats Kernel::run(SimTime until) {
  while (!heap_.empty()) {
    const Event& top = heap_.front();
    if (status_[top.seq] == Status::Cancelled) {
      std::pop_heap(heap_.begin(), heap_.end(), Later{});
      heap_.pop_back();
      continue;
    }
    if (top.fire_at > until) break;

    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Event event = std::move(heap_.back());
    heap_.pop_back();
    status_[event.seq] = Status::Fired;
    --pending_;
    now_ = event.fire_at;
    ++processed_;
    fold_into_hash(event);
    if (observer_) observer_(event);

    try {
      entities_[event.target]->handle(event);
    } catch (const std::exception& e) {
      throw Error(Errc::HandlerFailure,
                  "handler failed for event seq=" + std::to_string(event.seq) +
                      " t=" + std::to_string(event.fire_at.seconds) +
                      " target=" + std::to_string(event.target) + " payload=" +
                      std::string(payload_name(event.payload)) + ": " + e.what());
    }
  }

  RunStats stats;
  stats.events_processed = processed_;
  stats.final_time = now_;
  stats.trace_hash = hash_;
  return stats;
}

}  // namespace iotsim
