#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <queue>
#include <unordered_set>
#include <vector>

#include "iiotsim/sim/error.hpp"
#include "iiotsim/sim/rng.hpp"
#include "iiotsim/sim/time.hpp"
#include "iiotsim/sim/trace.hpp"

namespace iiotsim::sim {

using EventId = std::uint64_t;

enum class EventKind {
  PacketArrival,
  PacketDeparture,
  LinkFailure,
  LinkRepair,
  DevicePlugIn,
  ControllerTimeout,
  TamperInjection,
  ScenarioAction,
  ControlMessage,
  VnfTimer,
  FlowTimer,
};

// Deterministic discrete-event engine. Single-threaded: one engine owns
// simulated time, the event queue, the run RNG, and the append-only trace.
// Events fire strictly ordered by (due time, insertion order).
class Engine {
public:
  explicit Engine(std::uint64_t seed) : rng_(seed) {}

  SimTime now() const { return now_; }
  Rng& rng() { return rng_; }
  Trace& trace() { return trace_; }
  const Trace& trace() const { return trace_; }

  EventId schedule(SimTime due, EventKind kind, std::function<void()> fn) {
    if (due < now_) throw Error(Errc::PastDue, "event due " + std::to_string(due) +
                                                   " before now " + std::to_string(now_));
    EventId id = next_id_++;
    queue_.push(Scheduled{due, seq_++, id, kind, std::move(fn)});
    ++pending_;
    return id;
  }

  // Cancelling an already-fired or unknown id is a no-op.
  void cancel(EventId id) { cancelled_.insert(id); }

  // Processes every pending event with due <= end, then fast-forwards the
  // clock to end. Same seed + same schedule => identical trace.
  void run_until(SimTime end) {
    while (!queue_.empty() && queue_.top().due <= end) {
      Scheduled ev = queue_.top();
      queue_.pop();
      --pending_;
      if (auto it = cancelled_.find(ev.id); it != cancelled_.end()) {
        cancelled_.erase(it);
        continue;
      }
      now_ = ev.due;
      ev.fn();
    }
    if (end > now_) now_ = end;
  }

  std::size_t pending_events() const { return pending_; }

  void emit(const std::string& emitter, const std::string& fact,
            std::initializer_list<Kv> kv = {}) {
    TraceRecord rec;
    rec.at = now_;
    rec.emitter = emitter;
    rec.fact = fact;
    rec.kv.assign(kv.begin(), kv.end());
    trace_.append(std::move(rec));
  }

  void emit(const std::string& emitter, const std::string& fact, std::vector<Kv> kv) {
    TraceRecord rec;
    rec.at = now_;
    rec.emitter = emitter;
    rec.fact = fact;
    rec.kv = std::move(kv);
    trace_.append(std::move(rec));
  }

private:
  struct Scheduled {
    SimTime due;
    std::uint64_t seq;
    EventId id;
    EventKind kind;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Scheduled& a, const Scheduled& b) const {
      if (a.due != b.due) return a.due > b.due;
      return a.seq > b.seq;
    }
  };

  SimTime now_ = 0;
  EventId next_id_ = 1;
  std::uint64_t seq_ = 0;
  std::size_t pending_ = 0;
  std::priority_queue<Scheduled, std::vector<Scheduled>, Later> queue_;
  std::unordered_set<EventId> cancelled_;
  Rng rng_;
  Trace trace_;
};

} // namespace iiotsim::sim
