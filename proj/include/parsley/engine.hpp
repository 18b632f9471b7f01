#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "parsley/errors.hpp"

namespace parsley {

// Simulated time in integer milliseconds. One churn cycle = one second.
using SimTime = std::int64_t;

constexpr SimTime sim_seconds(double s) {
  return static_cast<SimTime>(s * 1000.0 + 0.5);
}

constexpr double to_seconds(SimTime t) { return static_cast<double>(t) / 1000.0; }

enum class EventKind {
  MaintenanceTick,
  SizeCheck,
  RelocationRound,
  ChurnMoment,
  PhaseBoundary,
};

struct Event {
  SimTime fire_at = 0;
  std::uint64_t seq = 0;  // FIFO tie-break among equal fire_at
  EventKind kind = EventKind::PhaseBoundary;
  std::uint64_t group_id = 0;   // MaintenanceTick / SizeCheck
  std::int64_t cycle_index = 0; // ChurnMoment moment index, PhaseBoundary phase id
  bool recurring = false;       // SizeCheck: re-arm after processing
};

using EventId = std::uint64_t;

// Min-heap of events ordered by (fire_at, seq), with lazy cancellation.
class EventQueue {
 public:
  SimTime now() const { return now_; }

  // Enqueue an event at `fire_at` (>= now). Returns a handle usable with
  // cancel(). seq is assigned here, so insertion order fixes tie order.
  EventId schedule(SimTime fire_at, Event ev);

  void cancel(EventId id) { cancelled_.insert(id); }

  bool empty() const;

  // Fire time of the next live event.
  std::optional<SimTime> next_time() const;

  // Pop the next live event and advance the clock to its fire time.
  Event pop();

  // Advance the clock without processing (used when a phase ends between
  // events). `t` must be >= now.
  void advance_to(SimTime t);

  std::uint64_t scheduled_count() const { return next_seq_; }

 private:
  struct Order {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  void drop_cancelled() const;

  mutable std::priority_queue<Event, std::vector<Event>, Order> heap_;
  mutable std::unordered_set<EventId> cancelled_;
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
};

using EventHandler = std::function<void(const Event&)>;

// Stop condition for run_until: an inclusive time bound, a post-event
// predicate, or both.
struct EndCondition {
  std::optional<SimTime> time_bound;
  std::function<bool()> done;  // checked after each processed event

  static EndCondition at_time(SimTime t) { return {t, nullptr}; }
  static EndCondition when(std::function<bool()> pred) {
    return {std::nullopt, std::move(pred)};
  }
};

// Process events in (fire_at, seq) order until the queue drains, the next
// event would fire past the time bound, or `done` reports true. Returns the
// number of events processed; the clock stays at the last processed fire_at.
std::size_t run_until(EventQueue& queue, const EventHandler& handler,
                      const EndCondition& end);

}  // namespace parsley
