#include "parsley/engine.hpp"

namespace parsley {

EventId EventQueue::schedule(SimTime fire_at, Event ev) {
  if (fire_at < now_) {
    throw PastDeadline("schedule at t=" + std::to_string(fire_at) +
                       "ms before now=" + std::to_string(now_) + "ms");
  }
  ev.fire_at = fire_at;
  ev.seq = next_seq_++;
  heap_.push(ev);
  return ev.seq;
}

void EventQueue::drop_cancelled() const {
  while (!heap_.empty() && cancelled_.count(heap_.top().seq) != 0) {
    cancelled_.erase(heap_.top().seq);
    heap_.pop();
  }
}

bool EventQueue::empty() const {
  drop_cancelled();
  return heap_.empty();
}

std::optional<SimTime> EventQueue::next_time() const {
  drop_cancelled();
  if (heap_.empty()) return std::nullopt;
  return heap_.top().fire_at;
}

Event EventQueue::pop() {
  drop_cancelled();
  Event ev = heap_.top();
  heap_.pop();
  now_ = ev.fire_at;
  return ev;
}

void EventQueue::advance_to(SimTime t) {
  if (t < now_) throw PastDeadline("advance_to before now");
  now_ = t;
}

std::size_t run_until(EventQueue& queue, const EventHandler& handler,
                      const EndCondition& end) {
  std::size_t processed = 0;
  for (;;) {
    auto next = queue.next_time();
    if (!next) break;
    if (end.time_bound && *next > *end.time_bound) break;
    handler(queue.pop());
    ++processed;
    if (end.done && end.done()) break;
  }
  return processed;
}

}  // namespace parsley
