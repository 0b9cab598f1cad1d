#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "manet/types.hpp"

namespace manet::sim {

/// Thrown when an event would be scheduled before the current clock.
class ClockViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Identifies the event for logging. `kind` must point at storage that
/// outlives the engine (string literals in practice).
struct EventTag {
  std::string_view kind = "event";
  NodeId node = kBroadcast;
  std::uint64_t detail = 0;

  bool operator==(const EventTag&) const = default;
};

struct EventHandle {
  std::uint64_t seq = 0;
  bool valid() const { return seq != 0; }
};

struct LogEntry {
  SimTime time;
  std::uint64_t seq;
  EventTag tag;

  bool operator==(const LogEntry&) const = default;
};

using EventLog = std::vector<LogEntry>;

/// Writes one `time kind node detail` line per entry. Global events print
/// `-` as node.
void write_event_log(std::ostream& out, const EventLog& log);

/// Pending events ordered by (fire_time, insertion sequence).
class EventQueue {
 public:
  using Handler = std::function<void()>;

  struct Event {
    SimTime time;
    std::uint64_t seq;
    EventTag tag;
    Handler handler;
  };

  /// Rejects times earlier than the last popped event.
  EventHandle push(SimTime time, EventTag tag, Handler handler);

  /// Returns false if the event already fired, was cancelled, or never existed.
  bool cancel(EventHandle handle);

  bool empty() const { return live_ == 0; }
  std::size_t size() const { return live_; }

  /// Fire time of the next live event. Queue must be non-empty.
  SimTime head_time();

  Event pop();

  /// Time of the most recently popped event (0 initially).
  SimTime clock() const { return clock_; }

 private:
  void drop_cancelled_head();

  std::vector<Event> heap_;
  std::unordered_set<std::uint64_t> cancelled_;
  std::unordered_set<std::uint64_t> pending_;
  std::uint64_t next_seq_ = 1;
  std::size_t live_ = 0;
  SimTime clock_ = 0.0;
};

/// Single-threaded deterministic discrete-event engine.
class Engine {
 public:
  using Handler = EventQueue::Handler;

  /// `horizon` bounds every `run` call (the configured scenario duration).
  explicit Engine(SimTime horizon, bool record_log = true);

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;
  Engine(Engine&&) = default;
  Engine& operator=(Engine&&) = default;

  SimTime now() const { return now_; }
  SimTime horizon() const { return horizon_; }

  EventHandle schedule(SimTime at, EventTag tag, Handler handler);
  EventHandle schedule_in(SimTime delay, EventTag tag, Handler handler) {
    return schedule(now_ + delay, tag, std::move(handler));
  }
  bool cancel(EventHandle handle) { return queue_.cancel(handle); }

  std::size_t pending() const { return queue_.size(); }

  /// Delivers every event with fire_time <= until, then sets the clock to
  /// `until`. A handler scheduling into the past aborts the run with a
  /// ClockViolation naming that handler.
  const EventLog& run(SimTime until);

  const EventLog& log() const { return log_; }
  std::uint64_t delivered() const { return delivered_; }

 private:
  EventQueue queue_;
  EventLog log_;
  SimTime now_ = 0.0;
  SimTime horizon_;
  bool record_log_;
  std::uint64_t delivered_ = 0;
  const EventTag* current_ = nullptr;
};

}  // namespace manet::sim
