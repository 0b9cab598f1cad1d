#include "manet/sim/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace manet::sim {

namespace {

// Min-heap order on (time, seq).
struct Later {
  bool operator()(const EventQueue::Event& a, const EventQueue::Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

std::string describe(const EventTag& tag) {
  std::ostringstream os;
  os << "'" << tag.kind << "'";
  if (tag.node != kBroadcast) os << " at node " << tag.node;
  return os.str();
}

}  // namespace

void write_event_log(std::ostream& out, const EventLog& log) {
  char buf[64];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof buf, "%.9f", e.time);
    out << buf << ' ' << e.tag.kind << ' ';
    if (e.tag.node == kBroadcast)
      out << '-';
    else
      out << e.tag.node;
    out << ' ' << e.tag.detail << '\n';
  }
}

EventHandle EventQueue::push(SimTime time, EventTag tag, Handler handler) {
  if (!(time >= clock_)) {
    std::ostringstream os;
    os << "event " << describe(tag) << " scheduled at t=" << time
       << " before clock t=" << clock_;
    throw ClockViolation(os.str());
  }
  const std::uint64_t seq = next_seq_++;
  heap_.push_back(Event{time, seq, tag, std::move(handler)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  pending_.insert(seq);
  ++live_;
  return EventHandle{seq};
}

bool EventQueue::cancel(EventHandle handle) {
  if (!handle.valid()) return false;
  if (pending_.erase(handle.seq) == 0) return false;
  cancelled_.insert(handle.seq);
  --live_;
  return true;
}

void EventQueue::drop_cancelled_head() {
  while (!heap_.empty()) {
    auto it = cancelled_.find(heap_.front().seq);
    if (it == cancelled_.end()) return;
    cancelled_.erase(it);
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    heap_.pop_back();
  }
}

SimTime EventQueue::head_time() {
  drop_cancelled_head();
  return heap_.front().time;
}

EventQueue::Event EventQueue::pop() {
  drop_cancelled_head();
  std::pop_heap(heap_.begin(), heap_.end(), Later{});
  Event ev = std::move(heap_.back());
  heap_.pop_back();
  pending_.erase(ev.seq);
  --live_;
  clock_ = ev.time;
  return ev;
}

Engine::Engine(SimTime horizon, bool record_log)
    : horizon_(horizon), record_log_(record_log) {
  if (!(horizon >= 0.0)) throw ConfigError("engine horizon must be non-negative");
}

EventHandle Engine::schedule(SimTime at, EventTag tag, Handler handler) {
  if (!(at >= now_)) {
    std::ostringstream os;
    os << "event " << describe(tag) << " scheduled at t=" << at << " before clock t=" << now_;
    if (current_ != nullptr) os << " by handler " << describe(*current_);
    throw ClockViolation(os.str());
  }
  return queue_.push(at, tag, std::move(handler));
}

const EventLog& Engine::run(SimTime until) {
  if (until > horizon_) throw ClockViolation("run target beyond configured duration");
  if (until < now_) throw ClockViolation("run target earlier than current clock");
  while (!queue_.empty() && queue_.head_time() <= until) {
    EventQueue::Event ev = queue_.pop();
    now_ = ev.time;
    if (record_log_) log_.push_back(LogEntry{ev.time, ev.seq, ev.tag});
    ++delivered_;
    current_ = &ev.tag;
    try {
      ev.handler();
    } catch (...) {
      current_ = nullptr;
      throw;
    }
    current_ = nullptr;
  }
  now_ = until;
  return log_;
}

}  // namespace manet::sim
