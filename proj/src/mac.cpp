#include "manet/mac/mac.hpp"

#include <algorithm>
#include <cmath>

namespace manet::mac {

void ChannelModel::validate() const {
  if (!(bit_rate > 0.0)) throw ConfigError("channel bit rate must be positive");
  if (!(tx_range > 0.0 && cs_range > 0.0)) throw ConfigError("channel ranges must be positive");
}

void MacParams::validate() const {
  if (!(slot > 0.0 && difs >= 0.0 && sifs >= 0.0)) throw ConfigError("MAC timing constants must be positive");
  if (cw_slots == 0) throw ConfigError("contention window must be at least one slot");
  if (!(rts_threshold_bits >= 0.0)) throw ConfigError("RTS threshold must be non-negative");
  if (queue_limit == 0) throw ConfigError("MAC queue limit must be positive");
}

std::string_view to_string(FrameKind kind) {
  switch (kind) {
    case FrameKind::Rts: return "RTS";
    case FrameKind::Cts: return "CTS";
    case FrameKind::Ack: return "ACK";
    case FrameKind::DataUnicast: return "DATA";
    case FrameKind::DataBroadcast: return "BCAST";
  }
  return "?";
}

std::uint32_t frame_overhead(FrameKind kind, const MacParams& params) {
  switch (kind) {
    case FrameKind::Rts: return params.rts_bits;
    case FrameKind::Cts: return params.cts_bits;
    case FrameKind::Ack: return params.ack_bits;
    case FrameKind::DataUnicast:
    case FrameKind::DataBroadcast: return params.data_header_bits;
  }
  return 0;
}

LayerClass Frame::layer() const {
  if (packet && (kind == FrameKind::DataUnicast || kind == FrameKind::DataBroadcast))
    return packet->layer;
  return LayerClass::MacControl;
}

std::vector<std::vector<RxOutcome>> resolve_receptions(const ChannelModel& model,
                                                       std::span<const PlannedTransmission> txs,
                                                       std::span<const mobility::Vec2> receivers) {
  std::vector<std::vector<RxOutcome>> out(receivers.size(),
                                          std::vector<RxOutcome>(txs.size(), RxOutcome::OutOfRange));
  for (std::size_t r = 0; r < receivers.size(); ++r) {
    for (std::size_t t = 0; t < txs.size(); ++t) {
      if (mobility::distance(receivers[r], txs[t].position) > model.tx_range) continue;
      bool clash = false;
      for (std::size_t u = 0; u < txs.size() && !clash; ++u) {
        if (u == t) continue;
        if (mobility::distance(receivers[r], txs[u].position) > model.cs_range) continue;
        clash = txs[u].start < txs[t].end && txs[t].start < txs[u].end;
      }
      out[r][t] = clash ? RxOutcome::Collided : RxOutcome::Received;
    }
  }
  return out;
}

// --- Channel -----------------------------------------------------------------

Channel::Channel(sim::Engine& engine, const ChannelModel& model, std::size_t node_count,
                 PositionFn positions)
    : engine_(engine), model_(model), positions_(std::move(positions)), macs_(node_count, nullptr) {
  model_.validate();
}

void Channel::attach(NodeId node, Mac& mac) { macs_.at(node) = &mac; }

void Channel::detach(NodeId node) { macs_.at(node) = nullptr; }

void Channel::transmit(Frame frame) {
  const NodeId sender = frame.transmitter;
  Mac* sender_mac = macs_.at(sender);
  const SimTime now = engine_.now();
  auto tx = std::make_shared<Transmission>();
  tx->id = next_id_++;
  tx->start = now;
  tx->end = now + airtime(frame.size_bits);
  tx->frame = std::move(frame);

  const mobility::Vec2 origin = positions_(sender, now);
  std::vector<NodeId> listeners;
  for (NodeId j = 0; j < macs_.size(); ++j) {
    if (j == sender || macs_[j] == nullptr) continue;
    const double d = mobility::distance(origin, positions_(j, now));
    if (d > model_.cs_range) continue;
    listeners.push_back(j);
  }
  // Notify after the scan so rx_start side effects cannot change the set.
  for (NodeId j : listeners) {
    const double d = mobility::distance(origin, positions_(j, now));
    if (macs_[j] != nullptr) macs_[j]->on_rx_start(tx, d <= model_.tx_range);
  }

  engine_.schedule(tx->end, sim::EventTag{"tx-end", sender, tx->id},
                   [this, tx, sender_mac, listeners = std::move(listeners)] {
                     if (sender_mac != nullptr) sender_mac->on_tx_end(tx);
                     for (NodeId j : listeners)
                       if (macs_[j] != nullptr) macs_[j]->on_rx_end(tx);
                   });
}

// --- Mac ---------------------------------------------------------------------

Mac::Mac(NodeId self, sim::Engine& engine, Channel& channel, const MacParams& params,
         sim::RandomStream rng, energy::Radio* radio)
    : self_(self), engine_(engine), channel_(channel), params_(params), rng_(rng), radio_(radio) {
  params_.validate();
}

bool Mac::medium_busy() const {
  return sensed_ > 0 || transmitting_ || engine_.now() < nav_until_;
}

std::uint32_t Mac::data_frame_bits(const Outgoing& o) const {
  return o.packet->size_bits + params_.data_header_bits;
}

bool Mac::send(PacketPtr packet, NodeId next_hop) {
  if (phase_ == Phase::Dead) return false;
  if (queue_.size() >= params_.queue_limit) {
    ++stats_.queue_drops;
    return false;
  }
  queue_.push_back(Outgoing{std::move(packet), next_hop, 0, next_mac_seq_++});
  if (phase_ == Phase::Idle) start_contention();
  return true;
}

std::vector<Mac::PacketPtr> Mac::purge(NodeId next_hop) {
  std::vector<PacketPtr> removed;
  if (next_hop == kBroadcast) return removed;
  auto first = queue_.begin();
  if (first != queue_.end() && phase_ != Phase::Idle) ++first;  // head is in service
  for (auto it = first; it != queue_.end();) {
    if (it->next_hop == next_hop) {
      removed.push_back(it->packet);
      it = queue_.erase(it);
    } else {
      ++it;
    }
  }
  return removed;
}

void Mac::shutdown() {
  phase_ = Phase::Dead;
  engine_.cancel(access_event_);
  engine_.cancel(timeout_event_);
  engine_.cancel(nav_event_);
  access_event_ = timeout_event_ = nav_event_ = {};
  queue_.clear();
  incoming_.clear();
}

void Mac::start_contention() {
  phase_ = Phase::Contend;
  if (backoff_slots_ < 0) backoff_slots_ = static_cast<int>(rng_.below(params_.cw_slots));
  resume_countdown();
}

void Mac::resume_countdown() {
  if (phase_ != Phase::Contend || access_event_.valid() || medium_busy()) return;
  countdown_start_ = engine_.now() + params_.difs;
  access_event_ = engine_.schedule(countdown_start_ + backoff_slots_ * params_.slot,
                                   sim::EventTag{"mac-access", self_, 0}, [this] {
                                     access_event_ = {};
                                     on_access();
                                   });
}

void Mac::pause_countdown() {
  if (!access_event_.valid()) return;
  engine_.cancel(access_event_);
  access_event_ = {};
  const SimTime now = engine_.now();
  if (now > countdown_start_) {
    const int consumed = static_cast<int>(std::floor((now - countdown_start_) / params_.slot + 1e-9));
    backoff_slots_ = std::max(0, backoff_slots_ - consumed);
  }
}

void Mac::medium_became_idle() {
  if (phase_ == Phase::Contend) resume_countdown();
}

void Mac::set_nav(SimTime until) {
  if (until <= nav_until_) return;
  nav_until_ = until;
  pause_countdown();
  engine_.cancel(nav_event_);
  nav_event_ = engine_.schedule(until, sim::EventTag{"mac-nav-end", self_, 0}, [this] {
    nav_event_ = {};
    if (!medium_busy()) medium_became_idle();
  });
}

void Mac::on_access() {
  if (phase_ != Phase::Contend || queue_.empty()) return;
  backoff_slots_ = -1;
  const Outgoing& head = queue_.front();
  const std::uint32_t bits = data_frame_bits(head);
  if (head.next_hop == kBroadcast) {
    phase_ = Phase::AwaitTx;
    transmit(Frame{FrameKind::DataBroadcast, head.packet, bits, self_, kBroadcast, 0.0, head.mac_seq});
  } else if (static_cast<double>(bits) > params_.rts_threshold_bits) {
    phase_ = Phase::AwaitTx;
    const double nav = 3 * params_.sifs + airtime(params_.cts_bits) + airtime(bits) + airtime(params_.ack_bits);
    transmit(Frame{FrameKind::Rts, nullptr, params_.rts_bits, self_, head.next_hop, nav, head.mac_seq});
  } else {
    send_data_frame();
  }
}

void Mac::send_data_frame() {
  if (phase_ == Phase::Dead || queue_.empty()) return;
  phase_ = Phase::AwaitTx;
  const Outgoing& head = queue_.front();
  const double nav = params_.sifs + airtime(params_.ack_bits);
  transmit(Frame{FrameKind::DataUnicast, head.packet, data_frame_bits(head), self_, head.next_hop, nav,
                 head.mac_seq});
}

void Mac::transmit(Frame frame) {
  if (transmitting_) {
    ++stats_.overlap_violations;
    return;
  }
  for (auto& in : incoming_) in.corrupt = true;
  transmitting_ = true;
  switch (frame.kind) {
    case FrameKind::Rts: ++stats_.tx_rts; break;
    case FrameKind::Cts: ++stats_.tx_cts; break;
    case FrameKind::Ack: ++stats_.tx_ack; break;
    case FrameKind::DataUnicast: ++stats_.tx_data_unicast; break;
    case FrameKind::DataBroadcast: ++stats_.tx_data_broadcast; break;
  }
  if (radio_ != nullptr) {
    radio_->begin_tx(engine_.now());
    radio_->charge(energy::Direction::Tx, frame.layer(), frame.size_bits);
  }
  ++stats_.tx_reports;
  if (callbacks_.energy_report) callbacks_.energy_report(frame, energy::Direction::Tx);
  channel_.transmit(std::move(frame));
}

void Mac::on_rx_start(const std::shared_ptr<const Transmission>& tx, bool decodable) {
  if (phase_ == Phase::Dead) return;
  ++sensed_;
  Incoming in{tx->id, decodable, false, false};
  if (transmitting_) {
    in.corrupt = true;
  } else {
    if (!incoming_.empty()) {
      for (auto& other : incoming_) other.corrupt = true;
      in.corrupt = true;
    }
    if (decodable && (radio_ == nullptr || radio_->alive())) {
      in.charged = true;
      if (radio_ != nullptr) {
        radio_->begin_rx(engine_.now());
        radio_->charge(energy::Direction::Rx, tx->frame.layer(), tx->frame.size_bits);
      }
      ++stats_.rx_reports;
      if (callbacks_.energy_report) callbacks_.energy_report(tx->frame, energy::Direction::Rx);
    }
  }
  incoming_.push_back(in);
  pause_countdown();
}

void Mac::on_rx_end(const std::shared_ptr<const Transmission>& tx) {
  if (phase_ == Phase::Dead) return;
  auto it = std::find_if(incoming_.begin(), incoming_.end(),
                         [&](const Incoming& in) { return in.tx_id == tx->id; });
  if (it == incoming_.end()) return;
  const Incoming in = *it;
  incoming_.erase(it);
  --sensed_;
  if (in.charged && radio_ != nullptr) radio_->end_rx(engine_.now());
  if (in.decodable) {
    if (in.corrupt) {
      ++stats_.rx_collided;
    } else {
      ++stats_.rx_ok;
      handle_frame(tx->frame);
    }
  }
  if (phase_ != Phase::Dead && !medium_busy()) medium_became_idle();
}

void Mac::on_tx_end(const std::shared_ptr<const Transmission>& tx) {
  transmitting_ = false;
  if (radio_ != nullptr) radio_->end_tx(engine_.now());
  if (phase_ == Phase::Dead) return;
  const SimTime now = engine_.now();
  switch (tx->frame.kind) {
    case FrameKind::DataBroadcast:
      finish_head();
      break;
    case FrameKind::Rts:
      phase_ = Phase::WaitCts;
      timeout_event_ = engine_.schedule(now + params_.sifs + airtime(params_.cts_bits) + params_.slot,
                                        sim::EventTag{"mac-cts-timeout", self_, tx->frame.mac_seq},
                                        [this] {
                                          timeout_event_ = {};
                                          on_timeout();
                                        });
      break;
    case FrameKind::DataUnicast:
      phase_ = Phase::WaitAck;
      timeout_event_ = engine_.schedule(now + params_.sifs + airtime(params_.ack_bits) + params_.slot,
                                        sim::EventTag{"mac-ack-timeout", self_, tx->frame.mac_seq},
                                        [this] {
                                          timeout_event_ = {};
                                          on_timeout();
                                        });
      break;
    case FrameKind::Cts:
    case FrameKind::Ack:
      if (queue_.empty()) {
        phase_ = Phase::Idle;
      } else {
        phase_ = Phase::Contend;
        if (backoff_slots_ < 0) backoff_slots_ = static_cast<int>(rng_.below(params_.cw_slots));
      }
      break;
  }
  if (!medium_busy()) medium_became_idle();
}

void Mac::respond(Frame frame) {
  pause_countdown();
  phase_ = Phase::Responding;
  engine_.schedule_in(params_.sifs, sim::EventTag{"mac-respond", self_, frame.mac_seq},
                      [this, frame = std::move(frame)]() mutable {
                        if (phase_ == Phase::Dead) return;
                        transmit(std::move(frame));
                      });
}

void Mac::handle_frame(const Frame& frame) {
  const SimTime now = engine_.now();
  const bool to_me = frame.receiver == self_;
  const bool can_respond = phase_ == Phase::Idle || phase_ == Phase::Contend;
  switch (frame.kind) {
    case FrameKind::Rts:
      if (!to_me) {
        set_nav(now + frame.nav);
      } else if (can_respond && now >= nav_until_) {
        const double nav = frame.nav - params_.sifs - airtime(params_.cts_bits);
        respond(Frame{FrameKind::Cts, nullptr, params_.cts_bits, self_, frame.transmitter, nav, frame.mac_seq});
      }
      break;
    case FrameKind::Cts:
      if (!to_me) {
        set_nav(now + frame.nav);
      } else if (phase_ == Phase::WaitCts && !queue_.empty() &&
                 queue_.front().next_hop == frame.transmitter) {
        engine_.cancel(timeout_event_);
        timeout_event_ = {};
        phase_ = Phase::AwaitTx;
        engine_.schedule_in(params_.sifs, sim::EventTag{"mac-data", self_, frame.mac_seq},
                            [this] { send_data_frame(); });
      }
      break;
    case FrameKind::DataUnicast: {
      if (!to_me) {
        set_nav(now + frame.nav);
        break;
      }
      if (can_respond)
        respond(Frame{FrameKind::Ack, nullptr, params_.ack_bits, self_, frame.transmitter, 0.0, frame.mac_seq});
      auto& last = last_seq_from_[frame.transmitter];
      if (last == frame.mac_seq) {
        ++stats_.duplicates;
      } else {
        last = frame.mac_seq;
        ++stats_.delivered_unicast;
        if (callbacks_.receive) callbacks_.receive(frame.packet, frame.transmitter);
      }
      break;
    }
    case FrameKind::DataBroadcast:
      ++stats_.delivered_broadcast;
      if (callbacks_.receive) callbacks_.receive(frame.packet, frame.transmitter);
      break;
    case FrameKind::Ack:
      if (to_me && phase_ == Phase::WaitAck && !queue_.empty() &&
          queue_.front().next_hop == frame.transmitter) {
        engine_.cancel(timeout_event_);
        timeout_event_ = {};
        ++stats_.acks_received;
        finish_head();
      }
      break;
  }
}

void Mac::on_timeout() {
  if (phase_ == Phase::Dead) return;
  retry_or_fail();
}

void Mac::retry_or_fail() {
  Outgoing& head = queue_.front();
  ++head.retries;
  if (head.retries > params_.retry_limit) {
    ++stats_.unicast_failures;
    PacketPtr packet = head.packet;
    const NodeId hop = head.next_hop;
    queue_.pop_front();
    phase_ = Phase::Idle;
    if (callbacks_.unicast_failed) callbacks_.unicast_failed(packet, hop);
    if (phase_ == Phase::Idle && !queue_.empty()) start_contention();
    return;
  }
  ++stats_.retransmissions;
  phase_ = Phase::Contend;
  backoff_slots_ = static_cast<int>(rng_.below(params_.cw_slots));
  resume_countdown();
}

void Mac::finish_head() {
  queue_.pop_front();
  phase_ = Phase::Idle;
  if (!queue_.empty()) start_contention();
}

}  // namespace manet::mac
