#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>
#include <variant>
#include <vector>

#include "manet/types.hpp"

namespace manet {

/// Which energy counter a frame is charged to.
enum class LayerClass : std::uint8_t { RoutingControl = 0, MacControl = 1, Data = 2 };
inline constexpr std::size_t kLayerCount = 3;

std::string_view to_string(LayerClass layer);

enum class PacketKind : std::uint8_t {
  Data,
  AodvRreq,
  AodvRrep,
  AodvRerr,
  DsrRequest,
  DsrReply,
  DsrError,
  DsdvUpdate,
};

std::string_view to_string(PacketKind kind);

inline constexpr std::uint32_t kMaxHops = 64;

inline constexpr std::uint32_t kInfiniteMetric = std::numeric_limits<std::uint32_t>::max();

struct AodvRreq {
  std::uint32_t broadcast_id = 0;
  NodeId source = 0;
  std::uint32_t source_seq = 0;
  NodeId destination = 0;
  std::uint32_t destination_seq = 0;
  /// False when the originator has never heard of the destination.
  bool destination_seq_known = false;
  std::uint32_t hop_count = 0;
};

struct AodvRrep {
  /// The node that asked for the route.
  NodeId origin = 0;
  NodeId destination = 0;
  std::uint32_t destination_seq = 0;
  std::uint32_t hop_count = 0;
  double lifetime = 0.0;
};

struct AodvRerr {
  struct Unreachable {
    NodeId destination;
    std::uint32_t seq;
  };
  std::vector<Unreachable> destinations;
};

struct DsrRequest {
  std::uint32_t request_id = 0;
  NodeId source = 0;
  NodeId target = 0;
  /// Accumulated route, starting with the source.
  std::vector<NodeId> route;
};

struct DsrReply {
  /// Complete route from requester to target.
  std::vector<NodeId> route;
  /// Hops the reply travels, from target back to requester.
  std::vector<NodeId> path;
  std::size_t hop_index = 0;
};

struct DsrError {
  NodeId link_from = 0;
  NodeId link_to = 0;
  /// Path from the detecting node back to the data packet's origin.
  std::vector<NodeId> path;
  std::size_t hop_index = 0;
};

struct DsdvUpdate {
  struct Entry {
    NodeId destination;
    std::uint32_t metric;
    std::uint32_t seq;
  };
  std::vector<Entry> entries;
  bool full_dump = true;
};

/// Source route carried by DSR data packets.
struct SourceRoute {
  std::vector<NodeId> route;
  std::size_t hop_index = 0;
};

using Payload = std::variant<std::monostate, AodvRreq, AodvRrep, AodvRerr, DsrRequest, DsrReply,
                             DsrError, DsdvUpdate, SourceRoute>;

struct Packet {
  std::uint64_t uid = 0;
  LayerClass layer = LayerClass::Data;
  PacketKind kind = PacketKind::Data;
  std::uint32_t size_bits = 0;
  NodeId origin = 0;
  NodeId destination = 0;
  /// Application payload bits (data packets only).
  std::uint32_t payload_bits = 0;
  SimTime created = 0.0;
  /// Hops travelled so far; bounds forwarding loops.
  std::uint32_t hops = 0;
  Payload payload;
};

}  // namespace manet
