#include "manet/packet.hpp"

namespace manet {

std::string_view to_string(LayerClass layer) {
  switch (layer) {
    case LayerClass::RoutingControl: return "routing";
    case LayerClass::MacControl: return "mac";
    case LayerClass::Data: return "data";
  }
  return "?";
}

std::string_view to_string(PacketKind kind) {
  switch (kind) {
    case PacketKind::Data: return "DATA";
    case PacketKind::AodvRreq: return "AODV_RREQ";
    case PacketKind::AodvRrep: return "AODV_RREP";
    case PacketKind::AodvRerr: return "AODV_RERR";
    case PacketKind::DsrRequest: return "DSR_RREQ";
    case PacketKind::DsrReply: return "DSR_RREP";
    case PacketKind::DsrError: return "DSR_RERR";
    case PacketKind::DsdvUpdate: return "DSDV_UPDATE";
  }
  return "?";
}

}  // namespace manet
