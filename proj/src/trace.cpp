#include "trace.hpp"

#include <cstdio>
#include <sstream>

namespace l3::detail {

namespace {

void write_senders(std::ostringstream& os, const std::vector<Transmission>& txs) {
  os << " tx=";
  if (txs.empty()) os << '-';
  for (std::size_t i = 0; i < txs.size(); ++i) {
    if (i) os << ',';
    os << txs[i].sender;
  }
}

}  // namespace

std::string trace_slot(int slot, const std::vector<Transmission>& txs, const ChannelOutcome& outcome) {
  std::ostringstream os;
  os << "slot=" << slot;
  write_senders(os, txs);
  os << " rx=";
  bool first = true;
  for (const auto& [id, rec] : outcome.per_receiver) {
    if (!first) os << ',';
    first = false;
    os << id << ':';
    if (const auto* d = std::get_if<Delivered>(&rec)) {
      os << 'D' << d->packet.sender;
    } else if (std::holds_alternative<Collision>(rec)) {
      os << 'C';
    } else {
      os << 'S';
    }
  }
  return os.str();
}

std::string trace_silent_slot(int slot) { return "slot=" + std::to_string(slot) + " tx=- rx=-"; }

std::string format_ms(double ms) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

}  // namespace l3::detail
