#pragma once

#include <string>
#include <vector>

#include "l3/channel.hpp"

namespace l3::detail {

/// `slot=<t> tx=<ids> rx=<id>:<D<sender>|C|S>,...`
std::string trace_slot(int slot, const std::vector<Transmission>& txs, const ChannelOutcome& outcome);
std::string trace_silent_slot(int slot);

/// Milliseconds with fixed three decimals.
std::string format_ms(double ms);

}  // namespace l3::detail
