#pragma once

#include "offload/config.hpp"
#include "offload/env.hpp"

namespace offload {

// Availability-first rule: take WLAN whenever covered; otherwise fall back to
// cellular only when some active flow is slack-critical, i.e. its remaining
// volume exceeds 0.9 * slots-to-deadline * expected cellular MB per slot.
NetworkChoice heuristic_decide(const State& s, const ChannelSample& ch, const ScenarioConfig& cfg);

}  // namespace offload
