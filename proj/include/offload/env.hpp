#pragma once

#include <array>
#include <vector>

#include "offload/config.hpp"
#include "offload/rng.hpp"

namespace offload {

enum class NetworkChoice : int { Idle = 0, Cellular = 1, Wlan = 2 };
constexpr int kNumChoices = 3;

using FeasibleMask = std::array<bool, kNumChoices>;

struct State {
    int location = 0;                // grid cell index, row-major
    std::vector<double> remaining;   // MB per flow
    int slot = 1;                    // 1-based decision epoch
};

// Realized per-slot rates and the energy rates they imply. wlan_rate is zero
// where no AP covers the location; eps_wlan is then an unused 0 sentinel.
struct ChannelSample {
    double cell_rate = 0.0;  // Mbps
    double wlan_rate = 0.0;  // Mbps
    double eps_cell = 0.0;   // joule per megabit
    double eps_wlan = 0.0;
};

struct Action {
    NetworkChoice network = NetworkChoice::Idle;
    std::vector<double> alloc_cell;  // Mbps per flow
    std::vector<double> alloc_wlan;
};

struct SlotOutcome {
    State next_state;
    double monetary = 0.0;         // yen
    double energy_weighted = 0.0;  // theta-weighted joules
    double energy_joules = 0.0;    // unweighted joules, for reporting
    double penalty = 0.0;          // yen-equivalent charged this slot
    double total_cost = 0.0;       // monetary + energy_weighted + penalty
    std::vector<double> delivered; // MB per flow
    bool terminal = false;
};

// Exponential energy-per-bit fits: f1(x) = 1.4274 e^(-0.063 x),
// f2(x) = 1.4 e^(-0.09 x), x in Mbps, result in joule/Mb. Strictly decreasing.
double energy_rate(double throughput_mbps, EnergyModel model);

// Mean of a normal(mean, stddev) restricted to [lo, hi].
double truncated_normal_mean(double mean, double stddev, double lo, double hi);

std::vector<int> grid_neighbors(int loc, int width, int height);

// Lazy random walk: stay with stay_prob, otherwise a uniform 4-neighbor.
int sample_next_location(int loc, const ScenarioConfig& cfg, Rng& rng);

// Row-major L x L matrix of the walk above.
std::vector<double> transition_matrix(const ScenarioConfig& cfg);

ChannelSample sample_throughputs(int loc, const ScenarioConfig& cfg, Rng& rng);

// Expected-throughput channel (truncated-normal means); used by planners.
ChannelSample expected_channel(int loc, const ScenarioConfig& cfg);

bool flow_active(const State& s, int flow, const ScenarioConfig& cfg);
bool all_flows_inactive(const State& s, const ScenarioConfig& cfg);

// Earliest-deadline-first split of a realized network rate across active
// flows. No flow is allocated more than finishes its remaining volume this
// slot; the sum never exceeds network_rate.
std::vector<double> allocate_rate(const State& s, double network_rate, const ScenarioConfig& cfg);

double monetary_cost(const State& s, const Action& a, const ScenarioConfig& cfg);

// Unweighted joules for the slot; energy_cost applies the theta weight.
double energy_joules(const State& s, const Action& a, const ChannelSample& ch, const ScenarioConfig& cfg);
double energy_cost(const State& s, const Action& a, const ChannelSample& ch, const ScenarioConfig& cfg);

// Deadline charges due on arrival in `after`: flows with deadline + 1 ==
// after.slot pay penalty_coeff per residual MB, exactly once.
double penalty_due(const State& after, const ScenarioConfig& cfg);

FeasibleMask feasible_actions(const State& s, const ChannelSample& ch, const ScenarioConfig& cfg);

// One slot of the MDP: allocation, costs, deadline penalties, mobility.
// Throws std::invalid_argument when `choice` is not feasible.
SlotOutcome step(const State& s, NetworkChoice choice, const ChannelSample& ch,
                 const ScenarioConfig& cfg, Rng& rng);

// Full remaining volumes, uniformly random start location, slot 1.
State initial_state(const ScenarioConfig& cfg, Rng& rng);

inline double mb_per_slot(double rate_mbps, const ScenarioConfig& cfg) {
    return rate_mbps * cfg.slot_seconds / 8.0;
}

}  // namespace offload
