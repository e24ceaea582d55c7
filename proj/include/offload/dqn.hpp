#pragma once

#include <vector>

#include "offload/config.hpp"
#include "offload/env.hpp"
#include "offload/net.hpp"
#include "offload/replay.hpp"

namespace offload {

// Network input: one-hot location, per-flow remaining/B, per-flow normalized
// time-to-deadline, WLAN-availability flag, and the realized rates scaled by
// their upper bounds. Keeps the finite-horizon state Markov for the net.
class StateEncoder {
public:
    explicit StateEncoder(const ScenarioConfig& cfg);

    int input_dim() const { return dim_; }
    std::vector<double> encode(const State& s, const ChannelSample& ch) const;

private:
    const ScenarioConfig* cfg_;
    int dim_;
};

// Epsilon-greedy over the feasible mask; greedy part is the masked argmin of
// the Q-values (costs-to-go), ties broken by lowest index.
int select_action(const QNetwork& net, std::span<const double> encoding,
                  const FeasibleMask& feasible, double epsilon, Rng& rng);

// z = cost for terminal transitions, else cost + gamma * masked min of the
// target network at the next encoding.
double td_target(const Experience& exp, const QNetwork& target_net, double gamma);

struct EpisodeCosts {
    double monetary = 0.0;
    double energy_joules = 0.0;
    double weighted_energy = 0.0;
    double penalty = 0.0;
    double total = 0.0;
    double delivered_mb = 0.0;
    int slots = 0;
};

struct DqnTrainResult {
    QNetwork net;
    std::vector<EpisodeCosts> episodes;
};

// Replay-memory Q-learning with a periodically synchronized target network:
// per slot an epsilon-greedy action, one experience stored, one minibatch
// gradient step (skipped until the memory holds batch_size entries), target
// sync every target_sync steps.
DqnTrainResult dqn_train(const ScenarioConfig& cfg, const DqnHyper& hyper, Rng& rng);

}  // namespace offload
