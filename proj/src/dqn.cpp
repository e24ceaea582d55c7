#include "offload/dqn.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace offload {

StateEncoder::StateEncoder(const ScenarioConfig& cfg) : cfg_(&cfg) {
    dim_ = cfg.cell_count() + 2 * cfg.flow_count() + 3;
}

std::vector<double> StateEncoder::encode(const State& s, const ChannelSample& ch) const {
    const ScenarioConfig& cfg = *cfg_;
    std::vector<double> x;
    x.reserve(dim_);
    for (int l = 0; l < cfg.cell_count(); ++l) x.push_back(l == s.location ? 1.0 : 0.0);
    for (int j = 0; j < cfg.flow_count(); ++j) {
        const double b = cfg.flow_sizes[j];
        x.push_back(b > 0.0 ? s.remaining[j] / b : 0.0);
    }
    const double horizon = static_cast<double>(cfg.horizon());
    for (int j = 0; j < cfg.flow_count(); ++j) {
        const double left = std::max(0, cfg.flow_deadlines[j] - s.slot);
        x.push_back(horizon > 0.0 ? left / horizon : 0.0);
    }
    x.push_back(ch.wlan_rate > 0.0 ? 1.0 : 0.0);
    x.push_back(ch.cell_rate / cfg.cell_hi);
    x.push_back(ch.wlan_rate / cfg.wlan_hi);
    return x;
}

int select_action(const QNetwork& net, std::span<const double> encoding,
                  const FeasibleMask& feasible, double epsilon, Rng& rng) {
    int n_feasible = 0;
    for (bool f : feasible) n_feasible += f ? 1 : 0;
    if (n_feasible == 0) throw std::invalid_argument("select_action: empty feasible mask");

    if (rng.uniform01() < epsilon) {
        uint64_t k = rng.uniform_int(static_cast<uint64_t>(n_feasible));
        for (int a = 0; a < kNumChoices; ++a) {
            if (!feasible[a]) continue;
            if (k == 0) return a;
            --k;
        }
    }

    const std::vector<double> q = forward(net, encoding);
    int best = -1;
    double best_q = std::numeric_limits<double>::infinity();
    for (int a = 0; a < kNumChoices; ++a) {
        if (!feasible[a]) continue;
        if (q[a] < best_q) {
            best_q = q[a];
            best = a;
        }
    }
    return best;
}

double td_target(const Experience& exp, const QNetwork& target_net, double gamma) {
    if (exp.terminal) return exp.cost;
    const std::vector<double> q = forward(target_net, exp.next_encoding);
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < kNumChoices; ++a)
        if (exp.next_feasible[a]) best = std::min(best, q[a]);
    if (best == std::numeric_limits<double>::infinity()) return exp.cost;
    return exp.cost + gamma * best;
}

DqnTrainResult dqn_train(const ScenarioConfig& cfg, const DqnHyper& hyper, Rng& rng) {
    cfg.validate();
    hyper.validate();

    const StateEncoder encoder(cfg);
    std::vector<int> dims;
    dims.push_back(encoder.input_dim());
    for (int h : hyper.hidden_dims) dims.push_back(h);
    dims.push_back(kNumChoices);

    DqnTrainResult result;
    result.net = init_network(dims, rng);
    QNetwork target = clone_parameters(result.net);
    ReplayMemory memory(hyper.replay_capacity);
    GradientSet grads = zero_gradients(result.net);
    uint64_t grad_steps = 0;

    for (int episode = 0; episode < hyper.train_episodes; ++episode) {
        State state = initial_state(cfg, rng);
        ChannelSample channel = sample_throughputs(state.location, cfg, rng);
        EpisodeCosts costs;
        bool done = all_flows_inactive(state, cfg);

        while (!done) {
            const std::vector<double> encoding = encoder.encode(state, channel);
            const FeasibleMask mask = feasible_actions(state, channel, cfg);
            const int action = select_action(result.net, encoding, mask, hyper.epsilon, rng);

            const SlotOutcome out = step(state, static_cast<NetworkChoice>(action), channel, cfg, rng);
            costs.monetary += out.monetary;
            costs.energy_joules += out.energy_joules;
            costs.weighted_energy += out.energy_weighted;
            costs.penalty += out.penalty;
            costs.total += out.total_cost;
            for (double d : out.delivered) costs.delivered_mb += d;
            ++costs.slots;

            Experience exp;
            exp.state_encoding = encoding;
            exp.action = action;
            exp.cost = out.total_cost;
            exp.terminal = out.terminal;
            if (!out.terminal) {
                channel = sample_throughputs(out.next_state.location, cfg, rng);
                exp.next_encoding = encoder.encode(out.next_state, channel);
                exp.next_feasible = feasible_actions(out.next_state, channel, cfg);
            }
            memory.push(std::move(exp));
            state = out.next_state;
            done = out.terminal;

            if (memory.size() < static_cast<std::size_t>(hyper.batch_size)) continue;
            const auto batch = memory.sample(static_cast<std::size_t>(hyper.batch_size), rng);
            grads.zero();
            for (const Experience& e : *batch) {
                const double z = td_target(e, target, hyper.gamma);
                backward(result.net, e.state_encoding, e.action, z, grads);
            }
            grads.scale(1.0 / static_cast<double>(batch->size()));
            sgd_step(result.net, grads, hyper.alpha);
            ++grad_steps;
            if (grad_steps % static_cast<uint64_t>(hyper.target_sync) == 0)
                target = clone_parameters(result.net);
        }
        result.episodes.push_back(costs);
    }
    return result;
}

}  // namespace offload
