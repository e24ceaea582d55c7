#include "offload/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace offload {

double energy_rate(double throughput_mbps, EnergyModel model) {
    if (!(throughput_mbps > 0.0))
        throw std::domain_error("energy_rate: throughput must be positive");
    if (model == EnergyModel::F1) return 1.4274 * std::exp(-0.063 * throughput_mbps);
    return 1.4 * std::exp(-0.09 * throughput_mbps);
}

double truncated_normal_mean(double mean, double stddev, double lo, double hi) {
    if (stddev <= 0.0) return std::min(std::max(mean, lo), hi);
    const double inv_sqrt2 = 0.7071067811865475244;
    const double inv_sqrt2pi = 0.3989422804014326779;
    const double a = (lo - mean) / stddev;
    const double b = (hi - mean) / stddev;
    const auto phi = [&](double x) { return inv_sqrt2pi * std::exp(-0.5 * x * x); };
    const auto cdf = [&](double x) { return 0.5 * (1.0 + std::erf(x * inv_sqrt2)); };
    const double z = cdf(b) - cdf(a);
    return mean + stddev * (phi(a) - phi(b)) / z;
}

std::vector<int> grid_neighbors(int loc, int width, int height) {
    const int r = loc / width;
    const int c = loc % width;
    std::vector<int> out;
    if (r > 0) out.push_back(loc - width);
    if (r + 1 < height) out.push_back(loc + width);
    if (c > 0) out.push_back(loc - 1);
    if (c + 1 < width) out.push_back(loc + 1);
    return out;
}

int sample_next_location(int loc, const ScenarioConfig& cfg, Rng& rng) {
    const double u = rng.uniform01();
    if (u < cfg.stay_prob) return loc;
    const auto nb = grid_neighbors(loc, cfg.grid_width, cfg.grid_height);
    if (nb.empty()) return loc;  // 1x1 grid
    return nb[static_cast<std::size_t>(rng.uniform_int(nb.size()))];
}

std::vector<double> transition_matrix(const ScenarioConfig& cfg) {
    const int L = cfg.cell_count();
    std::vector<double> P(static_cast<std::size_t>(L) * L, 0.0);
    for (int l = 0; l < L; ++l) {
        const auto nb = grid_neighbors(l, cfg.grid_width, cfg.grid_height);
        if (nb.empty()) {
            P[static_cast<std::size_t>(l) * L + l] = 1.0;
            continue;
        }
        P[static_cast<std::size_t>(l) * L + l] = cfg.stay_prob;
        const double share = (1.0 - cfg.stay_prob) / static_cast<double>(nb.size());
        for (int n : nb) P[static_cast<std::size_t>(l) * L + n] = share;
    }
    return P;
}

ChannelSample sample_throughputs(int loc, const ScenarioConfig& cfg, Rng& rng) {
    ChannelSample ch;
    ch.cell_rate = rng.truncated_normal(cfg.cell_mean, cfg.cell_std, cfg.cell_lo, cfg.cell_hi);
    ch.eps_cell = energy_rate(ch.cell_rate, cfg.energy_model);
    if (cfg.has_ap(loc)) {
        ch.wlan_rate = rng.truncated_normal(cfg.wlan_mean, cfg.wlan_std, cfg.wlan_lo, cfg.wlan_hi);
        ch.eps_wlan = energy_rate(ch.wlan_rate, cfg.energy_model);
    }
    return ch;
}

ChannelSample expected_channel(int loc, const ScenarioConfig& cfg) {
    ChannelSample ch;
    ch.cell_rate = truncated_normal_mean(cfg.cell_mean, cfg.cell_std, cfg.cell_lo, cfg.cell_hi);
    ch.eps_cell = energy_rate(ch.cell_rate, cfg.energy_model);
    if (cfg.has_ap(loc)) {
        ch.wlan_rate = truncated_normal_mean(cfg.wlan_mean, cfg.wlan_std, cfg.wlan_lo, cfg.wlan_hi);
        ch.eps_wlan = energy_rate(ch.wlan_rate, cfg.energy_model);
    }
    return ch;
}

bool flow_active(const State& s, int flow, const ScenarioConfig& cfg) {
    return s.remaining[flow] > 0.0 && s.slot <= cfg.flow_deadlines[flow];
}

bool all_flows_inactive(const State& s, const ScenarioConfig& cfg) {
    for (int j = 0; j < cfg.flow_count(); ++j)
        if (flow_active(s, j, cfg)) return false;
    return true;
}

std::vector<double> allocate_rate(const State& s, double network_rate, const ScenarioConfig& cfg) {
    const int M = cfg.flow_count();
    std::vector<double> alloc(M, 0.0);
    double budget = network_rate;
    // flow_deadlines are non-decreasing, so index order is deadline order
    for (int j = 0; j < M && budget > 0.0; ++j) {
        if (!flow_active(s, j, cfg)) continue;
        const double rate_to_finish = s.remaining[j] * 8.0 / cfg.slot_seconds;
        alloc[j] = std::min(rate_to_finish, budget);
        budget -= alloc[j];
    }
    return alloc;
}

namespace {

double clamped_volume_sum(const State& s, const std::vector<double>& alloc, const ScenarioConfig& cfg) {
    double total = 0.0;
    for (int j = 0; j < cfg.flow_count(); ++j)
        total += std::min(s.remaining[j], mb_per_slot(alloc[j], cfg));
    return total;
}

}  // namespace

double monetary_cost(const State& s, const Action& a, const ScenarioConfig& cfg) {
    if (a.alloc_cell.empty()) return 0.0;
    return cfg.price_cellular * clamped_volume_sum(s, a.alloc_cell, cfg);
}

double energy_joules(const State& s, const Action& a, const ChannelSample& ch, const ScenarioConfig& cfg) {
    double joules = 0.0;
    if (!a.alloc_cell.empty())
        joules += ch.eps_cell * 8.0 * clamped_volume_sum(s, a.alloc_cell, cfg);
    if (!a.alloc_wlan.empty())
        joules += ch.eps_wlan * 8.0 * clamped_volume_sum(s, a.alloc_wlan, cfg);
    return joules;
}

double energy_cost(const State& s, const Action& a, const ChannelSample& ch, const ScenarioConfig& cfg) {
    return cfg.theta * energy_joules(s, a, ch, cfg);
}

double penalty_due(const State& after, const ScenarioConfig& cfg) {
    double due = 0.0;
    for (int j = 0; j < cfg.flow_count(); ++j)
        if (cfg.flow_deadlines[j] + 1 == after.slot) due += cfg.penalty_coeff * after.remaining[j];
    return due;
}

FeasibleMask feasible_actions(const State& s, const ChannelSample& ch, const ScenarioConfig& cfg) {
    if (all_flows_inactive(s, cfg)) return {true, false, false};
    return {true, true, ch.wlan_rate > 0.0};
}

SlotOutcome step(const State& s, NetworkChoice choice, const ChannelSample& ch,
                 const ScenarioConfig& cfg, Rng& rng) {
    const FeasibleMask mask = feasible_actions(s, ch, cfg);
    if (!mask[static_cast<int>(choice)])
        throw std::invalid_argument("step: chosen network is not feasible in this state");

    const int M = cfg.flow_count();
    Action act;
    act.network = choice;
    if (choice == NetworkChoice::Cellular)
        act.alloc_cell = allocate_rate(s, ch.cell_rate, cfg);
    else if (choice == NetworkChoice::Wlan)
        act.alloc_wlan = allocate_rate(s, ch.wlan_rate, cfg);

    SlotOutcome out;
    out.delivered.assign(M, 0.0);
    const std::vector<double>& alloc =
        choice == NetworkChoice::Cellular ? act.alloc_cell : act.alloc_wlan;
    if (choice != NetworkChoice::Idle)
        for (int j = 0; j < M; ++j)
            out.delivered[j] = std::min(s.remaining[j], mb_per_slot(alloc[j], cfg));

    out.monetary = monetary_cost(s, act, cfg);
    out.energy_joules = energy_joules(s, act, ch, cfg);
    out.energy_weighted = cfg.theta * out.energy_joules;

    out.next_state.location = sample_next_location(s.location, cfg, rng);
    out.next_state.slot = s.slot + 1;
    out.next_state.remaining.resize(M);
    for (int j = 0; j < M; ++j)
        out.next_state.remaining[j] = std::max(0.0, s.remaining[j] - out.delivered[j]);

    out.penalty = penalty_due(out.next_state, cfg);
    out.total_cost = out.monetary + out.energy_weighted + out.penalty;
    out.terminal = out.next_state.slot > cfg.horizon() || all_flows_inactive(out.next_state, cfg);
    return out;
}

State initial_state(const ScenarioConfig& cfg, Rng& rng) {
    State s;
    s.location = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(cfg.cell_count())));
    s.remaining = cfg.flow_sizes;
    s.slot = 1;
    return s;
}

}  // namespace offload
