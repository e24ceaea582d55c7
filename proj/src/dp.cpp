#include "offload/dp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace offload {

ExpectedRates expected_rates(const ScenarioConfig& cfg) {
    ExpectedRates r;
    r.cell_mbps = truncated_normal_mean(cfg.cell_mean, cfg.cell_std, cfg.cell_lo, cfg.cell_hi);
    r.wlan_mbps = truncated_normal_mean(cfg.wlan_mean, cfg.wlan_std, cfg.wlan_lo, cfg.wlan_hi);
    return r;
}

std::vector<double> perturb_transitions(const std::vector<double>& matrix,
                                        const ScenarioConfig& cfg, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("perturb_transitions: eta must be in [0,1]");
    const int L = cfg.cell_count();
    if (matrix.size() != static_cast<std::size_t>(L) * L)
        throw std::invalid_argument("perturb_transitions: matrix is not L x L");
    std::vector<double> out(matrix.size(), 0.0);
    for (int l = 0; l < L; ++l) {
        std::vector<int> support = grid_neighbors(l, cfg.grid_width, cfg.grid_height);
        support.push_back(l);
        const double u = 1.0 / static_cast<double>(support.size());
        for (int c = 0; c < L; ++c)
            out[static_cast<std::size_t>(l) * L + c] = (1.0 - eta) * matrix[static_cast<std::size_t>(l) * L + c];
        for (int c : support)
            out[static_cast<std::size_t>(l) * L + c] += eta * u;
    }
    return out;
}

namespace {

constexpr double kUnitEps = 1e-9;

long to_units_ceil(double mb, double sigma) {
    if (mb <= 0.0) return 0;
    return static_cast<long>(std::ceil(mb / sigma - kUnitEps));
}

std::vector<std::vector<std::pair<int, double>>> sparse_rows(const std::vector<double>& matrix, int L) {
    std::vector<std::vector<std::pair<int, double>>> rows(L);
    for (int l = 0; l < L; ++l)
        for (int c = 0; c < L; ++c) {
            const double p = matrix[static_cast<std::size_t>(l) * L + c];
            if (p != 0.0) rows[l].emplace_back(c, p);
        }
    return rows;
}

// One slot of the discretized model shared by both solvers: EDF volume fill,
// per-flow round-down to sigma multiples, then deadline charges for flows
// expiring before the horizon (those flows are zeroed, having paid once).
// Returns the slot cost; writes the successor units to `next`.
double apply_discrete_slot(const ScenarioConfig& cfg, double sigma, int slot, NetworkChoice n,
                           double vol_budget_mb, double eps_joule_per_mb_bit,
                           std::span<const long> b, std::span<long> next) {
    const int M = cfg.flow_count();
    double budget = vol_budget_mb;
    double delivered_mb = 0.0;
    for (int j = 0; j < M; ++j) {
        next[j] = b[j];
        if (cfg.flow_deadlines[j] < slot || b[j] == 0) continue;
        if (budget > 0.0) {
            const double vol = std::min(static_cast<double>(b[j]) * sigma, budget);
            budget -= vol;
            const long d = static_cast<long>(std::floor(vol / sigma + kUnitEps));
            next[j] = b[j] - d;
            delivered_mb += static_cast<double>(d) * sigma;
        }
    }
    double cost = 0.0;
    if (n == NetworkChoice::Cellular) cost += cfg.price_cellular * delivered_mb;
    if (n != NetworkChoice::Idle)
        cost += cfg.theta * eps_joule_per_mb_bit * 8.0 * delivered_mb;
    for (int j = 0; j < M; ++j) {
        if (cfg.flow_deadlines[j] == slot && cfg.flow_deadlines[j] < cfg.horizon()) {
            cost += cfg.penalty_coeff * static_cast<double>(next[j]) * sigma;
            next[j] = 0;
        }
    }
    return cost;
}

const char* choice_name(NetworkChoice c) {
    switch (c) {
        case NetworkChoice::Idle: return "idle";
        case NetworkChoice::Cellular: return "cellular";
        default: return "wlan";
    }
}

std::string format_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

std::size_t DpTable::vec_index(std::span<const long> units) const {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < size_units_.size(); ++j) {
        if (units[j] < 0 || units[j] > size_units_[j])
            throw std::out_of_range("DpTable: remaining units out of range");
        idx += static_cast<std::size_t>(units[j]) * strides_[j];
    }
    return idx;
}

std::size_t DpTable::entry_count() const {
    return values_.size() * locations_ * n_vectors_;
}

DpTable DpTable::solve(const ScenarioConfig& cfg, const std::vector<double>& transitions,
                       const ExpectedRates& rates, std::size_t state_cap) {
    cfg.validate();
    DpTable t;
    t.cfg_ = &cfg;
    t.horizon_ = cfg.horizon();
    t.locations_ = cfg.cell_count();
    t.sigma_ = cfg.granularity_sigma;
    const int M = cfg.flow_count();
    const int L = t.locations_;

    t.size_units_.resize(M);
    for (int j = 0; j < M; ++j) t.size_units_[j] = to_units_ceil(cfg.flow_sizes[j], t.sigma_);

    t.strides_.assign(M, 1);
    std::size_t n_vec = 1;
    for (int j = 0; j < M; ++j) {
        t.strides_[j] = static_cast<long>(n_vec);
        const std::size_t levels = static_cast<std::size_t>(t.size_units_[j]) + 1;
        if (n_vec > state_cap / levels + 1) n_vec = state_cap + 1;  // saturate
        else n_vec *= levels;
        if (n_vec > state_cap) break;
    }
    const std::size_t total = n_vec > state_cap
                                  ? state_cap + 1
                                  : n_vec * static_cast<std::size_t>(L) * (t.horizon_ + 1);
    if (n_vec > state_cap || total > state_cap)
        throw DpTooLargeError("dp_solve: state space exceeds cap of " + std::to_string(state_cap) +
                              " entries; reduce flows/sizes or raise the cap");
    t.n_vectors_ = n_vec;

    const auto rows = sparse_rows(transitions, L);
    const double vol_cell = mb_per_slot(rates.cell_mbps, cfg);
    const double vol_wlan = mb_per_slot(rates.wlan_mbps, cfg);
    const double eps_cell = energy_rate(rates.cell_mbps, cfg.energy_model);
    const double eps_wlan = rates.wlan_mbps > 0.0 ? energy_rate(rates.wlan_mbps, cfg.energy_model) : 0.0;

    t.values_.assign(t.horizon_ + 1, std::vector<double>());
    t.policy_.assign(t.horizon_, std::vector<uint8_t>());

    // Unit sums per vector index, for the terminal penalty layer.
    std::vector<long> unit_sums(n_vec, 0);
    {
        std::vector<long> units(M, 0);
        for (std::size_t idx = 0; idx < n_vec; ++idx) {
            unit_sums[idx] = std::accumulate(units.begin(), units.end(), 0L);
            for (int j = 0; j < M; ++j) {  // odometer increment
                if (units[j] < t.size_units_[j]) {
                    ++units[j];
                    break;
                }
                units[j] = 0;
            }
        }
    }

    std::vector<double>& terminal = t.values_[t.horizon_];
    terminal.resize(static_cast<std::size_t>(L) * n_vec);
    for (int l = 0; l < L; ++l)
        for (std::size_t idx = 0; idx < n_vec; ++idx)
            terminal[static_cast<std::size_t>(l) * n_vec + idx] =
                cfg.penalty_coeff * t.sigma_ * static_cast<double>(unit_sums[idx]);

    std::vector<long> units(M, 0), scratch(M, 0);
    std::vector<std::size_t> next_idx(n_vec * 3);
    std::vector<double> slot_cost(n_vec * 3);

    for (int slot = t.horizon_; slot >= 1; --slot) {
        std::fill(units.begin(), units.end(), 0L);
        for (std::size_t idx = 0; idx < n_vec; ++idx) {
            for (int a = 0; a < kNumChoices; ++a) {
                const NetworkChoice n = static_cast<NetworkChoice>(a);
                const double vol = n == NetworkChoice::Cellular ? vol_cell
                                  : n == NetworkChoice::Wlan   ? vol_wlan
                                                               : 0.0;
                const double eps = n == NetworkChoice::Cellular ? eps_cell
                                  : n == NetworkChoice::Wlan   ? eps_wlan
                                                               : 0.0;
                slot_cost[idx * 3 + a] = apply_discrete_slot(cfg, t.sigma_, slot, n, vol, eps, units, scratch);
                std::size_t nidx = 0;
                for (int j = 0; j < M; ++j) nidx += static_cast<std::size_t>(scratch[j]) * t.strides_[j];
                next_idx[idx * 3 + a] = nidx;
            }
            for (int j = 0; j < M; ++j) {
                if (units[j] < t.size_units_[j]) {
                    ++units[j];
                    break;
                }
                units[j] = 0;
            }
        }

        const std::vector<double>& vnext = t.values_[slot];
        std::vector<double>& vcur = t.values_[slot - 1];
        std::vector<uint8_t>& pcur = t.policy_[slot - 1];
        vcur.resize(static_cast<std::size_t>(L) * n_vec);
        pcur.resize(static_cast<std::size_t>(L) * n_vec);
        for (int l = 0; l < L; ++l) {
            const bool wlan_ok = cfg.has_ap(l) && rates.wlan_mbps > 0.0;
            for (std::size_t idx = 0; idx < n_vec; ++idx) {
                double best = std::numeric_limits<double>::infinity();
                uint8_t best_a = 0;
                for (int a = 0; a < kNumChoices; ++a) {
                    if (a == static_cast<int>(NetworkChoice::Wlan) && !wlan_ok) continue;
                    double v = slot_cost[idx * 3 + a];
                    const std::size_t nidx = next_idx[idx * 3 + a];
                    for (const auto& [lp, p] : rows[l])
                        v += p * vnext[static_cast<std::size_t>(lp) * n_vec + nidx];
                    if (v < best) {
                        best = v;
                        best_a = static_cast<uint8_t>(a);
                    }
                }
                vcur[static_cast<std::size_t>(l) * n_vec + idx] = best;
                pcur[static_cast<std::size_t>(l) * n_vec + idx] = best_a;
            }
        }
    }
    return t;
}

double DpTable::value(int slot, int location, std::span<const long> units) const {
    if (slot < 1 || slot > horizon_ + 1) throw std::out_of_range("DpTable::value: slot");
    if (location < 0 || location >= locations_) throw std::out_of_range("DpTable::value: location");
    return values_[slot - 1][static_cast<std::size_t>(location) * n_vectors_ + vec_index(units)];
}

NetworkChoice DpTable::action(int slot, int location, std::span<const long> units) const {
    if (slot < 1 || slot > horizon_) throw std::out_of_range("DpTable::action: slot");
    if (location < 0 || location >= locations_) throw std::out_of_range("DpTable::action: location");
    return static_cast<NetworkChoice>(
        policy_[slot - 1][static_cast<std::size_t>(location) * n_vectors_ + vec_index(units)]);
}

double DpTable::start_value(int location) const {
    return value(1, location, size_units_);
}

double DpTable::expected_start_value() const {
    double sum = 0.0;
    for (int l = 0; l < locations_; ++l) sum += start_value(l);
    return sum / static_cast<double>(locations_);
}

NetworkChoice DpTable::decide(const State& s) const {
    if (s.slot > horizon_) return NetworkChoice::Idle;
    std::vector<long> units(size_units_.size(), 0);
    for (std::size_t j = 0; j < units.size(); ++j) {
        if (cfg_->flow_deadlines[j] < s.slot) continue;  // expired, already charged
        units[j] = std::min(size_units_[j], to_units_ceil(s.remaining[j], sigma_));
    }
    return action(s.slot, s.location, units);
}

void DpTable::export_csv(std::ostream& out) const {
    out << "slot,location,remaining,value,action\n";
    const int M = static_cast<int>(size_units_.size());
    std::vector<long> units(M, 0);
    for (int slot = 1; slot <= horizon_; ++slot) {
        std::fill(units.begin(), units.end(), 0L);
        for (std::size_t idx = 0; idx < n_vectors_; ++idx) {
            for (int l = 0; l < locations_; ++l) {
                out << slot << ',' << l << ',';
                for (int j = 0; j < M; ++j) {
                    if (j) out << '|';
                    out << format_g(static_cast<double>(units[j]) * sigma_);
                }
                const std::size_t flat = static_cast<std::size_t>(l) * n_vectors_ + idx;
                out << ',' << format_g(values_[slot - 1][flat]) << ','
                    << choice_name(static_cast<NetworkChoice>(policy_[slot - 1][flat])) << '\n';
            }
            for (int j = 0; j < M; ++j) {
                if (units[j] < size_units_[j]) {
                    ++units[j];
                    break;
                }
                units[j] = 0;
            }
        }
    }
}

DpTable dp_solve(const ScenarioConfig& cfg, const std::vector<double>& transitions,
                 const ExpectedRates& rates, std::size_t state_cap) {
    return DpTable::solve(cfg, transitions, rates, state_cap);
}

int ReachableDpPlanner::first_active(int slot) const {
    const auto& dl = cfg_->flow_deadlines;
    for (std::size_t j = 0; j < dl.size(); ++j)
        if (dl[j] >= slot) return static_cast<int>(j);
    return static_cast<int>(dl.size());
}

ReachableDpPlanner::ReachableDpPlanner(const ScenarioConfig& cfg,
                                       const std::vector<double>& transitions,
                                       const ExpectedRates& rates)
    : cfg_(&cfg),
      horizon_(cfg.horizon()),
      locations_(cfg.cell_count()),
      sigma_(cfg.granularity_sigma) {
    const int M = cfg.flow_count();
    const int L = locations_;
    size_units_.resize(M);
    for (int j = 0; j < M; ++j) size_units_[j] = to_units_ceil(cfg.flow_sizes[j], sigma_);
    suffix_units_.assign(M + 1, 0);
    for (int j = M - 1; j >= 0; --j) suffix_units_[j] = suffix_units_[j + 1] + size_units_[j];

    rmax_.resize(horizon_);
    for (int slot = 1; slot <= horizon_; ++slot) rmax_[slot - 1] = suffix_units_[first_active(slot)];
    policy_.assign(horizon_, std::vector<uint8_t>());

    const auto rows = sparse_rows(transitions, L);
    const double vol_cell = mb_per_slot(rates.cell_mbps, cfg);
    const double vol_wlan = mb_per_slot(rates.wlan_mbps, cfg);
    const double eps_cell = energy_rate(rates.cell_mbps, cfg.energy_model);
    const double eps_wlan = rates.wlan_mbps > 0.0 ? energy_rate(rates.wlan_mbps, cfg.energy_model) : 0.0;

    // Terminal layer: residual penalty for the final-deadline flows.
    const long rmax_T = rmax_[horizon_ - 1];
    std::vector<double> vnext(static_cast<std::size_t>(L) * (rmax_T + 1));
    for (int l = 0; l < L; ++l)
        for (long r = 0; r <= rmax_T; ++r)
            vnext[static_cast<std::size_t>(l) * (rmax_T + 1) + r] =
                cfg.penalty_coeff * sigma_ * static_cast<double>(r);
    long next_levels = rmax_T + 1;

    std::vector<long> b(M), scratch(M);
    for (int slot = horizon_; slot >= 1; --slot) {
        const int j0 = first_active(slot);
        const long rmax_t = rmax_[slot - 1];
        const long levels = rmax_t + 1;

        // Per-R transition table, identical across locations.
        std::vector<double> cost(static_cast<std::size_t>(levels) * 3);
        std::vector<long> rnext(static_cast<std::size_t>(levels) * 3);
        for (long r = 0; r <= rmax_t; ++r) {
            // Waterfall reconstruction: EDF delivers in deadline order, so the
            // reachable vector with total r has later flows still full.
            long delivered_so_far = suffix_units_[j0] - r;
            for (int j = 0; j < M; ++j) {
                if (j < j0) {
                    b[j] = 0;
                    continue;
                }
                const long d = std::min(size_units_[j], delivered_so_far);
                b[j] = size_units_[j] - d;
                delivered_so_far -= d;
            }
            for (int a = 0; a < kNumChoices; ++a) {
                const NetworkChoice n = static_cast<NetworkChoice>(a);
                const double vol = n == NetworkChoice::Cellular ? vol_cell
                                  : n == NetworkChoice::Wlan   ? vol_wlan
                                                               : 0.0;
                const double eps = n == NetworkChoice::Cellular ? eps_cell
                                  : n == NetworkChoice::Wlan   ? eps_wlan
                                                               : 0.0;
                cost[static_cast<std::size_t>(r) * 3 + a] =
                    apply_discrete_slot(cfg, sigma_, slot, n, vol, eps, b, scratch);
                long rn = 0;
                for (int j = j0; j < M; ++j) rn += scratch[j];
                rnext[static_cast<std::size_t>(r) * 3 + a] = std::min(rn, next_levels - 1);
            }
        }

        std::vector<double> vcur(static_cast<std::size_t>(L) * levels);
        std::vector<uint8_t>& pcur = policy_[slot - 1];
        pcur.resize(static_cast<std::size_t>(L) * levels);
        for (int l = 0; l < L; ++l) {
            const bool wlan_ok = cfg.has_ap(l) && rates.wlan_mbps > 0.0;
            for (long r = 0; r <= rmax_t; ++r) {
                double best = std::numeric_limits<double>::infinity();
                uint8_t best_a = 0;
                for (int a = 0; a < kNumChoices; ++a) {
                    if (a == static_cast<int>(NetworkChoice::Wlan) && !wlan_ok) continue;
                    double v = cost[static_cast<std::size_t>(r) * 3 + a];
                    const long rn = rnext[static_cast<std::size_t>(r) * 3 + a];
                    for (const auto& [lp, p] : rows[l])
                        v += p * vnext[static_cast<std::size_t>(lp) * next_levels + rn];
                    if (v < best) {
                        best = v;
                        best_a = static_cast<uint8_t>(a);
                    }
                }
                vcur[static_cast<std::size_t>(l) * levels + r] = best;
                pcur[static_cast<std::size_t>(l) * levels + r] = best_a;
            }
        }
        vnext = std::move(vcur);
        next_levels = levels;
    }

    start_values_.resize(L);
    const long r0 = std::min(suffix_units_[first_active(1)], rmax_[0]);
    for (int l = 0; l < L; ++l)
        start_values_[l] = vnext[static_cast<std::size_t>(l) * (rmax_[0] + 1) + r0];
}

NetworkChoice ReachableDpPlanner::decide(const State& s) const {
    if (s.slot > horizon_) return NetworkChoice::Idle;
    const int j0 = first_active(s.slot);
    long r = 0;
    for (std::size_t j = static_cast<std::size_t>(j0); j < size_units_.size(); ++j)
        r += std::min(size_units_[j], to_units_ceil(s.remaining[j], sigma_));
    r = std::min(r, rmax(s.slot));
    return static_cast<NetworkChoice>(
        policy_[s.slot - 1][static_cast<std::size_t>(s.location) * (rmax(s.slot) + 1) + r]);
}

double ReachableDpPlanner::start_value(int location) const { return start_values_.at(location); }

double ReachableDpPlanner::expected_start_value() const {
    double sum = 0.0;
    for (double v : start_values_) sum += v;
    return sum / static_cast<double>(start_values_.size());
}

DpPolicy::DpPolicy(const ScenarioConfig& cfg, const std::vector<double>& transitions,
                   const ExpectedRates& rates, std::size_t full_grid_cap) {
    // Entry count of the dense table, saturating at the cap.
    long double entries = static_cast<long double>(cfg.horizon() + 1) * cfg.cell_count();
    for (double b : cfg.flow_sizes)
        entries *= static_cast<long double>(to_units_ceil(b, cfg.granularity_sigma)) + 1.0L;
    if (entries <= static_cast<long double>(full_grid_cap)) {
        table_ = std::make_shared<DpTable>(dp_solve(cfg, transitions, rates, full_grid_cap));
    } else {
        planner_ = std::make_shared<ReachableDpPlanner>(cfg, transitions, rates);
    }
}

NetworkChoice DpPolicy::decide(const State& s) const {
    return table_ ? table_->decide(s) : planner_->decide(s);
}

double DpPolicy::expected_start_value() const {
    return table_ ? table_->expected_start_value() : planner_->expected_start_value();
}

}  // namespace offload
