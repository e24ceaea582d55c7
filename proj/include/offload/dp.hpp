#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "offload/config.hpp"
#include "offload/env.hpp"

namespace offload {

struct DpTooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Expected per-network throughputs the planner assumes (Mbps).
struct ExpectedRates {
    double cell_mbps = 0.0;
    double wlan_mbps = 0.0;
};

ExpectedRates expected_rates(const ScenarioConfig& cfg);

// Row-wise mixture (1-eta) P + eta U with U uniform over {self} + neighbors;
// rows remain stochastic for any eta in [0,1].
std::vector<double> perturb_transitions(const std::vector<double>& matrix,
                                        const ScenarioConfig& cfg, double eta);

// Exact finite-horizon backward induction over the sigma-discretized state
// space (slot, location, remaining vector). Values are undiscounted expected
// costs-to-go; the terminal layer at slot T^M+1 is the residual penalty
// function. Delivered volumes are rounded down to sigma multiples and flows
// are zeroed once their deadline charge is paid.
class DpTable {
public:
    static DpTable solve(const ScenarioConfig& cfg, const std::vector<double>& transitions,
                         const ExpectedRates& rates, std::size_t state_cap);

    double value(int slot, int location, std::span<const long> units) const;
    NetworkChoice action(int slot, int location, std::span<const long> units) const;

    double start_value(int location) const;
    double expected_start_value() const;  // uniform over start locations

    // Greedy action for a live environment state: remaining volumes are
    // ceil-discretized, flows past their deadline treated as zero.
    NetworkChoice decide(const State& s) const;

    int horizon() const { return horizon_; }
    const std::vector<long>& size_units() const { return size_units_; }
    std::size_t entry_count() const;

    // Rows of (slot, location, remaining-vector, value, action).
    void export_csv(std::ostream& out) const;

private:
    DpTable() = default;

    const ScenarioConfig* cfg_ = nullptr;
    int horizon_ = 0;
    int locations_ = 0;
    double sigma_ = 1.0;
    std::vector<long> size_units_;   // B_j in sigma units
    std::vector<long> strides_;
    std::size_t n_vectors_ = 0;
    std::vector<std::vector<double>> values_;    // [slot-1] -> L * n_vectors
    std::vector<std::vector<uint8_t>> policy_;   // [slot-1], slots 1..T

    std::size_t vec_index(std::span<const long> units) const;
};

DpTable dp_solve(const ScenarioConfig& cfg, const std::vector<double>& transitions,
                 const ExpectedRates& rates, std::size_t state_cap);

// Backward induction over the states actually reachable under
// earliest-deadline-first delivery. EDF serves flows in deadline order, so a
// reachable remaining vector is determined by the scalar total remaining of
// the not-yet-expired flows; the induction runs on that axis, which keeps
// the default four-flow scenario tractable. Lookups for off-axis states
// round the total up to the nearest tabulated level.
class ReachableDpPlanner {
public:
    ReachableDpPlanner(const ScenarioConfig& cfg, const std::vector<double>& transitions,
                       const ExpectedRates& rates);

    NetworkChoice decide(const State& s) const;
    double start_value(int location) const;
    double expected_start_value() const;

private:
    const ScenarioConfig* cfg_;
    int horizon_;
    int locations_;
    double sigma_;
    std::vector<long> size_units_;
    std::vector<long> suffix_units_;          // sum of size_units_[j..M)
    std::vector<std::vector<uint8_t>> policy_;  // [slot-1] -> L * (rmax(slot)+1)
    std::vector<long> rmax_;                    // per slot 1..T
    std::vector<double> start_values_;          // V_1 per location

    int first_active(int slot) const;
    long rmax(int slot) const { return rmax_[slot - 1]; }
};

// Picks the exact table when the full grid fits under the cap, otherwise the
// reachable-set planner.
class DpPolicy {
public:
    DpPolicy(const ScenarioConfig& cfg, const std::vector<double>& transitions,
             const ExpectedRates& rates, std::size_t full_grid_cap);

    NetworkChoice decide(const State& s) const;
    double expected_start_value() const;
    bool used_full_grid() const { return table_ != nullptr; }

private:
    std::shared_ptr<DpTable> table_;
    std::shared_ptr<ReachableDpPlanner> planner_;
};

}  // namespace offload
