#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace offload {

enum class EnergyModel { F1, F2 };

std::string to_string(EnergyModel m);
EnergyModel energy_model_from_string(const std::string& s);

// Raised by config parsing/validation; the message names the offending key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Simulation scenario. Defaults reproduce the 4x4-grid setup: four flows of
// 400/600/800/1000 MB with deadlines 400/800/1200/1600 slots, cellular at
// 1.5 yen/MB, truncated-normal throughputs, and a 0.6 stay probability.
struct ScenarioConfig {
    int grid_width = 4;
    int grid_height = 4;
    std::vector<int> ap_cells = {0, 2, 5, 7, 8, 10, 13, 15};
    std::vector<double> flow_sizes = {400.0, 600.0, 800.0, 1000.0};  // MB
    std::vector<int> flow_deadlines = {400, 800, 1200, 1600};        // slots
    double price_cellular = 1.5;   // yen per MB
    double theta = 1.0;            // energy preference weight
    double slot_seconds = 10.0;
    double stay_prob = 0.6;
    double cell_mean = 10.0, cell_std = 5.0, cell_lo = 5.0, cell_hi = 15.0;  // Mbps
    double wlan_mean = 15.0, wlan_std = 6.0, wlan_lo = 9.0, wlan_hi = 21.0;  // Mbps
    EnergyModel energy_model = EnergyModel::F1;
    double penalty_coeff = 2.0;       // yen per residual MB
    double granularity_sigma = 1.0;   // MB, discretization unit for DP/tabular

    int cell_count() const { return grid_width * grid_height; }
    int flow_count() const { return static_cast<int>(flow_sizes.size()); }
    int horizon() const { return flow_deadlines.empty() ? 0 : flow_deadlines.back(); }
    bool has_ap(int loc) const;

    void validate() const;  // throws ConfigError naming the first bad key
};

// DQN hyperparameters (epsilon per the simulation setup, gamma in (0,1)).
struct DqnHyper {
    double epsilon = 0.08;
    double gamma = 0.99;
    double alpha = 1e-3;
    int batch_size = 32;
    int target_sync = 100;
    std::size_t replay_capacity = 10000;
    int train_episodes = 10;
    std::vector<int> hidden_dims = {64, 64};

    void validate() const;
};

// Run-level knobs shared by the CLI and the experiment harness.
struct RunSettings {
    std::string algorithm = "dqn";
    int n_flows = 4;
    int n_aps = 8;
    double eta = 0.3;  // transition-noise mix for dp-noisy
    uint64_t master_seed = 1;
    int n_seeds = 10;
    int n_eval_episodes = 20;
    DqnHyper hyper;
    std::size_t dp_state_cap = 20'000'000;
    int parallelism = 0;  // 0 = hardware concurrency
    std::vector<std::string> sweep_algorithms;
    std::vector<int> sweep_flows;
    std::vector<int> sweep_aps;
    std::vector<std::string> sweep_energy_models;

    void validate() const;
};

struct FullConfig {
    ScenarioConfig scenario;
    RunSettings run;
};

// Parses the flat JSON document at `path`. Missing keys fall back to the
// defaults above; unknown keys and out-of-range values raise ConfigError with
// the key named. Environment variables OFFLOAD_<UPPERCASE_KEY> override file
// values and are parsed as JSON fragments.
FullConfig parse_config(const std::string& path);
FullConfig parse_config_text(const std::string& json_text);
FullConfig default_config();

std::string serialize_config(const FullConfig& cfg);

// Keeps the first n flows and redraws AP placement; used by sweep overrides.
ScenarioConfig with_flow_prefix(const ScenarioConfig& base, int n_flows);

}  // namespace offload
