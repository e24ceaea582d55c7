#include "offload/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace offload {

using nlohmann::json;

std::string to_string(EnergyModel m) { return m == EnergyModel::F1 ? "f1" : "f2"; }

EnergyModel energy_model_from_string(const std::string& s) {
    if (s == "f1") return EnergyModel::F1;
    if (s == "f2") return EnergyModel::F2;
    throw ConfigError("energy_model: expected \"f1\" or \"f2\", got \"" + s + "\"");
}

bool ScenarioConfig::has_ap(int loc) const {
    return std::find(ap_cells.begin(), ap_cells.end(), loc) != ap_cells.end();
}

namespace {

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw ConfigError(key + ": " + why);
}

void check_positive(const std::string& key, double v) {
    if (!(v > 0.0)) bad_key(key, "must be > 0");
}

void check_bounds(const std::string& lo_key, double lo, const std::string& hi_key, double hi) {
    if (!(lo < hi)) bad_key(lo_key + "/" + hi_key, "lower bound must be strictly below upper bound");
}

}  // namespace

void ScenarioConfig::validate() const {
    if (grid_width < 1) bad_key("grid_width", "must be >= 1");
    if (grid_height < 1) bad_key("grid_height", "must be >= 1");
    const int L = cell_count();
    std::set<int> seen;
    for (int c : ap_cells) {
        if (c < 0 || c >= L) bad_key("ap_cells", "cell index " + std::to_string(c) + " outside [0," + std::to_string(L - 1) + "]");
        if (!seen.insert(c).second) bad_key("ap_cells", "duplicate cell index " + std::to_string(c));
    }
    if (flow_sizes.size() != flow_deadlines.size())
        bad_key("flow_sizes", "length must match flow_deadlines");
    if (flow_sizes.empty()) bad_key("flow_sizes", "at least one flow required");
    for (double b : flow_sizes)
        if (b < 0.0) bad_key("flow_sizes", "sizes must be >= 0");
    for (std::size_t j = 0; j < flow_deadlines.size(); ++j) {
        if (flow_deadlines[j] < 1) bad_key("flow_deadlines", "deadlines must be >= 1");
        if (j > 0 && flow_deadlines[j] < flow_deadlines[j - 1])
            bad_key("flow_deadlines", "must be non-decreasing");
    }
    if (price_cellular < 0.0) bad_key("price_cellular", "must be >= 0");
    if (theta < 0.0) bad_key("theta", "must be >= 0");
    check_positive("slot_seconds", slot_seconds);
    if (!(stay_prob > 0.0 && stay_prob < 1.0) && stay_prob != 1.0)
        bad_key("stay_prob", "must be in (0,1]");
    check_bounds("cell_lo", cell_lo, "cell_hi", cell_hi);
    check_bounds("wlan_lo", wlan_lo, "wlan_hi", wlan_hi);
    check_positive("cell_lo", cell_lo);
    check_positive("wlan_lo", wlan_lo);
    if (cell_std < 0.0) bad_key("cell_std", "must be >= 0");
    if (wlan_std < 0.0) bad_key("wlan_std", "must be >= 0");
    if (penalty_coeff < 0.0) bad_key("penalty_coeff", "must be >= 0");
    check_positive("granularity_sigma", granularity_sigma);
}

void DqnHyper::validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) bad_key("epsilon", "must be in [0,1]");
    if (!(gamma > 0.0 && gamma < 1.0)) bad_key("gamma", "must be in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) bad_key("learning_rate", "must be in (0,1)");
    if (batch_size < 1) bad_key("batch_size", "must be >= 1");
    if (target_sync < 1) bad_key("target_sync", "must be >= 1");
    if (replay_capacity < 1) bad_key("replay_capacity", "must be >= 1");
    if (train_episodes < 0) bad_key("train_episodes", "must be >= 0");
    for (int h : hidden_dims)
        if (h < 1) bad_key("hidden_dims", "layer widths must be >= 1");
}

void RunSettings::validate() const {
    static const std::set<std::string> known = {"dqn", "dp", "dp-noisy", "heuristic", "tabular-q"};
    if (!known.count(algorithm)) bad_key("algorithm", "unknown algorithm \"" + algorithm + "\"");
    for (const auto& a : sweep_algorithms)
        if (!known.count(a)) bad_key("sweep_algorithms", "unknown algorithm \"" + a + "\"");
    if (n_flows < 1) bad_key("n_flows", "must be >= 1");
    if (n_aps < 0) bad_key("n_aps", "must be >= 0");
    if (!(eta >= 0.0 && eta <= 1.0)) bad_key("eta", "must be in [0,1]");
    if (n_seeds < 1) bad_key("n_seeds", "must be >= 1");
    if (n_eval_episodes < 1) bad_key("n_eval_episodes", "must be >= 1");
    if (parallelism < 0) bad_key("parallelism", "must be >= 0");
    hyper.validate();
}

namespace {

template <typename T>
void read_scalar(const json& j, const std::string& key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        bad_key(key, "has the wrong type");
    }
}

template <typename T>
void read_vector(const json& j, const std::string& key, std::vector<T>& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_array()) bad_key(key, "must be an array");
    try {
        out = j.at(key).get<std::vector<T>>();
    } catch (const json::exception&) {
        bad_key(key, "has elements of the wrong type");
    }
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "grid_width", "grid_height", "ap_cells", "flow_sizes", "flow_deadlines",
        "price_cellular", "theta", "slot_seconds", "stay_prob",
        "cell_mean", "cell_std", "cell_lo", "cell_hi",
        "wlan_mean", "wlan_std", "wlan_lo", "wlan_hi",
        "energy_model", "penalty_coeff", "granularity_sigma",
        "algorithm", "n_flows", "n_aps", "eta", "master_seed", "n_seeds",
        "n_eval_episodes", "train_episodes", "epsilon", "gamma", "learning_rate",
        "batch_size", "target_sync", "replay_capacity", "hidden_dims",
        "dp_state_cap", "parallelism",
        "sweep_algorithms", "sweep_flows", "sweep_aps", "sweep_energy_models",
    };
    return keys;
}

FullConfig from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    for (const auto& item : j.items()) {
        if (!known_keys().count(item.key())) bad_key(item.key(), "unknown key");
    }

    FullConfig cfg;
    ScenarioConfig& s = cfg.scenario;
    read_scalar(j, "grid_width", s.grid_width);
    read_scalar(j, "grid_height", s.grid_height);
    read_vector(j, "ap_cells", s.ap_cells);
    read_vector(j, "flow_sizes", s.flow_sizes);
    read_vector(j, "flow_deadlines", s.flow_deadlines);
    read_scalar(j, "price_cellular", s.price_cellular);
    read_scalar(j, "theta", s.theta);
    read_scalar(j, "slot_seconds", s.slot_seconds);
    read_scalar(j, "stay_prob", s.stay_prob);
    read_scalar(j, "cell_mean", s.cell_mean);
    read_scalar(j, "cell_std", s.cell_std);
    read_scalar(j, "cell_lo", s.cell_lo);
    read_scalar(j, "cell_hi", s.cell_hi);
    read_scalar(j, "wlan_mean", s.wlan_mean);
    read_scalar(j, "wlan_std", s.wlan_std);
    read_scalar(j, "wlan_lo", s.wlan_lo);
    read_scalar(j, "wlan_hi", s.wlan_hi);
    if (j.contains("energy_model")) s.energy_model = energy_model_from_string(j.at("energy_model").get<std::string>());
    read_scalar(j, "penalty_coeff", s.penalty_coeff);
    read_scalar(j, "granularity_sigma", s.granularity_sigma);

    RunSettings& r = cfg.run;
    read_scalar(j, "algorithm", r.algorithm);
    read_scalar(j, "n_flows", r.n_flows);
    read_scalar(j, "n_aps", r.n_aps);
    read_scalar(j, "eta", r.eta);
    read_scalar(j, "master_seed", r.master_seed);
    read_scalar(j, "n_seeds", r.n_seeds);
    read_scalar(j, "n_eval_episodes", r.n_eval_episodes);
    read_scalar(j, "train_episodes", r.hyper.train_episodes);
    read_scalar(j, "epsilon", r.hyper.epsilon);
    read_scalar(j, "gamma", r.hyper.gamma);
    read_scalar(j, "learning_rate", r.hyper.alpha);
    read_scalar(j, "batch_size", r.hyper.batch_size);
    read_scalar(j, "target_sync", r.hyper.target_sync);
    read_scalar(j, "replay_capacity", r.hyper.replay_capacity);
    read_vector(j, "hidden_dims", r.hyper.hidden_dims);
    read_scalar(j, "dp_state_cap", r.dp_state_cap);
    read_scalar(j, "parallelism", r.parallelism);
    read_vector(j, "sweep_algorithms", r.sweep_algorithms);
    read_vector(j, "sweep_flows", r.sweep_flows);
    read_vector(j, "sweep_aps", r.sweep_aps);
    read_vector(j, "sweep_energy_models", r.sweep_energy_models);

    cfg.scenario.validate();
    cfg.run.validate();
    return cfg;
}

void apply_env_overrides(json& j) {
    for (const auto& key : known_keys()) {
        std::string env = "OFFLOAD_";
        for (char c : key) env += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        const char* val = std::getenv(env.c_str());
        if (!val) continue;
        json parsed = json::parse(val, nullptr, false);
        if (parsed.is_discarded()) {
            j[key] = std::string(val);  // bare strings need no quoting
        } else {
            j[key] = parsed;
        }
    }
}

}  // namespace

FullConfig parse_config_text(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config: malformed JSON document");
    apply_env_overrides(j);
    return from_json(j);
}

FullConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open \"" + path + "\"");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

FullConfig default_config() { return parse_config_text("{}"); }

std::string serialize_config(const FullConfig& cfg) {
    const ScenarioConfig& s = cfg.scenario;
    const RunSettings& r = cfg.run;
    json j;
    j["grid_width"] = s.grid_width;
    j["grid_height"] = s.grid_height;
    j["ap_cells"] = s.ap_cells;
    j["flow_sizes"] = s.flow_sizes;
    j["flow_deadlines"] = s.flow_deadlines;
    j["price_cellular"] = s.price_cellular;
    j["theta"] = s.theta;
    j["slot_seconds"] = s.slot_seconds;
    j["stay_prob"] = s.stay_prob;
    j["cell_mean"] = s.cell_mean;
    j["cell_std"] = s.cell_std;
    j["cell_lo"] = s.cell_lo;
    j["cell_hi"] = s.cell_hi;
    j["wlan_mean"] = s.wlan_mean;
    j["wlan_std"] = s.wlan_std;
    j["wlan_lo"] = s.wlan_lo;
    j["wlan_hi"] = s.wlan_hi;
    j["energy_model"] = to_string(s.energy_model);
    j["penalty_coeff"] = s.penalty_coeff;
    j["granularity_sigma"] = s.granularity_sigma;
    j["algorithm"] = r.algorithm;
    j["n_flows"] = r.n_flows;
    j["n_aps"] = r.n_aps;
    j["eta"] = r.eta;
    j["master_seed"] = r.master_seed;
    j["n_seeds"] = r.n_seeds;
    j["n_eval_episodes"] = r.n_eval_episodes;
    j["train_episodes"] = r.hyper.train_episodes;
    j["epsilon"] = r.hyper.epsilon;
    j["gamma"] = r.hyper.gamma;
    j["learning_rate"] = r.hyper.alpha;
    j["batch_size"] = r.hyper.batch_size;
    j["target_sync"] = r.hyper.target_sync;
    j["replay_capacity"] = r.hyper.replay_capacity;
    j["hidden_dims"] = r.hyper.hidden_dims;
    j["dp_state_cap"] = r.dp_state_cap;
    j["parallelism"] = r.parallelism;
    j["sweep_algorithms"] = r.sweep_algorithms;
    j["sweep_flows"] = r.sweep_flows;
    j["sweep_aps"] = r.sweep_aps;
    j["sweep_energy_models"] = r.sweep_energy_models;
    return j.dump(2);
}

ScenarioConfig with_flow_prefix(const ScenarioConfig& base, int n_flows) {
    if (n_flows < 1 || n_flows > base.flow_count())
        throw ConfigError("n_flows: must be in [1," + std::to_string(base.flow_count()) + "]");
    ScenarioConfig out = base;
    out.flow_sizes.resize(n_flows);
    out.flow_deadlines.resize(n_flows);
    return out;
}

}  // namespace offload
