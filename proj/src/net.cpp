#include "offload/net.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace offload {

std::size_t QNetwork::parameter_count() const {
    std::size_t n = 0;
    for (const auto& w : weights) n += w.size();
    for (const auto& b : biases) n += b.size();
    return n;
}

void GradientSet::zero() {
    for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

void GradientSet::scale(double f) {
    for (auto& w : weights)
        for (double& x : w) x *= f;
    for (auto& b : biases)
        for (double& x : b) x *= f;
}

QNetwork init_network(const std::vector<int>& layer_dims, Rng& rng) {
    if (layer_dims.size() < 2) throw std::invalid_argument("init_network: need at least input and output dims");
    for (int d : layer_dims)
        if (d < 1) throw std::invalid_argument("init_network: all layer dims must be >= 1");
    QNetwork net;
    net.layer_dims = layer_dims;
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const int in = layer_dims[l];
        const int out = layer_dims[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        std::vector<double> w(static_cast<std::size_t>(in) * out);
        for (double& x : w) x = rng.uniform(-bound, bound);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(out, 0.0);
    }
    return net;
}

GradientSet zero_gradients(const QNetwork& net) {
    GradientSet g;
    for (const auto& w : net.weights) g.weights.emplace_back(w.size(), 0.0);
    for (const auto& b : net.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
}

namespace {

// Forward keeping post-activation values per layer: activations[0] is the
// input, activations.back() the linear output layer.
std::vector<std::vector<double>> forward_trace(const QNetwork& net, std::span<const double> input) {
    if (static_cast<int>(input.size()) != net.input_dim())
        throw std::invalid_argument("forward: input length does not match layer_dims[0]");
    std::vector<std::vector<double>> acts;
    acts.reserve(net.weights.size() + 1);
    acts.emplace_back(input.begin(), input.end());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        const int in = net.layer_dims[l];
        const int out = net.layer_dims[l + 1];
        const bool last = (l + 1 == net.weights.size());
        std::vector<double> a(out);
        const double* w = net.weights[l].data();
        const double* x = acts.back().data();
        for (int o = 0; o < out; ++o) {
            double sum = net.biases[l][o];
            const double* row = w + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) sum += row[i] * x[i];
            a[o] = last ? sum : (sum > 0.0 ? sum : 0.0);
        }
        acts.push_back(std::move(a));
    }
    return acts;
}

}  // namespace

std::vector<double> forward(const QNetwork& net, std::span<const double> input) {
    return forward_trace(net, input).back();
}

double backward(const QNetwork& net, std::span<const double> input, int action_index,
                double target, GradientSet& grads) {
    if (action_index < 0 || action_index >= net.output_dim())
        throw std::out_of_range("backward: action index out of range");
    const auto acts = forward_trace(net, input);
    const double residual = target - acts.back()[action_index];
    const double loss = residual * residual;

    // dL/dy_a = -2 (z - y_a); the other output units carry no direct error.
    std::vector<double> delta(net.output_dim(), 0.0);
    delta[action_index] = -2.0 * residual;

    for (std::size_t l = net.weights.size(); l-- > 0;) {
        const int in = net.layer_dims[l];
        const int out = net.layer_dims[l + 1];
        const std::vector<double>& below = acts[l];
        std::vector<double> prev(in, 0.0);
        for (int o = 0; o < out; ++o) {
            const double d = delta[o];
            if (d == 0.0) continue;
            grads.biases[l][o] += d;
            double* gw = grads.weights[l].data() + static_cast<std::size_t>(o) * in;
            const double* w = net.weights[l].data() + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) {
                gw[i] += d * below[i];
                prev[i] += d * w[i];
            }
        }
        if (l == 0) break;
        // ReLU derivative via the stored post-activation values
        for (int i = 0; i < in; ++i)
            if (below[i] <= 0.0) prev[i] = 0.0;
        delta = std::move(prev);
    }
    return loss;
}

void sgd_step(QNetwork& net, const GradientSet& grads, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("sgd_step: alpha must be in (0,1)");
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        double* w = net.weights[l].data();
        const double* g = grads.weights[l].data();
        for (std::size_t i = 0; i < net.weights[l].size(); ++i) w[i] -= alpha * g[i];
        double* b = net.biases[l].data();
        const double* gb = grads.biases[l].data();
        for (std::size_t i = 0; i < net.biases[l].size(); ++i) b[i] -= alpha * gb[i];
    }
    ++net.train_steps;
}

QNetwork clone_parameters(const QNetwork& net) { return net; }

std::string checkpoint_to_string(const QNetwork& net) {
    nlohmann::json j;
    j["layer_dims"] = net.layer_dims;
    j["weights"] = net.weights;
    j["biases"] = net.biases;
    j["train_steps"] = net.train_steps;
    return j.dump();
}

QNetwork checkpoint_from_string(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    QNetwork net;
    net.layer_dims = j.at("layer_dims").get<std::vector<int>>();
    net.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    net.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    net.train_steps = j.at("train_steps").get<uint64_t>();
    if (net.weights.size() + 1 != net.layer_dims.size() || net.biases.size() != net.weights.size())
        throw std::runtime_error("checkpoint: tensor count does not match layer_dims");
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        const std::size_t in = static_cast<std::size_t>(net.layer_dims[l]);
        const std::size_t out = static_cast<std::size_t>(net.layer_dims[l + 1]);
        if (net.weights[l].size() != in * out || net.biases[l].size() != out)
            throw std::runtime_error("checkpoint: tensor shape mismatch at layer " + std::to_string(l));
    }
    return net;
}

void save_checkpoint(const QNetwork& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
    out << checkpoint_to_string(net);
}

QNetwork load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return checkpoint_from_string(buf.str());
}

}  // namespace offload
