#include "sea/elman.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <nlohmann/json.hpp>

#include "sea/rng.hpp"

namespace sea {

using json = nlohmann::json;

void ElmanConfig::validate() const {
    if (num_hidden_layers < 1) throw ConfigError("num_hidden_layers must be >= 1");
    if (hidden_nodes_per_layer < 1) throw ConfigError("hidden_nodes_per_layer must be >= 1");
    if (input_dim < 1) throw ConfigError("input_dim must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (bptt_depth < 1) throw ConfigError("bptt_depth must be >= 1");
    if (!(gradient_clip_norm > 0.0)) throw ConfigError("gradient_clip_norm must be > 0");
}

ContextState ContextState::zeros(const ElmanConfig& config) {
    ContextState s;
    s.h.assign(static_cast<std::size_t>(config.num_hidden_layers) * config.hidden_nodes_per_layer,
               0.0);
    return s;
}

SupervisedSequence build_supervised(const std::vector<double>& component,
                                    const std::vector<std::array<double, 3>>& exogenous,
                                    int lags) {
    if (lags < 1) throw ConfigError("lags must be >= 1");
    if (component.size() != exogenous.size()) {
        throw LengthMismatch("component (" + std::to_string(component.size()) +
                             ") and exogenous (" + std::to_string(exogenous.size()) +
                             ") differ in length");
    }
    if (component.size() <= static_cast<std::size_t>(lags)) {
        throw TooShort("need more than lags=" + std::to_string(lags) + " values, got " +
                       std::to_string(component.size()));
    }
    SupervisedSequence seq;
    const std::size_t n = component.size();
    seq.inputs.reserve(n - lags);
    seq.targets.reserve(n - lags);
    for (std::size_t t = lags; t < n; ++t) {
        std::vector<double> in(static_cast<std::size_t>(lags) + 3);
        for (int j = 0; j < lags; ++j) in[j] = component[t - 1 - j];
        in[lags + 0] = exogenous[t][0];
        in[lags + 1] = exogenous[t][1];
        in[lags + 2] = exogenous[t][2];
        seq.inputs.push_back(std::move(in));
        seq.targets.push_back(component[t]);
    }
    return seq;
}

SupervisedSequence build_supervised(const TimeSeries& component,
                                    const std::vector<ExogenousRecord>& exogenous, int lags) {
    if (component.size() != exogenous.size()) {
        throw LengthMismatch("component and exogenous differ in length");
    }
    std::vector<std::array<double, 3>> exo(exogenous.size());
    for (std::size_t i = 0; i < exogenous.size(); ++i) {
        exo[i] = {exogenous[i].ambient_temperature_c, exogenous[i].solar_radiation_wm2,
                  exogenous[i].wind_speed_ms};
    }
    return build_supervised(component.values(), exo, lags);
}

// --- parameter layout -------------------------------------------------

int ElmanNetwork::layer_input_dim(int layer) const {
    return layer == 0 ? config_.input_dim : config_.hidden_nodes_per_layer;
}

std::size_t ElmanNetwork::w_in_offset(int layer) const {
    const std::size_t h = config_.hidden_nodes_per_layer;
    std::size_t off = 0;
    for (int l = 0; l < layer; ++l) {
        off += h * layer_input_dim(l) + h * h + h;
    }
    return off;
}

std::size_t ElmanNetwork::w_ctx_offset(int layer) const {
    return w_in_offset(layer) +
           static_cast<std::size_t>(config_.hidden_nodes_per_layer) * layer_input_dim(layer);
}

std::size_t ElmanNetwork::bias_offset(int layer) const {
    const std::size_t h = config_.hidden_nodes_per_layer;
    return w_ctx_offset(layer) + h * h;
}

std::size_t ElmanNetwork::w_out_offset() const {
    return w_in_offset(config_.num_hidden_layers);
}

std::size_t ElmanNetwork::b_out_offset() const {
    return w_out_offset() + config_.hidden_nodes_per_layer;
}

ElmanNetwork::ElmanNetwork(const ElmanConfig& config) : config_(config) {
    config_.validate();
    params_.assign(b_out_offset() + 1, 0.0);

    Rng rng(config_.seed);
    const int h = config_.hidden_nodes_per_layer;
    for (int l = 0; l < config_.num_hidden_layers; ++l) {
        const int in_dim = layer_input_dim(l);
        const double in_scale = 1.0 / std::sqrt(static_cast<double>(in_dim));
        double* w_in = params_.data() + w_in_offset(l);
        for (int i = 0; i < h * in_dim; ++i) w_in[i] = rng.uniform(-in_scale, in_scale);
        const double ctx_scale = 1.0 / std::sqrt(static_cast<double>(h));
        double* w_ctx = params_.data() + w_ctx_offset(l);
        for (int i = 0; i < h * h; ++i) w_ctx[i] = rng.uniform(-ctx_scale, ctx_scale);
        // biases stay zero
    }
    const double out_scale = 1.0 / std::sqrt(static_cast<double>(h));
    double* w_out = params_.data() + w_out_offset();
    for (int i = 0; i < h; ++i) w_out[i] = rng.uniform(-out_scale, out_scale);
}

void ElmanNetwork::check_input_dim(std::size_t dim) const {
    if (dim != static_cast<std::size_t>(config_.input_dim)) {
        throw DimensionMismatch("input dimension " + std::to_string(dim) + " != configured " +
                                std::to_string(config_.input_dim));
    }
}

double ElmanNetwork::forward(const std::vector<double>& input, ContextState& state) const {
    check_input_dim(input.size());
    const int h = config_.hidden_nodes_per_layer;
    const int layers = config_.num_hidden_layers;
    if (state.h.size() != static_cast<std::size_t>(layers) * h) {
        throw DimensionMismatch("context state has wrong shape");
    }

    std::vector<double> buf(h);
    const double* x = input.data();
    int x_dim = config_.input_dim;
    for (int l = 0; l < layers; ++l) {
        const double* w_in = params_.data() + w_in_offset(l);
        const double* w_ctx = params_.data() + w_ctx_offset(l);
        const double* bias = params_.data() + bias_offset(l);
        double* ctx = state.h.data() + static_cast<std::size_t>(l) * h;
        for (int i = 0; i < h; ++i) {
            double a = bias[i];
            const double* wi = w_in + static_cast<std::size_t>(i) * x_dim;
            for (int j = 0; j < x_dim; ++j) a += wi[j] * x[j];
            const double* wc = w_ctx + static_cast<std::size_t>(i) * h;
            for (int j = 0; j < h; ++j) a += wc[j] * ctx[j];
            buf[i] = std::tanh(a);
        }
        std::memcpy(ctx, buf.data(), sizeof(double) * h);
        x = ctx;
        x_dim = h;
    }
    const double* w_out = params_.data() + w_out_offset();
    double y = params_[b_out_offset()];
    const double* top = state.h.data() + static_cast<std::size_t>(layers - 1) * h;
    for (int i = 0; i < h; ++i) y += w_out[i] * top[i];
    return y;
}

std::vector<double> ElmanNetwork::predict_sequence(
    const std::vector<std::vector<double>>& inputs) const {
    ContextState state = ContextState::zeros(config_);
    std::vector<double> out;
    out.reserve(inputs.size());
    for (const auto& in : inputs) out.push_back(forward(in, state));
    return out;
}

// One recorded step of the recurrence: the input it consumed, the hidden
// activations it produced and the context each layer saw at entry.
struct ElmanNetwork::StepView {
    const double* input;
    const double* h;
    const double* ctx;
};

struct ElmanNetwork::BpttScratch {
    std::vector<double> delta_ctx;      // layers * nodes, flow into step s-1
    std::vector<double> delta_ctx_next; // layers * nodes, flow from step s+1
    std::vector<double> delta_above;    // nodes, flow into the layer below
    std::vector<double> delta_act;      // nodes

    explicit BpttScratch(const ElmanConfig& cfg)
        : delta_ctx(static_cast<std::size_t>(cfg.num_hidden_layers) *
                    cfg.hidden_nodes_per_layer),
          delta_ctx_next(delta_ctx.size()),
          delta_above(cfg.hidden_nodes_per_layer),
          delta_act(cfg.hidden_nodes_per_layer) {}
};

// Backpropagates one sample's squared-error gradient through the window
// steps[0..count-1] (oldest first; steps[count-1] produced the output).
// The context at entry to steps[0] is treated as constant.
void ElmanNetwork::backprop_window(const StepView* steps, int count, double dy,
                                   std::vector<double>& grads, BpttScratch& ws) const {
    const int h = config_.hidden_nodes_per_layer;
    const int layers = config_.num_hidden_layers;
    const double* w_out = params_.data() + w_out_offset();

    // Output layer.
    const double* h_top = steps[count - 1].h + static_cast<std::size_t>(layers - 1) * h;
    double* g_w_out = grads.data() + w_out_offset();
    for (int i = 0; i < h; ++i) g_w_out[i] += dy * h_top[i];
    grads[b_out_offset()] += dy;

    std::fill(ws.delta_ctx_next.begin(), ws.delta_ctx_next.end(), 0.0);

    for (int s = count - 1; s >= 0; --s) {
        const StepView& step = steps[s];
        const bool need_time_flow = s > 0;
        std::fill(ws.delta_ctx.begin(), ws.delta_ctx.end(), 0.0);

        for (int l = layers - 1; l >= 0; --l) {
            const double* h_l = step.h + static_cast<std::size_t>(l) * h;
            const double* ctx_l = step.ctx + static_cast<std::size_t>(l) * h;
            const int x_dim = layer_input_dim(l);
            const double* x = l == 0 ? step.input : step.h + static_cast<std::size_t>(l - 1) * h;

            // Gradient into this layer's activations.
            for (int i = 0; i < h; ++i) {
                double d = ws.delta_ctx_next[static_cast<std::size_t>(l) * h + i];
                if (s == count - 1 && l == layers - 1) d += dy * w_out[i];
                if (l < layers - 1) d += ws.delta_above[i];
                ws.delta_act[i] = d * (1.0 - h_l[i] * h_l[i]);
            }

            double* g_w_in = grads.data() + w_in_offset(l);
            double* g_w_ctx = grads.data() + w_ctx_offset(l);
            double* g_bias = grads.data() + bias_offset(l);
            for (int i = 0; i < h; ++i) {
                const double da = ws.delta_act[i];
                if (da == 0.0) continue;
                g_bias[i] += da;
                double* gwi = g_w_in + static_cast<std::size_t>(i) * x_dim;
                for (int j = 0; j < x_dim; ++j) gwi[j] += da * x[j];
                double* gwc = g_w_ctx + static_cast<std::size_t>(i) * h;
                for (int j = 0; j < h; ++j) gwc[j] += da * ctx_l[j];
            }

            // Flow to the layer below (same step) through the input weights.
            if (l > 0) {
                const double* w_in = params_.data() + w_in_offset(l);
                std::fill(ws.delta_above.begin(), ws.delta_above.end(), 0.0);
                for (int i = 0; i < h; ++i) {
                    const double da = ws.delta_act[i];
                    if (da == 0.0) continue;
                    const double* wi = w_in + static_cast<std::size_t>(i) * x_dim;
                    for (int j = 0; j < x_dim; ++j) ws.delta_above[j] += da * wi[j];
                }
            }

            // Flow to the previous step (same layer) through the context weights.
            if (need_time_flow) {
                const double* w_ctx = params_.data() + w_ctx_offset(l);
                double* dst = ws.delta_ctx.data() + static_cast<std::size_t>(l) * h;
                for (int i = 0; i < h; ++i) {
                    const double da = ws.delta_act[i];
                    if (da == 0.0) continue;
                    const double* wc = w_ctx + static_cast<std::size_t>(i) * h;
                    for (int j = 0; j < h; ++j) dst[j] += da * wc[j];
                }
            }
        }
        std::swap(ws.delta_ctx, ws.delta_ctx_next);
    }
}

std::vector<double> ElmanNetwork::train(const SupervisedSequence& data) {
    if (data.size() == 0) throw TooShort("empty supervised sequence");
    for (const auto& in : data.inputs) check_input_dim(in.size());

    const int h = config_.hidden_nodes_per_layer;
    const int layers = config_.num_hidden_layers;
    const int depth = config_.bptt_depth;
    const std::size_t n = data.size();
    const std::size_t state_len = static_cast<std::size_t>(layers) * h;

    // Ring buffer of the last `depth` step records.
    std::vector<std::vector<double>> rec_h(depth, std::vector<double>(state_len));
    std::vector<std::vector<double>> rec_ctx(depth, std::vector<double>(state_len));
    std::vector<int> rec_sample(depth, -1);

    std::vector<double> grads(params_.size());
    std::vector<StepView> window(depth);
    BpttScratch ws(config_);
    const double clip = config_.gradient_clip_norm;
    const double lr = config_.learning_rate;

    std::vector<double> history;
    history.reserve(config_.epochs);

    for (int epoch = 0; epoch < config_.epochs; ++epoch) {
        ContextState state = ContextState::zeros(config_);
        std::fill(rec_sample.begin(), rec_sample.end(), -1);
        double sse = 0.0;

        for (std::size_t t = 0; t < n; ++t) {
            const int slot = static_cast<int>(t % depth);
            rec_ctx[slot] = state.h;
            const double y = forward(data.inputs[t], state);
            rec_h[slot] = state.h;
            rec_sample[slot] = static_cast<int>(t);

            const double err = y - data.targets[t];
            sse += err * err;

            const int s0 =
                static_cast<int>(t) - depth + 1 > 0 ? static_cast<int>(t) - depth + 1 : 0;
            const int count = static_cast<int>(t) - s0 + 1;
            for (int k = 0; k < count; ++k) {
                const int s = s0 + k;
                const int sslot = s % depth;
                window[k] = StepView{data.inputs[s].data(), rec_h[sslot].data(),
                                     rec_ctx[sslot].data()};
            }

            std::fill(grads.begin(), grads.end(), 0.0);
            backprop_window(window.data(), count, 2.0 * err, grads, ws);

            double norm_sq = 0.0;
            for (double g : grads) norm_sq += g * g;
            double scale = lr;
            if (norm_sq > clip * clip) scale = lr * clip / std::sqrt(norm_sq);
            for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= scale * grads[i];
        }

        const double mse = sse / static_cast<double>(n);
        if (!std::isfinite(mse)) {
            throw NumericalDivergence("loss became non-finite at epoch " +
                                      std::to_string(epoch) + " (learning_rate " +
                                      std::to_string(lr) + ")");
        }
        history.push_back(mse);
    }
    return history;
}

std::vector<double> ElmanNetwork::bptt_gradient(const SupervisedSequence& data, int depth) const {
    if (data.size() == 0) throw TooShort("empty supervised sequence");
    if (depth < 1) throw ConfigError("depth must be >= 1");
    const std::size_t n = data.size();
    const std::size_t state_len =
        static_cast<std::size_t>(config_.num_hidden_layers) * config_.hidden_nodes_per_layer;

    std::vector<std::vector<double>> rec_h(n, std::vector<double>(state_len));
    std::vector<std::vector<double>> rec_ctx(n, std::vector<double>(state_len));
    std::vector<double> outputs(n);

    ContextState state = ContextState::zeros(config_);
    for (std::size_t t = 0; t < n; ++t) {
        rec_ctx[t] = state.h;
        outputs[t] = forward(data.inputs[t], state);
        rec_h[t] = state.h;
    }

    std::vector<double> grads(params_.size(), 0.0);
    std::vector<StepView> window(std::min<std::size_t>(depth, n));
    BpttScratch ws(config_);

    for (std::size_t t = 0; t < n; ++t) {
        const int s0 = static_cast<int>(t) - depth + 1 > 0 ? static_cast<int>(t) - depth + 1 : 0;
        const int count = static_cast<int>(t) - s0 + 1;
        for (int k = 0; k < count; ++k) {
            const int s = s0 + k;
            window[k] = StepView{data.inputs[s].data(), rec_h[s].data(), rec_ctx[s].data()};
        }
        backprop_window(window.data(), count, 2.0 * (outputs[t] - data.targets[t]), grads, ws);
    }
    return grads;
}

double numerical_gradient_check(const ElmanNetwork& network, const SupervisedSequence& data,
                                double epsilon) {
    const ElmanConfig& cfg = network.config();
    const int depth = cfg.bptt_depth;
    const std::size_t n = data.size();
    if (n == 0) throw TooShort("empty supervised sequence");

    // Reference context trajectory, frozen for the finite-difference pass.
    std::vector<std::vector<double>> ref_ctx(n);
    {
        ContextState state = ContextState::zeros(cfg);
        for (std::size_t t = 0; t < n; ++t) {
            ref_ctx[t] = state.h;
            network.forward(data.inputs[t], state);
        }
    }

    const std::vector<double> analytic = network.bptt_gradient(data, depth);

    // Loss with every sample's window re-unrolled from the frozen entry
    // context; matches the truncation the analytic gradient uses.
    auto frozen_loss = [&](const ElmanNetwork& net) {
        double loss = 0.0;
        ContextState state = ContextState::zeros(cfg);
        for (std::size_t t = 0; t < n; ++t) {
            const std::size_t s0 =
                t + 1 > static_cast<std::size_t>(depth) ? t + 1 - depth : 0;
            state.h = ref_ctx[s0];
            double y = 0.0;
            for (std::size_t s = s0; s <= t; ++s) y = net.forward(data.inputs[s], state);
            const double err = y - data.targets[t];
            loss += err * err;
        }
        return loss;
    };

    ElmanNetwork probe = network;
    double max_rel = 0.0;
    for (std::size_t i = 0; i < probe.parameter_count(); ++i) {
        const double orig = probe.parameter(i);
        probe.set_parameter(i, orig + epsilon);
        const double up = frozen_loss(probe);
        probe.set_parameter(i, orig - epsilon);
        const double down = frozen_loss(probe);
        probe.set_parameter(i, orig);

        const double fd = (up - down) / (2.0 * epsilon);
        const double g = analytic[i];
        const double rel = std::abs(g - fd) / std::max(1e-8, std::abs(g) + std::abs(fd));
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

// --- serialization ----------------------------------------------------

std::string ElmanNetwork::to_json_string() const {
    json j;
    j["config"] = {{"num_hidden_layers", config_.num_hidden_layers},
                   {"hidden_nodes_per_layer", config_.hidden_nodes_per_layer},
                   {"input_dim", config_.input_dim},
                   {"learning_rate", config_.learning_rate},
                   {"epochs", config_.epochs},
                   {"bptt_depth", config_.bptt_depth},
                   {"seed", config_.seed},
                   {"gradient_clip_norm", config_.gradient_clip_norm}};
    const int h = config_.hidden_nodes_per_layer;
    json layers = json::array();
    for (int l = 0; l < config_.num_hidden_layers; ++l) {
        const int in_dim = layer_input_dim(l);
        json layer;
        layer["w_in"] = {{"rows", h},
                         {"cols", in_dim},
                         {"data", std::vector<double>(params_.begin() + w_in_offset(l),
                                                      params_.begin() + w_in_offset(l) +
                                                          static_cast<std::size_t>(h) * in_dim)}};
        layer["w_ctx"] = {{"rows", h},
                          {"cols", h},
                          {"data", std::vector<double>(params_.begin() + w_ctx_offset(l),
                                                       params_.begin() + w_ctx_offset(l) +
                                                           static_cast<std::size_t>(h) * h)}};
        layer["bias"] = std::vector<double>(params_.begin() + bias_offset(l),
                                            params_.begin() + bias_offset(l) + h);
        layers.push_back(std::move(layer));
    }
    j["layers"] = std::move(layers);
    j["w_out"] = std::vector<double>(params_.begin() + w_out_offset(),
                                     params_.begin() + w_out_offset() + h);
    j["b_out"] = params_[b_out_offset()];
    return j.dump(2);
}

ElmanNetwork ElmanNetwork::from_json_string(const std::string& text) {
    json j = json::parse(text);
    ElmanConfig cfg;
    const json& c = j.at("config");
    cfg.num_hidden_layers = c.at("num_hidden_layers").get<int>();
    cfg.hidden_nodes_per_layer = c.at("hidden_nodes_per_layer").get<int>();
    cfg.input_dim = c.at("input_dim").get<int>();
    cfg.learning_rate = c.at("learning_rate").get<double>();
    cfg.epochs = c.at("epochs").get<int>();
    cfg.bptt_depth = c.at("bptt_depth").get<int>();
    cfg.seed = c.at("seed").get<std::uint64_t>();
    cfg.gradient_clip_norm = c.at("gradient_clip_norm").get<double>();

    ElmanNetwork net(cfg);
    const int h = cfg.hidden_nodes_per_layer;
    const json& layers = j.at("layers");
    if (static_cast<int>(layers.size()) != cfg.num_hidden_layers) {
        throw DimensionMismatch("layer count mismatch in serialized model");
    }
    for (int l = 0; l < cfg.num_hidden_layers; ++l) {
        const json& layer = layers.at(l);
        const int in_dim = net.layer_input_dim(l);
        auto load_matrix = [&](const json& m, std::size_t offset, int rows, int cols) {
            if (m.at("rows").get<int>() != rows || m.at("cols").get<int>() != cols) {
                throw DimensionMismatch("matrix shape mismatch in serialized model");
            }
            const auto data = m.at("data").get<std::vector<double>>();
            if (data.size() != static_cast<std::size_t>(rows) * cols) {
                throw DimensionMismatch("matrix data length mismatch in serialized model");
            }
            std::copy(data.begin(), data.end(), net.params_.begin() + offset);
        };
        load_matrix(layer.at("w_in"), net.w_in_offset(l), h, in_dim);
        load_matrix(layer.at("w_ctx"), net.w_ctx_offset(l), h, h);
        const auto bias = layer.at("bias").get<std::vector<double>>();
        if (bias.size() != static_cast<std::size_t>(h)) {
            throw DimensionMismatch("bias length mismatch in serialized model");
        }
        std::copy(bias.begin(), bias.end(), net.params_.begin() + net.bias_offset(l));
    }
    const auto w_out = j.at("w_out").get<std::vector<double>>();
    if (w_out.size() != static_cast<std::size_t>(h)) {
        throw DimensionMismatch("w_out length mismatch in serialized model");
    }
    std::copy(w_out.begin(), w_out.end(), net.params_.begin() + net.w_out_offset());
    net.params_[net.b_out_offset()] = j.at("b_out").get<double>();
    return net;
}

} // namespace sea
