#ifndef SEA_ELMAN_HPP
#define SEA_ELMAN_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sea/errors.hpp"
#include "sea/timeseries.hpp"

namespace sea {

struct ElmanConfig {
    int num_hidden_layers = 1;
    int hidden_nodes_per_layer = 15;
    int input_dim = 7;
    double learning_rate = 0.01;
    int epochs = 200;
    int bptt_depth = 1;
    std::uint64_t seed = 0;
    double gradient_clip_norm = 5.0;

    void validate() const;
};

// Lag/exogenous samples aligned with their targets.
struct SupervisedSequence {
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;

    std::size_t size() const { return targets.size(); }
};

// Hidden activations of every layer; carried between steps as the context.
struct ContextState {
    std::vector<double> h; // layers * nodes, layer-major

    static ContextState zeros(const ElmanConfig& config);
};

// Builds one-step-ahead samples: sample t (t >= lags) has input
// [y_{t-1}, ..., y_{t-lags}, temp_t, solar_t, wind_t] and target y_t.
SupervisedSequence build_supervised(const TimeSeries& component,
                                    const std::vector<ExogenousRecord>& exogenous, int lags);

// Variant over pre-normalized channels (component values and a 3-column
// exogenous matrix aligned with them).
SupervisedSequence build_supervised(const std::vector<double>& component,
                                    const std::vector<std::array<double, 3>>& exogenous,
                                    int lags);

// Stacked Elman recurrent network: each hidden layer has its own context
// units fed back at the next step; tanh hidden activations, linear output.
class ElmanNetwork {
public:
    explicit ElmanNetwork(const ElmanConfig& config);

    const ElmanConfig& config() const { return config_; }

    // Single step from an explicit context; returns the output and writes
    // the new context in place.
    double forward(const std::vector<double>& input, ContextState& state) const;

    // Resets the context, runs the inputs in order, returns the outputs.
    std::vector<double> predict_sequence(const std::vector<std::vector<double>>& inputs) const;

    // SGD on mean squared error, gradients truncated to bptt_depth steps.
    // Context carries across samples within an epoch and resets at epoch
    // start. Returns per-epoch mean squared error.
    std::vector<double> train(const SupervisedSequence& data);

    // Flat parameter access (layer-major: w_in, w_ctx, bias per layer, then
    // w_out, b_out); used by the finite-difference check and serialization.
    std::size_t parameter_count() const { return params_.size(); }
    double parameter(std::size_t i) const { return params_[i]; }
    void set_parameter(std::size_t i, double v) { params_[i] = v; }

    std::string to_json_string() const;
    static ElmanNetwork from_json_string(const std::string& text);

    // Total-loss gradient (sum of squared errors) via backpropagation
    // through time truncated to `depth`, treating each window's entry
    // context as constant. No parameter updates.
    std::vector<double> bptt_gradient(const SupervisedSequence& data, int depth) const;

private:
    struct StepView;
    struct BpttScratch;

    ElmanConfig config_;
    std::vector<double> params_;

    // Offsets into params_ for layer l.
    std::size_t w_in_offset(int layer) const;
    std::size_t w_ctx_offset(int layer) const;
    std::size_t bias_offset(int layer) const;
    std::size_t w_out_offset() const;
    std::size_t b_out_offset() const;
    int layer_input_dim(int layer) const;

    void check_input_dim(std::size_t dim) const;
    void backprop_window(const StepView* steps, int count, double dy, std::vector<double>& grads,
                         BpttScratch& ws) const;
};

// Compares the truncated-BPTT gradient of the total loss against central
// finite differences of the matching frozen-context objective; returns the
// maximum over parameters of |g - g_fd| / max(1e-8, |g| + |g_fd|).
double numerical_gradient_check(const ElmanNetwork& network, const SupervisedSequence& data,
                                double epsilon);

} // namespace sea

#endif // SEA_ELMAN_HPP
