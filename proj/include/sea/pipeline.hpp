#ifndef SEA_PIPELINE_HPP
#define SEA_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sea/arima.hpp"
#include "sea/elman.hpp"
#include "sea/errors.hpp"
#include "sea/stl.hpp"
#include "sea/timeseries.hpp"

namespace sea {

enum class SeaVariant { A, B };

// Where the lagged inputs of the seasonal predictors come from: the
// component being predicted (default) or the raw demand series.
enum class LagSource { Component, RawDemand };

struct ModelSpec {
    std::string id;
    bool baseline = false;
    SeaVariant variant = SeaVariant::A;
    int hidden_layers = 1;

    // Accepts "A-1", "A-2", "A-4", "B-1", "B-2", "B-4" and "ENN".
    static ModelSpec parse(const std::string& id);

    // The six A/B models plus the 8-layer ENN baseline.
    static std::vector<ModelSpec> full_grid();
};

struct SeaTrainConfig {
    std::vector<int> periods = {3, 4, 12, 24};
    int lags = 4;
    int hidden_nodes = 15;
    double learning_rate = 0.01;
    int epochs = 200;
    int bptt_depth = 1;
    double gradient_clip_norm = 5.0;
    std::uint64_t seed = 0;
    LagSource lag_source = LagSource::Component;
    std::map<int, StlParams> stl_overrides;
    int arima_max_p = 3;
    int arima_max_d = 1;
    int arima_max_q = 3;
    std::optional<arima::ArimaOrder> arima_fixed_order;
    int baseline_hidden_layers = 8;
};

// One trained predictor with its scaling and the normalized lag window
// that seeds test-time rollout (most recent value first).
struct ComponentPredictor {
    std::string name; // "s3", ..., "seasonal_sum", "demand"
    ElmanNetwork network;
    Normalizer normalizer;
    std::vector<double> initial_lags;
};

struct TrendModel {
    arima::ArimaModel model;
    Normalizer normalizer;
    std::vector<double> history; // normalized training trend
};

struct TrainingMetadata {
    std::uint64_t seed = 0;
    double training_seconds = 0.0;
};

struct SeaModel {
    ModelSpec spec;
    SeaTrainConfig config;
    std::vector<ComponentPredictor> seasonal_predictors;
    std::optional<TrendModel> trend;                // absent for the baseline
    Normalizer temperature_normalizer{0.0, 1.0};
    Normalizer solar_normalizer{0.0, 1.0};
    Normalizer wind_normalizer{0.0, 1.0};
    std::optional<Normalizer> demand_normalizer;    // baseline / raw-demand lags
    HourStamp train_end;                            // last training timestamp
    TrainingMetadata meta;
};

// Per-component prediction streams in MW, aligned with the test range.
// Summing the columns gives the model's prediction.
struct ComponentStreams {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;
};

// Decomposes the training demand, trains the seasonal predictors per the
// spec's structure (A: one network per period; B: one network on the summed
// seasonal), and fits the trend model. Deterministic for a fixed seed.
SeaModel train_sea(const Dataset& train, const ModelSpec& spec, const SeaTrainConfig& config);

// The no-decomposition reference model: one deep network on raw demand.
SeaModel train_baseline_enn(const Dataset& train, const SeaTrainConfig& config);

// Causal one-step-ahead rollout over the test range: lagged inputs roll
// forward on the model's own (normalized) outputs, weather inputs are the
// measured test values, and the trend comes from a horizon-length forecast.
ComponentStreams predict_components(const SeaModel& model, const Dataset& test);
TimeSeries predict(const SeaModel& model, const Dataset& test);

// Elementwise sum of the streams.
TimeSeries compose_prediction(const ComponentStreams& streams, HourStamp start);

// Diagnostic upper bound: lagged inputs are teacher-forced from a full
// train+test decomposition. Not causal; never used for reported metrics.
TimeSeries predict_oracle_lags(const SeaModel& model, const Dataset& train, const Dataset& test);

// Bundle layout: <dir>/manifest.json plus one file per component model.
void save_model(const SeaModel& model, const std::string& dir);
SeaModel load_model(const std::string& dir);

} // namespace sea

#endif // SEA_PIPELINE_HPP
