#include "sea/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

namespace sea {

using json = nlohmann::json;
namespace fs = std::filesystem;

ModelSpec ModelSpec::parse(const std::string& id) {
    ModelSpec spec;
    spec.id = id;
    if (id == "ENN") {
        spec.baseline = true;
        spec.hidden_layers = 8;
        return spec;
    }
    if (id.size() == 3 && (id[0] == 'A' || id[0] == 'B') && id[1] == '-' &&
        (id[2] == '1' || id[2] == '2' || id[2] == '4')) {
        spec.variant = id[0] == 'A' ? SeaVariant::A : SeaVariant::B;
        spec.hidden_layers = id[2] - '0';
        return spec;
    }
    throw ConfigError("unknown model id '" + id + "' (expected A-1/A-2/A-4/B-1/B-2/B-4/ENN)");
}

std::vector<ModelSpec> ModelSpec::full_grid() {
    std::vector<ModelSpec> specs;
    for (const char* id : {"A-1", "B-1", "A-2", "B-2", "A-4", "B-4", "ENN"}) {
        specs.push_back(parse(id));
    }
    return specs;
}

namespace {

std::vector<std::array<double, 3>> normalized_exogenous(const std::vector<ExogenousRecord>& exo,
                                                        const Normalizer& temp,
                                                        const Normalizer& solar,
                                                        const Normalizer& wind) {
    std::vector<std::array<double, 3>> out(exo.size());
    for (std::size_t i = 0; i < exo.size(); ++i) {
        out[i] = {temp.normalize(exo[i].ambient_temperature_c),
                  solar.normalize(exo[i].solar_radiation_wm2),
                  wind.normalize(exo[i].wind_speed_ms)};
    }
    return out;
}

// Like build_supervised, but the lagged inputs may come from a different
// (aligned) series than the targets.
SupervisedSequence build_supervised_mixed(const std::vector<double>& lag_series,
                                          const std::vector<double>& targets,
                                          const std::vector<std::array<double, 3>>& exo,
                                          int lags) {
    if (lag_series.size() != targets.size() || lag_series.size() != exo.size()) {
        throw LengthMismatch("lag source, targets and exogenous must align");
    }
    if (lag_series.size() <= static_cast<std::size_t>(lags)) {
        throw TooShort("need more than lags=" + std::to_string(lags) + " values");
    }
    SupervisedSequence seq;
    const std::size_t n = targets.size();
    seq.inputs.reserve(n - lags);
    seq.targets.reserve(n - lags);
    for (std::size_t t = lags; t < n; ++t) {
        std::vector<double> in(static_cast<std::size_t>(lags) + 3);
        for (int j = 0; j < lags; ++j) in[j] = lag_series[t - 1 - j];
        in[lags + 0] = exo[t][0];
        in[lags + 1] = exo[t][1];
        in[lags + 2] = exo[t][2];
        seq.inputs.push_back(std::move(in));
        seq.targets.push_back(targets[t]);
    }
    return seq;
}

std::vector<double> tail_reversed(const std::vector<double>& v, int count) {
    std::vector<double> out(count);
    for (int j = 0; j < count; ++j) out[j] = v[v.size() - 1 - j];
    return out;
}

ComponentPredictor train_predictor(const std::string& name, const std::vector<double>& component,
                                   const std::vector<double>* lag_series,
                                   const std::vector<std::array<double, 3>>& nexo,
                                   const SeaTrainConfig& config, int hidden_layers,
                                   std::uint64_t seed) {
    Normalizer norm = Normalizer::fit(component);
    const std::vector<double> ntarget = norm.normalize(component);
    const std::vector<double>& nlags = lag_series != nullptr ? *lag_series : ntarget;

    ElmanConfig net_cfg;
    net_cfg.num_hidden_layers = hidden_layers;
    net_cfg.hidden_nodes_per_layer = config.hidden_nodes;
    net_cfg.input_dim = config.lags + 3;
    net_cfg.learning_rate = config.learning_rate;
    net_cfg.epochs = config.epochs;
    net_cfg.bptt_depth = config.bptt_depth;
    net_cfg.gradient_clip_norm = config.gradient_clip_norm;
    net_cfg.seed = seed;

    ElmanNetwork net(net_cfg);
    const SupervisedSequence data = build_supervised_mixed(nlags, ntarget, nexo, config.lags);
    net.train(data);

    return ComponentPredictor{name, std::move(net), norm, tail_reversed(nlags, config.lags)};
}

void validate_train_input(const Dataset& train, const SeaTrainConfig& config) {
    if (train.size() < 240) {
        throw TooShort("training set must cover at least 240 hours, got " +
                       std::to_string(train.size()));
    }
    if (config.lags < 1) throw ConfigError("lags must be >= 1");
}

} // namespace

SeaModel train_baseline_enn(const Dataset& train, const SeaTrainConfig& config) {
    validate_train_input(train, config);
    const auto t0 = std::chrono::steady_clock::now();

    SeaModel model;
    model.spec = ModelSpec::parse("ENN");
    model.spec.hidden_layers = config.baseline_hidden_layers;
    model.config = config;
    model.train_end = train.demand().end();
    model.meta.seed = config.seed;

    try {
        model.temperature_normalizer = Normalizer::fit([&] {
            std::vector<double> v(train.size());
            for (std::size_t i = 0; i < train.size(); ++i) {
                v[i] = train.exogenous()[i].ambient_temperature_c;
            }
            return v;
        }());
        model.solar_normalizer = Normalizer::fit([&] {
            std::vector<double> v(train.size());
            for (std::size_t i = 0; i < train.size(); ++i) {
                v[i] = train.exogenous()[i].solar_radiation_wm2;
            }
            return v;
        }());
        model.wind_normalizer = Normalizer::fit([&] {
            std::vector<double> v(train.size());
            for (std::size_t i = 0; i < train.size(); ++i) {
                v[i] = train.exogenous()[i].wind_speed_ms;
            }
            return v;
        }());
        const auto nexo =
            normalized_exogenous(train.exogenous(), model.temperature_normalizer,
                                 model.solar_normalizer, model.wind_normalizer);
        model.demand_normalizer = Normalizer::fit(train.demand().values());
        model.seasonal_predictors.push_back(
            train_predictor("demand", train.demand().values(), nullptr, nexo, config,
                            config.baseline_hidden_layers, config.seed));
    } catch (const Error& e) {
        throw TrainingError(std::string("baseline ENN: ") + e.what());
    }

    model.meta.training_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return model;
}

SeaModel train_sea(const Dataset& train, const ModelSpec& spec, const SeaTrainConfig& config) {
    if (spec.baseline) return train_baseline_enn(train, config);
    validate_train_input(train, config);
    const auto t0 = std::chrono::steady_clock::now();

    SeaModel model;
    model.spec = spec;
    model.config = config;
    model.train_end = train.demand().end();
    model.meta.seed = config.seed;

    CascadeDecomposition cascade = [&] {
        try {
            return cascade_decompose(train.demand(), config.periods, config.stl_overrides);
        } catch (const Error& e) {
            throw DecompositionError(std::string("cascade decomposition: ") + e.what());
        }
    }();

    try {
        std::vector<double> temp(train.size()), solar(train.size()), wind(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) {
            temp[i] = train.exogenous()[i].ambient_temperature_c;
            solar[i] = train.exogenous()[i].solar_radiation_wm2;
            wind[i] = train.exogenous()[i].wind_speed_ms;
        }
        model.temperature_normalizer = Normalizer::fit(temp);
        model.solar_normalizer = Normalizer::fit(solar);
        model.wind_normalizer = Normalizer::fit(wind);
        const auto nexo =
            normalized_exogenous(train.exogenous(), model.temperature_normalizer,
                                 model.solar_normalizer, model.wind_normalizer);

        std::optional<std::vector<double>> raw_lags;
        if (config.lag_source == LagSource::RawDemand) {
            model.demand_normalizer = Normalizer::fit(train.demand().values());
            raw_lags = model.demand_normalizer->normalize(train.demand().values());
        }
        const std::vector<double>* lag_ptr = raw_lags ? &*raw_lags : nullptr;

        if (spec.variant == SeaVariant::A) {
            for (int period : config.periods) {
                model.seasonal_predictors.push_back(train_predictor(
                    "s" + std::to_string(period), cascade.seasonal(period).values(), lag_ptr,
                    nexo, config, spec.hidden_layers,
                    config.seed + static_cast<std::uint64_t>(period)));
            }
        } else {
            std::vector<double> summed(train.size(), 0.0);
            for (int period : config.periods) {
                const auto& s = cascade.seasonal(period).values();
                for (std::size_t i = 0; i < summed.size(); ++i) summed[i] += s[i];
            }
            model.seasonal_predictors.push_back(train_predictor("seasonal_sum", summed, lag_ptr,
                                                                nexo, config, spec.hidden_layers,
                                                                config.seed));
        }
    } catch (const DecompositionError&) {
        throw;
    } catch (const Error& e) {
        throw TrainingError("model " + spec.id + ": " + e.what());
    }

    try {
        TrendModel trend{arima::ArimaModel{}, Normalizer::fit(cascade.trend.values()), {}};
        trend.history = trend.normalizer.normalize(cascade.trend.values());
        arima::FitOptions fit_opts;
        fit_opts.max_p = config.arima_max_p;
        fit_opts.max_d = config.arima_max_d;
        fit_opts.max_q = config.arima_max_q;
        const arima::ArimaOrder order =
            config.arima_fixed_order
                ? *config.arima_fixed_order
                : arima::select_order(trend.history, config.arima_max_p, config.arima_max_d,
                                      config.arima_max_q, fit_opts);
        if (config.arima_fixed_order) {
            fit_opts.max_p = std::max(fit_opts.max_p, order.p);
            fit_opts.max_d = std::max(fit_opts.max_d, order.d);
            fit_opts.max_q = std::max(fit_opts.max_q, order.q);
        }
        trend.model = arima::fit(trend.history, order, fit_opts);
        model.trend = std::move(trend);
    } catch (const Error& e) {
        throw FitError("model " + spec.id + " trend: " + e.what());
    }

    model.meta.training_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return model;
}

namespace {

// Shared rollout core. When `forced_lags` is non-null it supplies, per
// predictor, the full normalized lag source across the test range
// (teacher forcing); otherwise lags roll on the model's own outputs.
ComponentStreams roll_forward(const SeaModel& model, const Dataset& test,
                              const std::vector<std::vector<double>>* forced_lags) {
    if (test.demand().start() != model.train_end + 1) {
        throw AlignmentError("test data starts at " + test.demand().start().to_string() +
                             " but training ended at " + model.train_end.to_string());
    }
    const std::size_t horizon = test.size();
    const int lags = model.config.lags;
    const auto nexo = normalized_exogenous(test.exogenous(), model.temperature_normalizer,
                                           model.solar_normalizer, model.wind_normalizer);

    ComponentStreams streams;
    const std::size_t n_pred = model.seasonal_predictors.size();

    std::vector<std::vector<double>> windows; // most recent first
    std::vector<ContextState> states;
    for (const auto& predictor : model.seasonal_predictors) {
        windows.push_back(predictor.initial_lags);
        states.push_back(ContextState::zeros(predictor.network.config()));
        streams.names.push_back(predictor.name);
        streams.values.emplace_back(horizon);
    }

    std::vector<double> trend_mw;
    if (model.trend) {
        trend_mw = model.trend->normalizer.denormalize(
            arima::forecast(model.trend->model, model.trend->history,
                            static_cast<int>(horizon)));
    }

    const bool shared_raw = model.config.lag_source == LagSource::RawDemand &&
                            !model.spec.baseline && forced_lags == nullptr;

    std::vector<double> input(static_cast<std::size_t>(lags) + 3);
    for (std::size_t t = 0; t < horizon; ++t) {
        double total_mw = model.trend ? trend_mw[t] : 0.0;
        for (std::size_t k = 0; k < n_pred; ++k) {
            const auto& predictor = model.seasonal_predictors[k];
            const std::vector<double>& window = windows[k];
            for (int j = 0; j < lags; ++j) input[j] = window[j];
            input[lags + 0] = nexo[t][0];
            input[lags + 1] = nexo[t][1];
            input[lags + 2] = nexo[t][2];
            const double y = predictor.network.forward(input, states[k]);
            streams.values[k][t] = predictor.normalizer.denormalize(y);
            total_mw += streams.values[k][t];

            if (forced_lags != nullptr) {
                // Teacher forcing: shift in the true normalized value.
                auto& w = windows[k];
                for (int j = lags - 1; j > 0; --j) w[j] = w[j - 1];
                w[0] = (*forced_lags)[k][t];
            } else if (!shared_raw) {
                auto& w = windows[k];
                for (int j = lags - 1; j > 0; --j) w[j] = w[j - 1];
                w[0] = y;
            }
        }
        if (shared_raw) {
            // All predictors share lag windows fed by the summed prediction.
            const double nraw = model.demand_normalizer->normalize(total_mw);
            for (auto& w : windows) {
                for (int j = lags - 1; j > 0; --j) w[j] = w[j - 1];
                w[0] = nraw;
            }
        }
    }

    if (model.trend) {
        streams.names.push_back("trend");
        streams.values.push_back(std::move(trend_mw));
    }
    return streams;
}

} // namespace

ComponentStreams predict_components(const SeaModel& model, const Dataset& test) {
    return roll_forward(model, test, nullptr);
}

TimeSeries compose_prediction(const ComponentStreams& streams, HourStamp start) {
    if (streams.values.empty()) throw TooShort("no component streams to compose");
    std::vector<double> sum(streams.values.front().size(), 0.0);
    for (const auto& column : streams.values) {
        if (column.size() != sum.size()) {
            throw LengthMismatch("component streams differ in length");
        }
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += column[i];
    }
    return TimeSeries(start, std::move(sum), "prediction_mw");
}

TimeSeries predict(const SeaModel& model, const Dataset& test) {
    return compose_prediction(predict_components(model, test), test.demand().start());
}

TimeSeries predict_oracle_lags(const SeaModel& model, const Dataset& train,
                               const Dataset& test) {
    if (train.demand().end() != model.train_end) {
        throw AlignmentError("supplied training data does not match the model's range");
    }
    // Non-causal diagnostic: decompose train+test jointly and feed the true
    // normalized component values as lags.
    std::vector<double> full = train.demand().values();
    full.insert(full.end(), test.demand().values().begin(), test.demand().values().end());
    TimeSeries full_series(train.demand().start(), std::move(full), "full");

    const std::size_t n_train = train.size();
    const std::size_t horizon = test.size();
    std::vector<std::vector<double>> forced(model.seasonal_predictors.size());

    if (model.spec.baseline ||
        (model.config.lag_source == LagSource::RawDemand && model.demand_normalizer)) {
        for (std::size_t k = 0; k < forced.size(); ++k) {
            forced[k].resize(horizon);
            for (std::size_t t = 0; t < horizon; ++t) {
                forced[k][t] = model.demand_normalizer->normalize(test.demand()[t]);
            }
        }
    } else {
        const CascadeDecomposition cascade =
            cascade_decompose(full_series, model.config.periods, model.config.stl_overrides);
        for (std::size_t k = 0; k < model.seasonal_predictors.size(); ++k) {
            const auto& predictor = model.seasonal_predictors[k];
            std::vector<double> component(horizon, 0.0);
            if (predictor.name == "seasonal_sum") {
                for (int period : model.config.periods) {
                    const auto& s = cascade.seasonal(period).values();
                    for (std::size_t t = 0; t < horizon; ++t) component[t] += s[n_train + t];
                }
            } else {
                const int period = std::stoi(predictor.name.substr(1));
                const auto& s = cascade.seasonal(period).values();
                for (std::size_t t = 0; t < horizon; ++t) component[t] = s[n_train + t];
            }
            forced[k].resize(horizon);
            for (std::size_t t = 0; t < horizon; ++t) {
                forced[k][t] = predictor.normalizer.normalize(component[t]);
            }
        }
    }

    const ComponentStreams streams = roll_forward(model, test, &forced);
    return compose_prediction(streams, test.demand().start());
}

// --- serialization ----------------------------------------------------

namespace {

json normalizer_to_json(const Normalizer& n) {
    return json{{"mean", n.mean()}, {"std", n.std()}};
}

Normalizer normalizer_from_json(const json& j) {
    return Normalizer(j.at("mean").get<double>(), j.at("std").get<double>());
}

json config_to_json(const SeaTrainConfig& c) {
    json j;
    j["periods"] = c.periods;
    j["lags"] = c.lags;
    j["hidden_nodes"] = c.hidden_nodes;
    j["learning_rate"] = c.learning_rate;
    j["epochs"] = c.epochs;
    j["bptt_depth"] = c.bptt_depth;
    j["gradient_clip_norm"] = c.gradient_clip_norm;
    j["seed"] = c.seed;
    j["lag_source"] = c.lag_source == LagSource::Component ? "component" : "raw_demand";
    j["arima_max_p"] = c.arima_max_p;
    j["arima_max_d"] = c.arima_max_d;
    j["arima_max_q"] = c.arima_max_q;
    if (c.arima_fixed_order) {
        j["arima_fixed_order"] = {{"p", c.arima_fixed_order->p},
                                  {"d", c.arima_fixed_order->d},
                                  {"q", c.arima_fixed_order->q}};
    }
    j["baseline_hidden_layers"] = c.baseline_hidden_layers;
    json overrides = json::object();
    for (const auto& [period, sp] : c.stl_overrides) {
        overrides[std::to_string(period)] = {{"period", sp.period},
                                             {"seasonal_span", sp.seasonal_span},
                                             {"trend_span", sp.trend_span},
                                             {"lowpass_span", sp.lowpass_span},
                                             {"inner_iterations", sp.inner_iterations},
                                             {"outer_iterations", sp.outer_iterations},
                                             {"seasonal_degree", sp.seasonal_degree},
                                             {"trend_degree", sp.trend_degree}};
    }
    j["stl_overrides"] = std::move(overrides);
    return j;
}

SeaTrainConfig config_from_json(const json& j) {
    SeaTrainConfig c;
    c.periods = j.at("periods").get<std::vector<int>>();
    c.lags = j.at("lags").get<int>();
    c.hidden_nodes = j.at("hidden_nodes").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.epochs = j.at("epochs").get<int>();
    c.bptt_depth = j.at("bptt_depth").get<int>();
    c.gradient_clip_norm = j.at("gradient_clip_norm").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.lag_source = j.at("lag_source").get<std::string>() == "raw_demand" ? LagSource::RawDemand
                                                                         : LagSource::Component;
    c.arima_max_p = j.at("arima_max_p").get<int>();
    c.arima_max_d = j.at("arima_max_d").get<int>();
    c.arima_max_q = j.at("arima_max_q").get<int>();
    if (j.contains("arima_fixed_order")) {
        arima::ArimaOrder order;
        order.p = j.at("arima_fixed_order").at("p").get<int>();
        order.d = j.at("arima_fixed_order").at("d").get<int>();
        order.q = j.at("arima_fixed_order").at("q").get<int>();
        c.arima_fixed_order = order;
    }
    c.baseline_hidden_layers = j.at("baseline_hidden_layers").get<int>();
    for (const auto& [key, sp] : j.at("stl_overrides").items()) {
        StlParams params;
        params.period = sp.at("period").get<int>();
        params.seasonal_span = sp.at("seasonal_span").get<int>();
        params.trend_span = sp.at("trend_span").get<int>();
        params.lowpass_span = sp.at("lowpass_span").get<int>();
        params.inner_iterations = sp.at("inner_iterations").get<int>();
        params.outer_iterations = sp.at("outer_iterations").get<int>();
        params.seasonal_degree = sp.at("seasonal_degree").get<int>();
        params.trend_degree = sp.at("trend_degree").get<int>();
        c.stl_overrides.emplace(std::stoi(key), params);
    }
    return c;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    out << contents;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace

void save_model(const SeaModel& model, const std::string& dir) {
    fs::create_directories(dir);
    json manifest;
    manifest["model_id"] = model.spec.id;
    manifest["baseline"] = model.spec.baseline;
    manifest["hidden_layers"] = model.spec.hidden_layers;
    manifest["config"] = config_to_json(model.config);
    manifest["train_end_hours"] = model.train_end.hours();
    manifest["train_end"] = model.train_end.to_string();
    manifest["seed"] = model.meta.seed;
    manifest["training_seconds"] = model.meta.training_seconds;
    manifest["temperature_normalizer"] = normalizer_to_json(model.temperature_normalizer);
    manifest["solar_normalizer"] = normalizer_to_json(model.solar_normalizer);
    manifest["wind_normalizer"] = normalizer_to_json(model.wind_normalizer);
    if (model.demand_normalizer) {
        manifest["demand_normalizer"] = normalizer_to_json(*model.demand_normalizer);
    }

    json predictors = json::array();
    for (const auto& predictor : model.seasonal_predictors) {
        const std::string file = "enn_" + predictor.name + ".json";
        predictors.push_back(json{{"name", predictor.name},
                                  {"file", file},
                                  {"normalizer", normalizer_to_json(predictor.normalizer)},
                                  {"initial_lags", predictor.initial_lags}});
        write_file(fs::path(dir) / file, predictor.network.to_json_string());
    }
    manifest["seasonal_predictors"] = std::move(predictors);

    if (model.trend) {
        manifest["trend"] = json{{"file", "arima_trend.json"},
                                 {"normalizer", normalizer_to_json(model.trend->normalizer)},
                                 {"history", model.trend->history}};
        write_file(fs::path(dir) / "arima_trend.json", model.trend->model.to_json_string());
    }
    write_file(fs::path(dir) / "manifest.json", manifest.dump(2));
}

SeaModel load_model(const std::string& dir) {
    const json manifest = json::parse(read_file(fs::path(dir) / "manifest.json"));

    SeaModel model;
    model.spec = ModelSpec::parse(manifest.at("model_id").get<std::string>());
    model.spec.hidden_layers = manifest.at("hidden_layers").get<int>();
    model.config = config_from_json(manifest.at("config"));
    model.train_end = HourStamp(manifest.at("train_end_hours").get<std::int64_t>());
    model.meta.seed = manifest.at("seed").get<std::uint64_t>();
    model.meta.training_seconds = manifest.at("training_seconds").get<double>();
    model.temperature_normalizer = normalizer_from_json(manifest.at("temperature_normalizer"));
    model.solar_normalizer = normalizer_from_json(manifest.at("solar_normalizer"));
    model.wind_normalizer = normalizer_from_json(manifest.at("wind_normalizer"));
    if (manifest.contains("demand_normalizer")) {
        model.demand_normalizer = normalizer_from_json(manifest.at("demand_normalizer"));
    }

    for (const auto& entry : manifest.at("seasonal_predictors")) {
        const std::string file = entry.at("file").get<std::string>();
        ComponentPredictor predictor{
            entry.at("name").get<std::string>(),
            ElmanNetwork::from_json_string(read_file(fs::path(dir) / file)),
            normalizer_from_json(entry.at("normalizer")),
            entry.at("initial_lags").get<std::vector<double>>()};
        model.seasonal_predictors.push_back(std::move(predictor));
    }

    if (manifest.contains("trend")) {
        const auto& tj = manifest.at("trend");
        TrendModel trend{
            arima::ArimaModel::from_json_string(
                read_file(fs::path(dir) / tj.at("file").get<std::string>())),
            normalizer_from_json(tj.at("normalizer")),
            tj.at("history").get<std::vector<double>>()};
        model.trend = std::move(trend);
    }
    return model;
}

} // namespace sea
