// Command-line surface for the SEA forecasting library: synthetic data
// generation, decomposition, training, prediction and the repeated-run
// experiment protocol.
//
// Exit codes: 0 success, 1 runtime/data error, 2 usage or config error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sea/eval.hpp"
#include "sea/pipeline.hpp"
#include "sea/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct RunConfig {
    // data
    std::string input;
    std::string train_path;
    std::string test_path;
    std::string split; // "YYYY-MM-DDTHH:00"
    std::string out = "out";
    std::string model_dir;

    // synth
    int hours = 720;
    std::string start = "2008-01-01T00:00";
    std::string periods = "3,4,12,24";
    std::string amplitudes; // optional comma list
    std::string phases;     // optional comma list
    double base_level = 100.0;
    double trend_slope = 3e-4;
    double trend_sine_amplitude = 0.0;
    double trend_sine_period = 8760.0;
    double temp_coupling = -0.5;
    double noise_sigma = 0.0;

    // stl overrides (0 / -1 = use per-period defaults)
    int seasonal_span = 0;
    int trend_span = 0;
    int lowpass_span = 0;
    int inner_iterations = -1;
    int outer_iterations = -1;
    int seasonal_degree = -1;
    int trend_degree = -1;

    // enn
    int lags = 4;
    int hidden_nodes = 15;
    double learning_rate = 0.01;
    int epochs = 200;
    int bptt_depth = 1;
    double gradient_clip = 5.0;
    std::string lag_source = "component"; // or raw_demand

    // arima
    int arima_max_p = 3;
    int arima_max_d = 1;
    int arima_max_q = 3;
    std::string arima_order; // fixed "p,d,q", empty = grid search

    // experiment
    std::string model = "A-1";
    std::string models; // empty = full grid
    int runs = 20;
    std::uint64_t seed = 0;
    int jobs = 0;
    bool keep_going = false;
    bool oracle_lags = false;
};

std::vector<std::string> split_string(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, sep)) parts.push_back(part);
    return parts;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    for (const auto& part : split_string(text, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(part, &used);
            if (used != part.size()) throw std::invalid_argument(part);
            out.push_back(v);
        } catch (const std::exception&) {
            throw sea::ConfigError("cannot parse " + what + " entry '" + part + "'");
        }
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& part : split_string(text, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(part, &used);
            if (used != part.size()) throw std::invalid_argument(part);
            out.push_back(v);
        } catch (const std::exception&) {
            throw sea::ConfigError("cannot parse " + what + " entry '" + part + "'");
        }
    }
    return out;
}

// --- key = value config file, mirroring the flag names -----------------

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto as_int = [&] {
        try {
            return std::stoi(value);
        } catch (const std::exception&) {
            throw sea::ConfigError("config key '" + key + "': bad integer '" + value + "'");
        }
    };
    auto as_u64 = [&] {
        try {
            return static_cast<std::uint64_t>(std::stoull(value));
        } catch (const std::exception&) {
            throw sea::ConfigError("config key '" + key + "': bad integer '" + value + "'");
        }
    };
    auto as_double = [&] {
        try {
            return std::stod(value);
        } catch (const std::exception&) {
            throw sea::ConfigError("config key '" + key + "': bad number '" + value + "'");
        }
    };
    auto as_bool = [&] {
        if (value == "true" || value == "1") return true;
        if (value == "false" || value == "0") return false;
        throw sea::ConfigError("config key '" + key + "': bad boolean '" + value + "'");
    };

    if (key == "input") cfg.input = value;
    else if (key == "train") cfg.train_path = value;
    else if (key == "test") cfg.test_path = value;
    else if (key == "split") cfg.split = value;
    else if (key == "out") cfg.out = value;
    else if (key == "model_dir") cfg.model_dir = value;
    else if (key == "hours") cfg.hours = as_int();
    else if (key == "start") cfg.start = value;
    else if (key == "periods") cfg.periods = value;
    else if (key == "amplitudes") cfg.amplitudes = value;
    else if (key == "phases") cfg.phases = value;
    else if (key == "base_level") cfg.base_level = as_double();
    else if (key == "trend_slope") cfg.trend_slope = as_double();
    else if (key == "trend_sine_amplitude") cfg.trend_sine_amplitude = as_double();
    else if (key == "trend_sine_period") cfg.trend_sine_period = as_double();
    else if (key == "temp_coupling") cfg.temp_coupling = as_double();
    else if (key == "noise_sigma") cfg.noise_sigma = as_double();
    else if (key == "seasonal_span") cfg.seasonal_span = as_int();
    else if (key == "trend_span") cfg.trend_span = as_int();
    else if (key == "lowpass_span") cfg.lowpass_span = as_int();
    else if (key == "inner_iterations") cfg.inner_iterations = as_int();
    else if (key == "outer_iterations") cfg.outer_iterations = as_int();
    else if (key == "seasonal_degree") cfg.seasonal_degree = as_int();
    else if (key == "trend_degree") cfg.trend_degree = as_int();
    else if (key == "lags") cfg.lags = as_int();
    else if (key == "hidden_nodes") cfg.hidden_nodes = as_int();
    else if (key == "learning_rate") cfg.learning_rate = as_double();
    else if (key == "epochs") cfg.epochs = as_int();
    else if (key == "bptt_depth") cfg.bptt_depth = as_int();
    else if (key == "gradient_clip") cfg.gradient_clip = as_double();
    else if (key == "lag_source") cfg.lag_source = value;
    else if (key == "arima_max_p") cfg.arima_max_p = as_int();
    else if (key == "arima_max_d") cfg.arima_max_d = as_int();
    else if (key == "arima_max_q") cfg.arima_max_q = as_int();
    else if (key == "arima_order") cfg.arima_order = value;
    else if (key == "model") cfg.model = value;
    else if (key == "models") cfg.models = value;
    else if (key == "runs") cfg.runs = as_int();
    else if (key == "seed") cfg.seed = as_u64();
    else if (key == "jobs") cfg.jobs = as_int();
    else if (key == "keep_going") cfg.keep_going = as_bool();
    else if (key == "oracle_lags") cfg.oracle_lags = as_bool();
    else throw sea::ConfigError("unknown config key '" + key + "'");
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sea::ConfigError("cannot open config file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw sea::ConfigError("config line " + std::to_string(line_no) +
                                   ": expected key = value");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void write_effective_config(const RunConfig& cfg, const std::string& command,
                            const std::string& dir) {
    fs::create_directories(dir);
    std::ofstream out(fs::path(dir) / "effective_config.txt");
    if (!out) throw sea::ParseError("cannot write effective_config.txt in " + dir);
    char buf[256];
    out << "command = " << command << "\n";
    out << "input = " << cfg.input << "\n";
    out << "train = " << cfg.train_path << "\n";
    out << "test = " << cfg.test_path << "\n";
    out << "split = " << cfg.split << "\n";
    out << "out = " << cfg.out << "\n";
    out << "model_dir = " << cfg.model_dir << "\n";
    out << "hours = " << cfg.hours << "\n";
    out << "start = " << cfg.start << "\n";
    out << "periods = " << cfg.periods << "\n";
    out << "amplitudes = " << cfg.amplitudes << "\n";
    out << "phases = " << cfg.phases << "\n";
    std::snprintf(buf, sizeof(buf), "base_level = %.17g\n", cfg.base_level);
    out << buf;
    std::snprintf(buf, sizeof(buf), "trend_slope = %.17g\n", cfg.trend_slope);
    out << buf;
    std::snprintf(buf, sizeof(buf), "trend_sine_amplitude = %.17g\n", cfg.trend_sine_amplitude);
    out << buf;
    std::snprintf(buf, sizeof(buf), "trend_sine_period = %.17g\n", cfg.trend_sine_period);
    out << buf;
    std::snprintf(buf, sizeof(buf), "temp_coupling = %.17g\n", cfg.temp_coupling);
    out << buf;
    std::snprintf(buf, sizeof(buf), "noise_sigma = %.17g\n", cfg.noise_sigma);
    out << buf;
    out << "seasonal_span = " << cfg.seasonal_span << "\n";
    out << "trend_span = " << cfg.trend_span << "\n";
    out << "lowpass_span = " << cfg.lowpass_span << "\n";
    out << "inner_iterations = " << cfg.inner_iterations << "\n";
    out << "outer_iterations = " << cfg.outer_iterations << "\n";
    out << "seasonal_degree = " << cfg.seasonal_degree << "\n";
    out << "trend_degree = " << cfg.trend_degree << "\n";
    out << "lags = " << cfg.lags << "\n";
    out << "hidden_nodes = " << cfg.hidden_nodes << "\n";
    std::snprintf(buf, sizeof(buf), "learning_rate = %.17g\n", cfg.learning_rate);
    out << buf;
    out << "epochs = " << cfg.epochs << "\n";
    out << "bptt_depth = " << cfg.bptt_depth << "\n";
    std::snprintf(buf, sizeof(buf), "gradient_clip = %.17g\n", cfg.gradient_clip);
    out << buf;
    out << "lag_source = " << cfg.lag_source << "\n";
    out << "arima_max_p = " << cfg.arima_max_p << "\n";
    out << "arima_max_d = " << cfg.arima_max_d << "\n";
    out << "arima_max_q = " << cfg.arima_max_q << "\n";
    out << "arima_order = " << cfg.arima_order << "\n";
    out << "model = " << cfg.model << "\n";
    out << "models = " << cfg.models << "\n";
    out << "runs = " << cfg.runs << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "jobs = " << cfg.jobs << "\n";
    out << "keep_going = " << (cfg.keep_going ? "true" : "false") << "\n";
    out << "oracle_lags = " << (cfg.oracle_lags ? "true" : "false") << "\n";
}

sea::SynthConfig make_synth_config(const RunConfig& cfg) {
    sea::SynthConfig sc;
    sc.hours = cfg.hours;
    sc.start = sea::HourStamp::parse(cfg.start);
    sc.periods = parse_int_list(cfg.periods, "periods");
    if (!cfg.amplitudes.empty()) sc.amplitudes = parse_double_list(cfg.amplitudes, "amplitudes");
    if (!cfg.phases.empty()) sc.phases = parse_double_list(cfg.phases, "phases");
    sc.base_level = cfg.base_level;
    sc.trend_slope_per_hour = cfg.trend_slope;
    sc.trend_sine_amplitude = cfg.trend_sine_amplitude;
    sc.trend_sine_period_hours = cfg.trend_sine_period;
    sc.temp_coupling = cfg.temp_coupling;
    sc.noise_sigma = cfg.noise_sigma;
    sc.seed = cfg.seed;
    return sc;
}

std::map<int, sea::StlParams> make_stl_overrides(const RunConfig& cfg,
                                                 const std::vector<int>& periods) {
    std::map<int, sea::StlParams> overrides;
    for (int p : periods) {
        sea::StlParams sp = sea::StlParams::defaults(p);
        if (cfg.seasonal_span > 0) {
            sp.seasonal_span = cfg.seasonal_span;
            sp.trend_span = sea::StlParams::smallest_valid_trend_span(p, sp.seasonal_span);
        }
        if (cfg.trend_span > 0) sp.trend_span = cfg.trend_span;
        if (cfg.lowpass_span > 0) sp.lowpass_span = cfg.lowpass_span;
        if (cfg.inner_iterations >= 0) sp.inner_iterations = cfg.inner_iterations;
        if (cfg.outer_iterations >= 0) sp.outer_iterations = cfg.outer_iterations;
        if (cfg.seasonal_degree >= 0) sp.seasonal_degree = cfg.seasonal_degree;
        if (cfg.trend_degree >= 0) sp.trend_degree = cfg.trend_degree;
        overrides.emplace(p, sp);
    }
    return overrides;
}

sea::SeaTrainConfig make_train_config(const RunConfig& cfg) {
    sea::SeaTrainConfig tc;
    tc.periods = parse_int_list(cfg.periods, "periods");
    tc.lags = cfg.lags;
    tc.hidden_nodes = cfg.hidden_nodes;
    tc.learning_rate = cfg.learning_rate;
    tc.epochs = cfg.epochs;
    tc.bptt_depth = cfg.bptt_depth;
    tc.gradient_clip_norm = cfg.gradient_clip;
    tc.seed = cfg.seed;
    if (cfg.lag_source == "component") tc.lag_source = sea::LagSource::Component;
    else if (cfg.lag_source == "raw_demand") tc.lag_source = sea::LagSource::RawDemand;
    else throw sea::ConfigError("lag_source must be 'component' or 'raw_demand'");
    tc.stl_overrides = make_stl_overrides(cfg, tc.periods);
    tc.arima_max_p = cfg.arima_max_p;
    tc.arima_max_d = cfg.arima_max_d;
    tc.arima_max_q = cfg.arima_max_q;
    if (!cfg.arima_order.empty()) {
        const auto parts = parse_int_list(cfg.arima_order, "arima_order");
        if (parts.size() != 3) throw sea::ConfigError("arima_order must be 'p,d,q'");
        tc.arima_fixed_order = sea::arima::ArimaOrder{parts[0], parts[1], parts[2]};
    }
    return tc;
}

void write_components_csv(const std::string& path, const sea::TimeSeries& input,
                          const sea::CascadeDecomposition& cascade) {
    std::ofstream out(path);
    if (!out) throw sea::ParseError("cannot write " + path);
    out << "timestamp,input";
    for (const auto& [period, series] : cascade.seasonals) out << ",s" << period;
    out << ",trend\n";
    char buf[64];
    for (std::size_t i = 0; i < input.size(); ++i) {
        out << (input.start() + static_cast<std::int64_t>(i)).to_string();
        std::snprintf(buf, sizeof(buf), ",%.17g", input[i]);
        out << buf;
        for (const auto& [period, series] : cascade.seasonals) {
            std::snprintf(buf, sizeof(buf), ",%.17g", series[i]);
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), ",%.17g\n", cascade.trend[i]);
        out << buf;
    }
}

// --- commands -----------------------------------------------------------

int cmd_synth(const RunConfig& cfg) {
    const sea::SynthResult result = sea::synthesize(make_synth_config(cfg));
    fs::create_directories(cfg.out);
    sea::save_csv(result.dataset, (fs::path(cfg.out) / "dataset.csv").string());
    write_components_csv((fs::path(cfg.out) / "truth_components.csv").string(),
                         result.dataset.demand(), result.truth);
    write_effective_config(cfg, "synth", cfg.out);
    std::cout << "wrote " << result.dataset.size() << " rows to " << cfg.out << "\n";
    return 0;
}

int cmd_decompose(const RunConfig& cfg) {
    if (cfg.input.empty()) throw sea::ConfigError("decompose requires --input");
    const sea::Dataset dataset = sea::load_csv(cfg.input);
    const auto periods = parse_int_list(cfg.periods, "periods");
    const auto cascade =
        sea::cascade_decompose(dataset.demand(), periods, make_stl_overrides(cfg, periods));
    fs::create_directories(cfg.out);
    write_components_csv((fs::path(cfg.out) / "components.csv").string(), dataset.demand(),
                         cascade);
    write_effective_config(cfg, "decompose", cfg.out);
    std::cout << "wrote components for " << dataset.size() << " rows to " << cfg.out << "\n";
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    if (cfg.input.empty()) throw sea::ConfigError("train requires --input");
    if (cfg.split.empty()) throw sea::ConfigError("train requires --split");
    const sea::Dataset dataset = sea::load_csv(cfg.input);
    const auto [train, test] =
        sea::split_train_test(dataset, sea::HourStamp::parse(cfg.split));
    (void)test;
    const sea::ModelSpec spec = sea::ModelSpec::parse(cfg.model);
    const sea::SeaModel model = sea::train_sea(train, spec, make_train_config(cfg));
    sea::save_model(model, cfg.out);
    write_effective_config(cfg, "train", cfg.out);
    std::cout << "trained " << spec.id << " on " << train.size() << " hours; saved to "
              << cfg.out << "\n";
    for (const auto& warning : model.trend ? model.trend->model.warnings
                                           : std::vector<std::string>{}) {
        std::cerr << "warning: " << warning << "\n";
    }
    return 0;
}

int cmd_predict(const RunConfig& cfg) {
    if (cfg.model_dir.empty()) throw sea::ConfigError("predict requires --model-dir");
    if (cfg.test_path.empty()) throw sea::ConfigError("predict requires --test");
    const sea::SeaModel model = sea::load_model(cfg.model_dir);
    const sea::Dataset test = sea::load_csv(cfg.test_path);

    sea::TimeSeries prediction = [&] {
        if (cfg.oracle_lags) {
            if (cfg.train_path.empty()) {
                throw sea::ConfigError("--oracle-lags requires --train (non-causal diagnostic)");
            }
            return sea::predict_oracle_lags(model, sea::load_csv(cfg.train_path), test);
        }
        return sea::predict(model, test);
    }();

    fs::create_directories(cfg.out);
    const fs::path out_path = fs::path(cfg.out) / "predictions.csv";
    std::ofstream out(out_path);
    if (!out) throw sea::ParseError("cannot write " + out_path.string());
    out << "timestamp,actual_mw,predicted_mw\n";
    char buf[160];
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n",
                      (prediction.start() + static_cast<std::int64_t>(i)).to_string().c_str(),
                      test.demand()[i], prediction[i]);
        out << buf;
    }
    write_effective_config(cfg, "predict", cfg.out);
    std::cout << "wrote " << prediction.size() << " predictions to " << out_path.string()
              << "\n";
    return 0;
}

int cmd_experiment(const RunConfig& cfg) {
    std::optional<sea::Dataset> train, test;
    if (!cfg.train_path.empty() && !cfg.test_path.empty()) {
        train = sea::load_csv(cfg.train_path);
        test = sea::load_csv(cfg.test_path);
    } else if (!cfg.input.empty() && !cfg.split.empty()) {
        const sea::Dataset dataset = sea::load_csv(cfg.input);
        auto parts = sea::split_train_test(dataset, sea::HourStamp::parse(cfg.split));
        train = std::move(parts.first);
        test = std::move(parts.second);
    } else {
        throw sea::ConfigError("experiment requires --train/--test or --input/--split");
    }

    std::vector<sea::ModelSpec> specs;
    if (cfg.models.empty()) {
        specs = sea::ModelSpec::full_grid();
    } else {
        for (const auto& id : split_string(cfg.models, ',')) {
            specs.push_back(sea::ModelSpec::parse(id));
        }
    }

    sea::ExperimentConfig ec;
    ec.n_runs = cfg.runs;
    ec.master_seed = cfg.seed;
    ec.jobs = cfg.jobs;
    ec.keep_going = cfg.keep_going;
    ec.model_config = make_train_config(cfg);

    const sea::EvalReport report = sea::run_experiment(*train, *test, specs, ec);
    sea::write_report_files(report, cfg.out, test->demand().start());
    write_effective_config(cfg, "experiment", cfg.out);

    for (const auto& failure : report.failures) std::cerr << "failed: " << failure << "\n";
    std::cout << "wrote report for " << specs.size() << " model(s) x " << cfg.runs
              << " run(s) to " << cfg.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;

    // --config is applied before flag parsing so explicit flags win.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                load_config_file(cfg, argv[i + 1]);
            } catch (const sea::Error& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 2;
            }
        }
    }

    CLI::App app{"SEA combined forecasting model (cascaded decomposition + "
                 "recurrent seasonal predictors + trend model)"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key = value config file (flags override it)");

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key = value config file (flags override it)");
        cmd->add_option("--seed", cfg.seed, "master random seed");
        cmd->add_option("--out", cfg.out, "output directory");
        cmd->add_option("--periods", cfg.periods, "comma-separated decomposition periods");
    };
    auto add_stl = [&](CLI::App* cmd) {
        cmd->add_option("--seasonal-span", cfg.seasonal_span, "0 = per-period default");
        cmd->add_option("--trend-span", cfg.trend_span, "0 = per-period default");
        cmd->add_option("--lowpass-span", cfg.lowpass_span, "0 = per-period default");
        cmd->add_option("--inner-iterations", cfg.inner_iterations, "-1 = default");
        cmd->add_option("--outer-iterations", cfg.outer_iterations, "-1 = default");
        cmd->add_option("--seasonal-degree", cfg.seasonal_degree, "-1 = default");
        cmd->add_option("--trend-degree", cfg.trend_degree, "-1 = default");
    };
    auto add_model_params = [&](CLI::App* cmd) {
        cmd->add_option("--lags", cfg.lags, "lagged values per input");
        cmd->add_option("--hidden-nodes", cfg.hidden_nodes, "nodes per hidden layer");
        cmd->add_option("--learning-rate", cfg.learning_rate);
        cmd->add_option("--epochs", cfg.epochs);
        cmd->add_option("--bptt-depth", cfg.bptt_depth);
        cmd->add_option("--gradient-clip", cfg.gradient_clip);
        cmd->add_option("--lag-source", cfg.lag_source, "component | raw_demand");
        cmd->add_option("--arima-max-p", cfg.arima_max_p);
        cmd->add_option("--arima-max-d", cfg.arima_max_d);
        cmd->add_option("--arima-max-q", cfg.arima_max_q);
        cmd->add_option("--arima-order", cfg.arima_order, "fixed 'p,d,q' (skips grid search)");
        add_stl(cmd);
    };

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset + ground truth");
    add_common(synth);
    synth->add_option("--hours", cfg.hours);
    synth->add_option("--start", cfg.start, "first timestamp, YYYY-MM-DDTHH:00");
    synth->add_option("--amplitudes", cfg.amplitudes, "comma list, one per period");
    synth->add_option("--phases", cfg.phases, "comma list, one per period");
    synth->add_option("--base-level", cfg.base_level);
    synth->add_option("--trend-slope", cfg.trend_slope, "MW per hour");
    synth->add_option("--trend-sine-amplitude", cfg.trend_sine_amplitude);
    synth->add_option("--trend-sine-period", cfg.trend_sine_period);
    synth->add_option("--temp-coupling", cfg.temp_coupling, "MW per degree C");
    synth->add_option("--noise-sigma", cfg.noise_sigma);

    CLI::App* decompose = app.add_subcommand("decompose", "write cascade components as CSV");
    add_common(decompose);
    add_stl(decompose);
    decompose->add_option("--input", cfg.input, "dataset CSV");

    CLI::App* train = app.add_subcommand("train", "train one model and save the bundle");
    add_common(train);
    add_model_params(train);
    train->add_option("--input", cfg.input, "dataset CSV");
    train->add_option("--split", cfg.split, "train/test boundary, YYYY-MM-DDTHH:00");
    train->add_option("--model", cfg.model, "A-1/A-2/A-4/B-1/B-2/B-4/ENN");

    CLI::App* predict = app.add_subcommand("predict", "predict a test range with a saved model");
    add_common(predict);
    predict->add_option("--model-dir", cfg.model_dir, "saved model bundle directory");
    predict->add_option("--test", cfg.test_path, "test CSV (must abut the training range)");
    predict->add_option("--train", cfg.train_path, "training CSV (only for --oracle-lags)");
    predict->add_flag("--oracle-lags", cfg.oracle_lags,
                      "teacher-forced diagnostic (non-causal)");

    CLI::App* experiment =
        app.add_subcommand("experiment", "repeated-run comparison across models");
    add_common(experiment);
    add_model_params(experiment);
    experiment->add_option("--input", cfg.input, "dataset CSV (with --split)");
    experiment->add_option("--split", cfg.split, "train/test boundary");
    experiment->add_option("--train", cfg.train_path, "training CSV");
    experiment->add_option("--test", cfg.test_path, "test CSV");
    experiment->add_option("--models", cfg.models, "comma list; empty = full grid");
    experiment->add_option("--runs", cfg.runs, "repetitions per model");
    experiment->add_option("--jobs", cfg.jobs, "worker threads; 0 = all cores");
    experiment->add_flag("--keep-going", cfg.keep_going, "emit a partial report on failures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (synth->parsed()) return cmd_synth(cfg);
        if (decompose->parsed()) return cmd_decompose(cfg);
        if (train->parsed()) return cmd_train(cfg);
        if (predict->parsed()) return cmd_predict(cfg);
        if (experiment->parsed()) return cmd_experiment(cfg);
    } catch (const sea::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const sea::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
