#include "sea/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

namespace sea {

using json = nlohmann::json;

double mape(const std::vector<double>& actual, const std::vector<double>& predicted) {
    if (actual.size() != predicted.size()) {
        throw LengthMismatch("actual (" + std::to_string(actual.size()) + ") and predicted (" +
                             std::to_string(predicted.size()) + ") differ in length");
    }
    if (actual.empty()) throw LengthMismatch("mape needs at least one value");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) {
            throw ZeroActual("actual value is zero at index " + std::to_string(i) +
                             "; relative error undefined");
        }
        sum += std::abs(actual[i] - predicted[i]) / actual[i];
    }
    return sum / static_cast<double>(actual.size()) * 100.0;
}

double rmse(const std::vector<double>& actual, const std::vector<double>& predicted) {
    if (actual.size() != predicted.size()) {
        throw LengthMismatch("actual (" + std::to_string(actual.size()) + ") and predicted (" +
                             std::to_string(predicted.size()) + ") differ in length");
    }
    if (actual.empty()) throw LengthMismatch("rmse needs at least one value");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double d = actual[i] - predicted[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(actual.size()));
}

namespace {

// Doubled average ranks of |d| (doubling keeps tied ranks integral).
// Returns the doubled rank of each element of `abs_diffs`.
std::vector<std::int64_t> doubled_ranks(const std::vector<double>& abs_diffs) {
    const std::size_t n = abs_diffs.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return abs_diffs[a] < abs_diffs[b]; });

    std::vector<std::int64_t> r2(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && abs_diffs[idx[j + 1]] == abs_diffs[idx[i]]) ++j;
        // ranks i+1 .. j+1 share the average ((i+1) + (j+1)) / 2
        const std::int64_t doubled = static_cast<std::int64_t>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) r2[idx[k]] = doubled;
        i = j + 1;
    }
    return r2;
}

} // namespace

double wilcoxon_signed_rank(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) {
        throw LengthMismatch("paired samples differ in length");
    }
    std::vector<double> abs_d;
    std::vector<bool> positive;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - ys[i];
        if (d == 0.0) continue;
        abs_d.push_back(std::abs(d));
        positive.push_back(d > 0.0);
    }
    if (abs_d.empty()) {
        throw AllZeroDifferences("every paired difference is zero");
    }
    const std::size_t n = abs_d.size();
    if (n < 5) {
        throw TooFewPairs("only " + std::to_string(n) + " nonzero pairs; need at least 5");
    }

    const std::vector<std::int64_t> r2 = doubled_ranks(abs_d);
    std::int64_t w2 = 0; // doubled signed-rank statistic W+
    for (std::size_t i = 0; i < n; ++i) {
        if (positive[i]) w2 += r2[i];
    }

    if (n <= 25) {
        // Exact null distribution: counts of subsets reaching each doubled
        // rank sum, over all 2^n equally likely sign assignments.
        const std::int64_t total_r2 = std::accumulate(r2.begin(), r2.end(), std::int64_t{0});
        std::vector<std::uint64_t> count(static_cast<std::size_t>(total_r2) + 1, 0);
        count[0] = 1;
        for (std::int64_t rank : r2) {
            for (std::int64_t s = total_r2; s >= rank; --s) {
                count[s] += count[s - rank];
            }
        }
        std::uint64_t lower = 0, upper = 0;
        for (std::int64_t s = 0; s <= total_r2; ++s) {
            if (s <= w2) lower += count[s];
            if (s >= w2) upper += count[s];
        }
        const double denom = std::ldexp(1.0, static_cast<int>(n)); // 2^n
        const double tail = static_cast<double>(std::min(lower, upper));
        return std::min(1.0, 2.0 * tail / denom);
    }

    // Normal approximation with tie correction and continuity correction.
    const double nd = static_cast<double>(n);
    const double w = static_cast<double>(w2) / 2.0;
    const double mean = nd * (nd + 1.0) / 4.0;
    double tie_term = 0.0;
    {
        std::vector<double> sorted = abs_d;
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    if (var <= 0.0) {
        throw TooFewPairs("tie-corrected variance is zero; test degenerate");
    }
    const double z = std::max(0.0, (std::abs(w - mean) - 0.5) / std::sqrt(var));
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

std::string stars(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("p-value " + std::to_string(p) + " outside [0, 1]");
    }
    if (p <= 0.0001) return "****";
    if (p <= 0.001) return "***";
    if (p <= 0.01) return "**";
    if (p <= 0.05) return "*";
    return "";
}

BoxplotStats boxplot_stats(const std::vector<double>& values) {
    if (values.empty()) throw TooShort("boxplot needs at least one value");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    auto quantile = [&](double q) {
        const double h = q * static_cast<double>(n - 1);
        const std::size_t lo = static_cast<std::size_t>(h);
        if (lo + 1 >= n) return sorted[n - 1];
        return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
    };

    BoxplotStats stats;
    stats.min = sorted.front();
    stats.max = sorted.back();
    stats.q1 = quantile(0.25);
    stats.median = quantile(0.5);
    stats.q3 = quantile(0.75);
    const double iqr = stats.q3 - stats.q1;
    const double lo_fence = stats.q1 - 1.5 * iqr;
    const double hi_fence = stats.q3 + 1.5 * iqr;
    for (double v : sorted) {
        if (v < lo_fence || v > hi_fence) stats.outliers.push_back(v);
    }
    return stats;
}

namespace {

struct RunOutcome {
    bool ok = false;
    double mape_value = 0.0;
    double rmse_value = 0.0;
    std::vector<double> predictions; // kept for run 0 only
    std::string error;
};

PairwiseResult pairwise_test(const std::vector<double>& a, const std::vector<double>& b) {
    PairwiseResult cell;
    if (a.size() != b.size() || a.size() < 2) {
        cell.note = "insufficient paired runs";
        return cell;
    }
    try {
        const double p = wilcoxon_signed_rank(a, b);
        cell.p = p;
        cell.stars = stars(p);
    } catch (const AllZeroDifferences&) {
        cell.note = "all differences zero";
    } catch (const TooFewPairs& e) {
        cell.note = e.what();
    }
    return cell;
}

double population_variance(const std::vector<double>& v, double mean) {
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(v.size());
}

} // namespace

EvalReport run_experiment(const Dataset& train, const Dataset& test,
                          const std::vector<ModelSpec>& specs, const ExperimentConfig& config) {
    if (specs.empty()) throw ConfigError("no model specs given");
    if (config.n_runs < 2) throw ConfigError("n_runs must be >= 2");

    const std::size_t n_specs = specs.size();
    const std::size_t n_tasks = n_specs * static_cast<std::size_t>(config.n_runs);
    std::vector<RunOutcome> outcomes(n_tasks);

    int jobs = config.jobs > 0 ? config.jobs
                               : static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    jobs = std::min<int>(jobs, static_cast<int>(n_tasks));

    const auto& actual = test.demand().values();

    std::atomic<std::size_t> next_task{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t task = next_task.fetch_add(1);
            if (task >= n_tasks) return;
            const std::size_t spec_idx = task / config.n_runs;
            const int run = static_cast<int>(task % config.n_runs);

            RunOutcome& out = outcomes[task];
            try {
                SeaTrainConfig run_cfg = config.model_config;
                run_cfg.seed = config.master_seed + static_cast<std::uint64_t>(run);
                const SeaModel model = train_sea(train, specs[spec_idx], run_cfg);
                const TimeSeries prediction = predict(model, test);
                out.mape_value = mape(actual, prediction.values());
                out.rmse_value = rmse(actual, prediction.values());
                if (run == 0) out.predictions = prediction.values();
                out.ok = true;
            } catch (const std::exception& e) {
                out.error = e.what();
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    EvalReport report;
    report.n_runs = config.n_runs;
    report.master_seed = config.master_seed;
    report.test_actual = actual;

    std::vector<std::string> failures;
    for (std::size_t s = 0; s < n_specs; ++s) {
        for (int r = 0; r < config.n_runs; ++r) {
            const RunOutcome& out = outcomes[s * config.n_runs + r];
            if (!out.ok) {
                failures.push_back(specs[s].id + "/run " + std::to_string(r) + ": " + out.error);
            }
        }
    }
    if (!failures.empty() && !config.keep_going) {
        std::string msg = "experiment failed for " + std::to_string(failures.size()) + " run(s):";
        for (const auto& f : failures) msg += "\n  " + f;
        throw ExperimentError(msg);
    }
    report.failures = std::move(failures);

    for (std::size_t s = 0; s < n_specs; ++s) {
        ModelReport mr;
        mr.model_id = specs[s].id;
        for (int r = 0; r < config.n_runs; ++r) {
            const RunOutcome& out = outcomes[s * config.n_runs + r];
            if (!out.ok) continue;
            mr.mape_runs.push_back(out.mape_value);
            mr.rmse_runs.push_back(out.rmse_value);
            report.samples.push_back(MetricSample{mr.model_id, r, out.mape_value, out.rmse_value});
        }
        if (!mr.mape_runs.empty()) {
            mr.mape_mean = std::accumulate(mr.mape_runs.begin(), mr.mape_runs.end(), 0.0) /
                           static_cast<double>(mr.mape_runs.size());
            mr.rmse_mean = std::accumulate(mr.rmse_runs.begin(), mr.rmse_runs.end(), 0.0) /
                           static_cast<double>(mr.rmse_runs.size());
            mr.mape_variance = population_variance(mr.mape_runs, mr.mape_mean);
            mr.rmse_variance = population_variance(mr.rmse_runs, mr.rmse_mean);
            mr.mape_box = boxplot_stats(mr.mape_runs);
            mr.rmse_box = boxplot_stats(mr.rmse_runs);
        }
        report.first_run_predictions.push_back(outcomes[s * config.n_runs].predictions);
        report.models.push_back(std::move(mr));
    }

    report.mape_p_matrix.assign(n_specs, std::vector<PairwiseResult>(n_specs));
    report.rmse_p_matrix.assign(n_specs, std::vector<PairwiseResult>(n_specs));
    for (std::size_t i = 0; i < n_specs; ++i) {
        for (std::size_t j = i + 1; j < n_specs; ++j) {
            PairwiseResult m_cell =
                pairwise_test(report.models[i].mape_runs, report.models[j].mape_runs);
            PairwiseResult r_cell =
                pairwise_test(report.models[i].rmse_runs, report.models[j].rmse_runs);
            report.mape_p_matrix[i][j] = m_cell;
            report.mape_p_matrix[j][i] = m_cell;
            report.rmse_p_matrix[i][j] = r_cell;
            report.rmse_p_matrix[j][i] = r_cell;
        }
    }
    return report;
}

namespace {

json box_to_json(const BoxplotStats& b) {
    return json{{"min", b.min},     {"q1", b.q1},   {"median", b.median},
                {"q3", b.q3},       {"max", b.max}, {"outliers", b.outliers}};
}

json matrix_to_json(const std::vector<std::vector<PairwiseResult>>& matrix,
                    const std::vector<ModelReport>& models) {
    json rows = json::object();
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        json row = json::object();
        for (std::size_t j = 0; j < matrix[i].size(); ++j) {
            if (i == j) continue; // empty diagonal
            const PairwiseResult& cell = matrix[i][j];
            json c;
            if (cell.p) {
                c["p"] = *cell.p;
                c["stars"] = cell.stars;
            } else {
                c["p"] = nullptr;
                c["note"] = cell.note;
            }
            row[models[j].model_id] = std::move(c);
        }
        rows[models[i].model_id] = std::move(row);
    }
    return rows;
}

} // namespace

std::string EvalReport::to_json_string() const {
    json j;
    j["n_runs"] = n_runs;
    j["master_seed"] = master_seed;
    j["wilcoxon"] = "two-sided signed-rank, runs paired by index";
    json models_json = json::object();
    for (const auto& m : models) {
        models_json[m.model_id] = {
            {"mape", {{"mean", m.mape_mean}, {"variance", m.mape_variance},
                      {"runs", m.mape_runs}, {"boxplot", box_to_json(m.mape_box)}}},
            {"rmse", {{"mean", m.rmse_mean}, {"variance", m.rmse_variance},
                      {"runs", m.rmse_runs}, {"boxplot", box_to_json(m.rmse_box)}}},
        };
    }
    j["models"] = std::move(models_json);
    j["model_order"] = [&] {
        std::vector<std::string> ids;
        for (const auto& m : models) ids.push_back(m.model_id);
        return ids;
    }();
    j["p_values_mape"] = matrix_to_json(mape_p_matrix, models);
    j["p_values_rmse"] = matrix_to_json(rmse_p_matrix, models);
    if (!failures.empty()) j["failures"] = failures;
    return j.dump(2);
}

void write_report_files(const EvalReport& report, const std::string& dir, HourStamp test_start) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    {
        std::ofstream out(fs::path(dir) / "report.json");
        if (!out) throw ParseError("cannot write report.json in " + dir);
        out << report.to_json_string() << "\n";
    }
    {
        std::ofstream out(fs::path(dir) / "samples.csv");
        if (!out) throw ParseError("cannot write samples.csv in " + dir);
        out << "model_id,run_index,mape_percent,rmse_mw\n";
        char buf[128];
        for (const auto& s : report.samples) {
            std::snprintf(buf, sizeof(buf), "%s,%d,%.17g,%.17g\n", s.model_id.c_str(),
                          s.run_index, s.mape, s.rmse);
            out << buf;
        }
    }
    for (std::size_t i = 0; i < report.models.size(); ++i) {
        if (report.first_run_predictions[i].empty()) continue;
        std::ofstream out(fs::path(dir) / ("pred_" + report.models[i].model_id + ".csv"));
        if (!out) throw ParseError("cannot write prediction CSV in " + dir);
        out << "timestamp,actual_mw,predicted_mw\n";
        char buf[160];
        const auto& pred = report.first_run_predictions[i];
        for (std::size_t t = 0; t < pred.size(); ++t) {
            std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n",
                          (test_start + static_cast<std::int64_t>(t)).to_string().c_str(),
                          report.test_actual[t], pred[t]);
            out << buf;
        }
    }
}

} // namespace sea
