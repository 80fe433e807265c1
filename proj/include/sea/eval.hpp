#ifndef SEA_EVAL_HPP
#define SEA_EVAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sea/errors.hpp"
#include "sea/pipeline.hpp"

namespace sea {

// Mean absolute percentage error, in percent. Every actual value must be
// nonzero; a zero aborts with ZeroActual rather than silently changing n.
double mape(const std::vector<double>& actual, const std::vector<double>& predicted);

// Root mean square error.
double rmse(const std::vector<double>& actual, const std::vector<double>& predicted);

// Two-sided Wilcoxon signed-rank p-value for paired samples. Zero
// differences are discarded; at least 5 pairs must remain. Absolute
// differences are ranked with average ranks for ties. Up to n = 25 the
// exact null distribution over all 2^n sign assignments is used; beyond
// that, the normal approximation with tie-corrected variance and
// continuity correction.
double wilcoxon_signed_rank(const std::vector<double>& xs, const std::vector<double>& ys);

// Significance stars: "****" p <= 0.0001, "***" p <= 0.001, "**" p <= 0.01,
// "*" p <= 0.05, "" otherwise. Boundaries inclusive.
std::string stars(double p);

struct BoxplotStats {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    std::vector<double> outliers; // beyond 1.5 * IQR from the quartiles
};

// Quartiles by linear interpolation; outliers by the 1.5 IQR rule.
BoxplotStats boxplot_stats(const std::vector<double>& values);

struct MetricSample {
    std::string model_id;
    int run_index = 0;
    double mape = 0.0;
    double rmse = 0.0;
};

// One pairwise test cell; `p` is absent when the test is degenerate
// (all differences zero, or too few usable pairs).
struct PairwiseResult {
    std::optional<double> p;
    std::string stars;
    std::string note;
};

struct ModelReport {
    std::string model_id;
    std::vector<double> mape_runs; // by run index
    std::vector<double> rmse_runs;
    double mape_mean = 0.0;
    double mape_variance = 0.0; // population variance over the runs
    double rmse_mean = 0.0;
    double rmse_variance = 0.0;
    BoxplotStats mape_box;
    BoxplotStats rmse_box;
};

struct EvalReport {
    int n_runs = 0;
    std::uint64_t master_seed = 0;
    std::vector<ModelReport> models; // in spec order
    std::vector<std::vector<PairwiseResult>> mape_p_matrix; // models x models
    std::vector<std::vector<PairwiseResult>> rmse_p_matrix;
    std::vector<MetricSample> samples;
    std::vector<std::string> failures; // "<model>/run <i>: <error>", keep-going only

    // First-run predictions per model, for plotting; parallel to `models`.
    std::vector<std::vector<double>> first_run_predictions;
    std::vector<double> test_actual;

    std::string to_json_string() const;
};

struct ExperimentConfig {
    int n_runs = 20;
    std::uint64_t master_seed = 0;
    int jobs = 0; // 0 = hardware concurrency
    bool keep_going = false;
    SeaTrainConfig model_config;
};

// Trains every spec n_runs times (run r uses seed master_seed + r, shared
// across models so runs pair by index), evaluates on the test range, and
// aggregates distributions and pairwise significance. The grid runs on a
// worker pool; results are collected in (spec, run) order so parallelism
// never changes the report.
EvalReport run_experiment(const Dataset& train, const Dataset& test,
                          const std::vector<ModelSpec>& specs, const ExperimentConfig& config);

// Writes report.json, samples.csv and per-model prediction CSVs.
void write_report_files(const EvalReport& report, const std::string& dir, HourStamp test_start);

} // namespace sea

#endif // SEA_EVAL_HPP
