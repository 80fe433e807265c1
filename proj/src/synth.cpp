#include "sea/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sea/rng.hpp"

namespace sea {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

} // namespace

void SynthConfig::validate() const {
    if (periods.empty()) throw ConfigError("periods must not be empty");
    for (std::size_t i = 0; i < periods.size(); ++i) {
        const int p = periods[i];
        if (p != 3 && p != 4 && p != 12 && p != 24) {
            throw ConfigError("period " + std::to_string(p) + " not in {3, 4, 12, 24}");
        }
        if (i > 0 && periods[i] <= periods[i - 1]) {
            throw ConfigError("periods must be strictly increasing");
        }
    }
    const int max_period = periods.back();
    if (hours < 10 * max_period) {
        throw ConfigError("length " + std::to_string(hours) + " < 10 * max period " +
                          std::to_string(max_period));
    }
    if (!amplitudes.empty() && amplitudes.size() != periods.size()) {
        throw ConfigError("amplitudes must match periods in length");
    }
    if (!phases.empty() && phases.size() != periods.size()) {
        throw ConfigError("phases must match periods in length");
    }
    if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
    if (temp_noise_sigma < 0.0 || solar_noise_sigma < 0.0 || wind_sigma < 0.0) {
        throw ConfigError("weather noise levels must be >= 0");
    }
}

SynthResult synthesize(const SynthConfig& config) {
    config.validate();
    const std::size_t n = static_cast<std::size_t>(config.hours);
    const std::size_t k = config.periods.size();

    std::vector<double> amplitudes = config.amplitudes;
    if (amplitudes.empty()) {
        for (int p : config.periods) amplitudes.push_back(0.5 * p);
    }
    std::vector<double> phases = config.phases;
    if (phases.empty()) phases.assign(k, 0.0);

    Rng rng(config.seed);

    // Weather channels first so the demand noise stream is independent of
    // the weather parameters.
    std::vector<ExogenousRecord> exo(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double td = static_cast<double>(t);
        ExogenousRecord r;
        r.ambient_temperature_c = config.temp_mean_c +
                                  config.temp_daily_amplitude * std::sin(kTwoPi * td / 24.0 + 1.0) +
                                  config.temp_annual_amplitude *
                                      std::sin(kTwoPi * td / 8760.0 + 4.0) +
                                  rng.normal(0.0, config.temp_noise_sigma);
        r.solar_radiation_wm2 =
            std::max(0.0, config.solar_peak_wm2 * std::sin(kTwoPi * (td - 6.0) / 24.0) +
                              rng.normal(0.0, config.solar_noise_sigma));
        r.wind_speed_ms = std::abs(config.wind_mean_ms + rng.normal(0.0, config.wind_sigma));
        exo[t] = r;
    }

    // Raw seasonal components and their means over the series.
    std::vector<std::vector<double>> seasonal_raw(k, std::vector<double>(n));
    std::vector<double> seasonal_mean(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t t = 0; t < n; ++t) {
            seasonal_raw[j][t] = amplitudes[j] *
                                 std::sin(kTwoPi * static_cast<double>(t) / config.periods[j] +
                                          phases[j]);
        }
        seasonal_mean[j] = std::accumulate(seasonal_raw[j].begin(), seasonal_raw[j].end(), 0.0) /
                           static_cast<double>(n);
    }
    const double mean_total = std::accumulate(seasonal_mean.begin(), seasonal_mean.end(), 0.0);

    // Trend absorbs the seasonal means, the weather coupling and the noise,
    // so that demand is by construction the exact sum of the components.
    std::vector<double> trend(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double td = static_cast<double>(t);
        double tr = config.base_level + config.trend_slope_per_hour * td;
        if (config.trend_sine_amplitude != 0.0) {
            tr += config.trend_sine_amplitude *
                  std::sin(kTwoPi * td / config.trend_sine_period_hours);
        }
        tr += config.temp_coupling * exo[t].ambient_temperature_c;
        tr += rng.normal(0.0, config.noise_sigma);
        trend[t] = tr + mean_total;
    }

    std::vector<double> demand(n);
    std::map<int, TimeSeries> seasonals;
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> centred(n);
        for (std::size_t t = 0; t < n; ++t) {
            centred[t] = seasonal_raw[j][t] - seasonal_mean[j];
        }
        seasonals.emplace(config.periods[j],
                          TimeSeries(config.start, std::move(centred),
                                     "s" + std::to_string(config.periods[j])));
    }
    for (std::size_t t = 0; t < n; ++t) {
        double sum = 0.0;
        for (const auto& [period, comp] : seasonals) sum += comp[t];
        demand[t] = sum + trend[t];
    }

    CascadeDecomposition truth{std::move(seasonals),
                               TimeSeries(config.start, std::move(trend), "trend")};
    Dataset dataset(TimeSeries(config.start, std::move(demand), "heat_demand_mw"),
                    std::move(exo));
    return SynthResult{std::move(dataset), std::move(truth)};
}

} // namespace sea
