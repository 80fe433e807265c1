#ifndef SEA_SYNTH_HPP
#define SEA_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "sea/stl.hpp"
#include "sea/timeseries.hpp"

namespace sea {

// Configuration of the synthetic hourly demand generator. The demand is a
// sum of sinusoidal seasonal components, a linear-plus-slow-sinusoid trend,
// a temperature coupling term and Gaussian noise; the generator returns the
// composed series together with its exact components.
struct SynthConfig {
    int hours = 720;
    HourStamp start = HourStamp::from_ymdh(2008, 1, 1, 0);
    std::vector<int> periods = {3, 4, 12, 24};
    std::vector<double> amplitudes; // per period; empty = 0.5 * period each
    std::vector<double> phases;     // per period; empty = all zero

    double base_level = 100.0;
    double trend_slope_per_hour = 3e-4;
    double trend_sine_amplitude = 0.0;
    double trend_sine_period_hours = 8760.0;

    // Demand picks up temp_coupling * ambient temperature; negative by
    // default so cold hours raise demand.
    double temp_coupling = -0.5;

    double temp_mean_c = 8.0;
    double temp_daily_amplitude = 4.0;
    double temp_annual_amplitude = 8.0;
    double temp_noise_sigma = 0.5;
    double solar_peak_wm2 = 400.0;
    double solar_noise_sigma = 10.0;
    double wind_mean_ms = 4.0;
    double wind_sigma = 1.5;

    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthResult {
    Dataset dataset;
    CascadeDecomposition truth; // seasonal components centred; trend holds the rest
};

SynthResult synthesize(const SynthConfig& config);

} // namespace sea

#endif // SEA_SYNTH_HPP
