#ifndef SEA_STL_HPP
#define SEA_STL_HPP

#include <map>
#include <vector>

#include "sea/errors.hpp"
#include "sea/timeseries.hpp"

namespace sea {

// Parameters for one seasonal-trend decomposition stage.
struct StlParams {
    int period = 24;         // quasi-period of the extracted seasonal, in hours
    int seasonal_span = 35;  // odd, >= 7; window over the cycle-subseries index
    int trend_span = 39;     // odd, >= ceil-odd(1.5*period / (1 - 1.5/seasonal_span))
    int lowpass_span = 25;   // odd, >= smallest odd >= period
    int inner_iterations = 2;
    int outer_iterations = 1; // robustness passes; 0 disables reweighting
    int seasonal_degree = 1;  // 0 or 1
    int trend_degree = 1;     // 0 or 1

    // Standard parameter choices for a given period; everything overridable.
    static StlParams defaults(int period);

    void validate() const;

    static int smallest_valid_trend_span(int period, int seasonal_span);
    static int smallest_odd_at_least(double x);
};

// Additive decomposition of a series; seasonal + trend + remainder
// reconstructs the input to within accumulated rounding.
struct Decomposition {
    TimeSeries seasonal;
    TimeSeries trend;
    TimeSeries remainder;
};

// Result of repeatedly decomposing the running trend at several periods.
// Each seasonal component is centred (its mean folded into the trend), and
// the per-stage remainders are folded into the trend as well, so
// sum(seasonals) + trend reconstructs the input.
struct CascadeDecomposition {
    std::map<int, TimeSeries> seasonals; // keyed by period, ascending
    TimeSeries trend;

    const TimeSeries& seasonal(int period) const;
};

// Single-period decomposition: the inner loop alternates cycle-subseries
// smoothing, low-pass filtering and trend smoothing; the outer loop refits
// with bisquare robustness weights derived from the remainder.
Decomposition stl_decompose(const TimeSeries& series, const StlParams& params);

// Applies stl_decompose per period (ascending) to the running residual,
// extracting one seasonal per stage. `overrides` replaces the default
// parameters for the periods it contains.
CascadeDecomposition cascade_decompose(const TimeSeries& series, const std::vector<int>& periods,
                                       const std::map<int, StlParams>& overrides = {});

} // namespace sea

#endif // SEA_STL_HPP
