#include "sea/stl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sea/loess.hpp"

namespace sea {

namespace {

// Moving average of window `w`; output length = input length - w + 1.
std::vector<double> moving_average(const std::vector<double>& x, int w) {
    std::vector<double> out(x.size() - w + 1);
    double acc = 0.0;
    for (int i = 0; i < w; ++i) acc += x[i];
    out[0] = acc / w;
    for (std::size_t i = 1; i < out.size(); ++i) {
        acc += x[i + w - 1] - x[i - 1];
        out[i] = acc / w;
    }
    return out;
}

std::vector<double> index_points(std::size_t n, double from = 0.0) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = from + static_cast<double>(i);
    return xs;
}

// Loess over unit-spaced data with the span clamped to the available
// points. Series of fewer than 3 points degenerate to a weighted mean.
std::vector<double> smooth_series(const std::vector<double>& xs, const std::vector<double>& ys,
                                  int span, int degree, const std::vector<double>& weights,
                                  const std::vector<double>& eval) {
    const std::size_t m = ys.size();
    if (m < 3) {
        double wsum = 0.0, acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double w = weights.empty() ? 1.0 : weights[i];
            wsum += w;
            acc += w * ys[i];
        }
        const double mean =
            wsum > 0.0 ? acc / wsum
                       : std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(m);
        return std::vector<double>(eval.size(), mean);
    }
    int max_span = static_cast<int>(m);
    if (max_span % 2 == 0) --max_span;
    LoessParams lp;
    lp.degree = degree;
    lp.span = std::min(span, max_span);
    lp.external_weights = weights;
    return loess_smooth(xs, ys, lp, eval);
}

double median_abs(std::vector<double> v) {
    for (double& x : v) x = std::abs(x);
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        const double lo = *std::max_element(v.begin(), v.begin() + mid);
        m = 0.5 * (lo + m);
    }
    return m;
}

} // namespace

int StlParams::smallest_odd_at_least(double x) {
    int v = static_cast<int>(std::ceil(x));
    if (v < 1) v = 1;
    if (v % 2 == 0) ++v;
    return v;
}

int StlParams::smallest_valid_trend_span(int period, int seasonal_span) {
    return smallest_odd_at_least(1.5 * period / (1.0 - 1.5 / seasonal_span));
}

StlParams StlParams::defaults(int period) {
    StlParams p;
    p.period = period;
    p.seasonal_span = 35;
    p.trend_span = smallest_valid_trend_span(period, p.seasonal_span);
    p.lowpass_span = smallest_odd_at_least(period);
    return p;
}

void StlParams::validate() const {
    if (period < 1) throw ConfigError("period must be positive");
    if (seasonal_span < 7 || seasonal_span % 2 == 0) {
        throw ConfigError("seasonal_span must be odd and >= 7, got " +
                          std::to_string(seasonal_span));
    }
    const int min_trend = smallest_valid_trend_span(period, seasonal_span);
    if (trend_span < min_trend || trend_span % 2 == 0) {
        throw ConfigError("trend_span must be odd and >= " + std::to_string(min_trend) +
                          " for period " + std::to_string(period) + ", got " +
                          std::to_string(trend_span));
    }
    const int min_lowpass = smallest_odd_at_least(period);
    if (lowpass_span < min_lowpass || lowpass_span % 2 == 0) {
        throw ConfigError("lowpass_span must be odd and >= " + std::to_string(min_lowpass) +
                          ", got " + std::to_string(lowpass_span));
    }
    if (inner_iterations < 1) throw ConfigError("inner_iterations must be >= 1");
    if (outer_iterations < 0) throw ConfigError("outer_iterations must be >= 0");
    if (seasonal_degree < 0 || seasonal_degree > 1 || trend_degree < 0 || trend_degree > 1) {
        throw ConfigError("seasonal_degree and trend_degree must be 0 or 1");
    }
}

const TimeSeries& CascadeDecomposition::seasonal(int period) const {
    auto it = seasonals.find(period);
    if (it == seasonals.end()) {
        throw OutOfRange("no seasonal component for period " + std::to_string(period));
    }
    return it->second;
}

Decomposition stl_decompose(const TimeSeries& series, const StlParams& params) {
    params.validate();
    const std::size_t n = series.size();
    const int p = params.period;
    if (n < 2 * static_cast<std::size_t>(p)) {
        throw TooShort("series length " + std::to_string(n) + " < 2 * period " +
                       std::to_string(p));
    }
    const std::vector<double>& y = series.values();

    std::vector<double> seasonal(n, 0.0);
    std::vector<double> trend(n, 0.0);
    std::vector<double> rho; // robustness weights; empty on the first pass

    std::vector<double> detrended(n);
    std::vector<double> cycle_ext(n + 2 * p);
    std::vector<double> sub_x, sub_y, sub_w, sub_eval;
    const std::vector<double> xs_full = index_points(n);
    const std::vector<double> no_weights;

    for (int outer = 0; outer <= params.outer_iterations; ++outer) {
        for (int inner = 0; inner < params.inner_iterations; ++inner) {
            // 1. detrend
            for (std::size_t i = 0; i < n; ++i) detrended[i] = y[i] - trend[i];

            // 2. smooth each cycle-subseries, extending one period each side
            for (int r = 0; r < p; ++r) {
                const std::size_t m = (n - r + p - 1) / p;
                sub_x.resize(m);
                sub_y.resize(m);
                sub_w.clear();
                if (!rho.empty()) sub_w.resize(m);
                for (std::size_t k = 0; k < m; ++k) {
                    sub_x[k] = static_cast<double>(k);
                    sub_y[k] = detrended[r + k * p];
                    if (!rho.empty()) sub_w[k] = rho[r + k * p];
                }
                sub_eval.resize(m + 2);
                for (std::size_t k = 0; k < m + 2; ++k) {
                    sub_eval[k] = static_cast<double>(k) - 1.0;
                }
                const std::vector<double> smoothed = smooth_series(
                    sub_x, sub_y, params.seasonal_span, params.seasonal_degree, sub_w, sub_eval);
                for (std::size_t k = 0; k < m + 2; ++k) {
                    // subseries position k-1 sits at time r + (k-1)*p; the
                    // extended buffer is shifted by +p so indices start at 0
                    cycle_ext[static_cast<std::size_t>(r + (static_cast<int>(k) - 1) * p + p)] =
                        smoothed[k];
                }
            }

            // 3. low-pass: MA(p), MA(p), MA(3), then loess(lowpass_span, degree 1)
            std::vector<double> low = moving_average(cycle_ext, p);
            low = moving_average(low, p);
            low = moving_average(low, 3);
            low = smooth_series(xs_full, low, params.lowpass_span, 1, rho, xs_full);

            // 4. seasonal = smoothed cycle-subseries minus its low-pass
            for (std::size_t i = 0; i < n; ++i) {
                seasonal[i] = cycle_ext[i + p] - low[i];
            }

            // 5.-6. deseasonalize and smooth the trend
            for (std::size_t i = 0; i < n; ++i) detrended[i] = y[i] - seasonal[i];
            trend = smooth_series(xs_full, detrended, params.trend_span, params.trend_degree, rho,
                                  xs_full);
        }

        if (outer < params.outer_iterations) {
            // Bisquare weights on the remainder, clipped so no point is
            // removed entirely.
            std::vector<double> resid(n);
            for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - seasonal[i] - trend[i];
            const double cutoff = 6.0 * median_abs(resid);
            rho.assign(n, 1.0);
            if (cutoff > 0.0) {
                for (std::size_t i = 0; i < n; ++i) {
                    const double u = std::abs(resid[i]) / cutoff;
                    double w = 0.0;
                    if (u < 1.0) {
                        const double t = 1.0 - u * u;
                        w = t * t;
                    }
                    rho[i] = std::clamp(w, 1e-4, 1.0);
                }
            }
        }
    }

    std::vector<double> remainder(n);
    for (std::size_t i = 0; i < n; ++i) remainder[i] = y[i] - seasonal[i] - trend[i];

    return Decomposition{
        TimeSeries(series.start(), std::move(seasonal), "seasonal"),
        TimeSeries(series.start(), std::move(trend), "trend"),
        TimeSeries(series.start(), std::move(remainder), "remainder"),
    };
}

CascadeDecomposition cascade_decompose(const TimeSeries& series, const std::vector<int>& periods,
                                       const std::map<int, StlParams>& overrides) {
    if (periods.empty()) throw ConfigError("periods must not be empty");
    for (std::size_t i = 1; i < periods.size(); ++i) {
        if (periods[i] <= periods[i - 1]) {
            throw ConfigError("periods must be strictly increasing");
        }
    }
    const std::size_t n = series.size();
    if (n < 2 * static_cast<std::size_t>(periods.back())) {
        throw TooShort("series length " + std::to_string(n) + " < 2 * max period " +
                       std::to_string(periods.back()));
    }

    std::map<int, TimeSeries> seasonals;
    std::vector<double> residual = series.values();

    for (int period : periods) {
        auto it = overrides.find(period);
        StlParams params = it != overrides.end() ? it->second : StlParams::defaults(period);
        params.period = period;

        TimeSeries stage_input(series.start(), residual, series.name());
        Decomposition d = stl_decompose(stage_input, params);

        // Centre the seasonal; its mean and the stage remainder travel on
        // with the trend so the additive identity is preserved.
        const std::vector<double>& s = d.seasonal.values();
        const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(n);
        std::vector<double> centred(n);
        for (std::size_t i = 0; i < n; ++i) {
            centred[i] = s[i] - mean;
            residual[i] = d.trend[i] + d.remainder[i] + mean;
        }
        seasonals.emplace(period, TimeSeries(series.start(), std::move(centred),
                                             "s" + std::to_string(period)));
    }

    return CascadeDecomposition{std::move(seasonals),
                                TimeSeries(series.start(), std::move(residual), "trend")};
}

} // namespace sea
