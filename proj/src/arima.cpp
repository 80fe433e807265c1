#include "sea/arima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

namespace sea {
namespace arima {

using json = nlohmann::json;

void ArimaOrder::validate(int max_p, int max_d, int max_q) const {
    if (p < 0 || d < 0 || q < 0) throw ConfigError("ARIMA orders must be non-negative");
    if (p + q < 1 && d < 1) throw ConfigError("empty ARIMA model: need p + q >= 1 or d >= 1");
    if (p > max_p || d > max_d || q > max_q) {
        throw ConfigError("ARIMA order (" + std::to_string(p) + "," + std::to_string(d) + "," +
                          std::to_string(q) + ") exceeds maxima (" + std::to_string(max_p) + "," +
                          std::to_string(max_d) + "," + std::to_string(max_q) + ")");
    }
}

std::vector<double> difference(const std::vector<double>& series, int d) {
    if (d < 0) throw ConfigError("differencing order must be >= 0");
    if (series.size() <= static_cast<std::size_t>(d)) {
        throw TooShort("cannot difference " + std::to_string(series.size()) + " values " +
                       std::to_string(d) + " times");
    }
    // Extended precision keeps repeated differencing invertible by
    // `integrate` to well below 1e-12 for d <= 3.
    std::vector<long double> work(series.begin(), series.end());
    for (int k = 0; k < d; ++k) {
        for (std::size_t i = 0; i + 1 < work.size(); ++i) work[i] = work[i + 1] - work[i];
        work.pop_back();
    }
    return std::vector<double>(work.begin(), work.end());
}

std::vector<double> integrate(const std::vector<double>& diffed, int d,
                              const std::vector<double>& initial_values) {
    if (d < 0) throw ConfigError("differencing order must be >= 0");
    if (initial_values.size() != static_cast<std::size_t>(d)) {
        throw ArityMismatch("need exactly " + std::to_string(d) + " initial values, got " +
                            std::to_string(initial_values.size()));
    }
    if (d == 0) return diffed;

    // firsts[j] = first value of the j-times differenced original, derived
    // from the supplied leading values.
    std::vector<long double> firsts(d);
    std::vector<long double> work(initial_values.begin(), initial_values.end());
    for (int j = 0; j < d; ++j) {
        firsts[j] = work[0];
        for (std::size_t i = 0; i + 1 < work.size(); ++i) work[i] = work[i + 1] - work[i];
        if (!work.empty()) work.pop_back();
    }

    // Rebuild level by level from the innermost difference outward.
    std::vector<long double> level(diffed.begin(), diffed.end());
    for (int j = d - 1; j >= 0; --j) {
        std::vector<long double> rebuilt(level.size() + 1);
        rebuilt[0] = firsts[j];
        for (std::size_t i = 0; i < level.size(); ++i) rebuilt[i + 1] = rebuilt[i] + level[i];
        level = std::move(rebuilt);
    }
    return std::vector<double>(level.begin(), level.end());
}

double css_loss(const std::vector<double>& ar_coeffs, const std::vector<double>& ma_coeffs,
                double intercept, const std::vector<double>& series) {
    const int p = static_cast<int>(ar_coeffs.size());
    const int q = static_cast<int>(ma_coeffs.size());
    const int n = static_cast<int>(series.size());
    const int skip = std::max(p, q);
    std::vector<double> resid(n, 0.0);
    double loss = 0.0;
    for (int t = 0; t < n; ++t) {
        double eps = series[t] - intercept;
        for (int i = 0; i < p; ++i) {
            if (t - 1 - i >= 0) eps -= ar_coeffs[i] * series[t - 1 - i];
        }
        for (int j = 0; j < q; ++j) {
            if (t - 1 - j >= 0) eps -= ma_coeffs[j] * resid[t - 1 - j];
        }
        resid[t] = eps;
        if (t >= skip) loss += eps * eps;
    }
    return loss;
}

namespace {

// Schur-Cohn / step-down recursion: stationary iff every reflection
// coefficient has modulus < 1.
bool ar_polynomial_stationary(const std::vector<double>& phi) {
    std::vector<double> a = phi;
    for (int m = static_cast<int>(a.size()); m >= 1; --m) {
        const double k = a[m - 1];
        if (std::abs(k) >= 1.0) return false;
        const double denom = 1.0 - k * k;
        std::vector<double> next(m - 1);
        for (int i = 0; i < m - 1; ++i) {
            next[i] = (a[i] + k * a[m - 2 - i]) / denom;
        }
        a = std::move(next);
    }
    return true;
}

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    bool converged = false;
};

// Deterministic Nelder-Mead with standard coefficients.
template <typename F>
SimplexResult nelder_mead(F&& f, std::vector<double> start, double step, int max_iterations,
                          double tolerance) {
    const std::size_t dim = start.size();
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    std::vector<std::vector<double>> pts(dim + 1, start);
    for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += step;
    std::vector<double> vals(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) vals[i] = f(pts[i]);

    std::vector<std::size_t> idx(dim + 1);
    SimplexResult result;
    for (int iter = 0; iter < max_iterations; ++iter) {
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = idx[0], worst = idx[dim], second = idx[dim - 1];

        if (vals[worst] - vals[best] <= tolerance * (std::abs(vals[best]) + tolerance)) {
            result.x = pts[best];
            result.value = vals[best];
            result.converged = true;
            return result;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += pts[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        auto blend = [&](double coeff) {
            std::vector<double> x(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                x[j] = centroid[j] + coeff * (centroid[j] - pts[worst][j]);
            }
            return x;
        };

        std::vector<double> reflected = blend(alpha);
        const double fr = f(reflected);
        if (fr < vals[idx[0]]) {
            std::vector<double> expanded = blend(alpha * gamma);
            const double fe = f(expanded);
            if (fe < fr) {
                pts[worst] = std::move(expanded);
                vals[worst] = fe;
            } else {
                pts[worst] = std::move(reflected);
                vals[worst] = fr;
            }
        } else if (fr < vals[second]) {
            pts[worst] = std::move(reflected);
            vals[worst] = fr;
        } else {
            const bool outside = fr < vals[worst];
            std::vector<double> contracted = blend(outside ? alpha * rho : -rho);
            const double fc = f(contracted);
            if (fc < (outside ? fr : vals[worst])) {
                pts[worst] = std::move(contracted);
                vals[worst] = fc;
            } else {
                // Shrink toward the best point.
                for (std::size_t i = 0; i <= dim; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < dim; ++j) {
                        pts[i][j] = pts[best][j] + sigma * (pts[i][j] - pts[best][j]);
                    }
                    vals[i] = f(pts[i]);
                }
            }
        }
    }

    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    result.x = pts[idx[0]];
    result.value = vals[idx[0]];
    result.converged = false;
    return result;
}

// Residuals of the fitted recursion over a differenced series.
std::vector<double> css_residuals(const ArimaModel& model, const std::vector<double>& w) {
    const int p = model.order.p;
    const int q = model.order.q;
    const int n = static_cast<int>(w.size());
    std::vector<double> resid(n, 0.0);
    for (int t = 0; t < n; ++t) {
        double eps = w[t] - model.intercept;
        for (int i = 0; i < p; ++i) {
            if (t - 1 - i >= 0) eps -= model.ar_coeffs[i] * w[t - 1 - i];
        }
        for (int j = 0; j < q; ++j) {
            if (t - 1 - j >= 0) eps -= model.ma_coeffs[j] * resid[t - 1 - j];
        }
        resid[t] = eps;
    }
    return resid;
}

} // namespace

ArimaModel fit(const std::vector<double>& series, ArimaOrder order, const FitOptions& options) {
    order.validate(options.max_p, options.max_d, options.max_q);
    const int p = order.p, d = order.d, q = order.q;
    const std::size_t min_len = 10 * static_cast<std::size_t>(p + q + 1) + d;
    if (series.size() < min_len) {
        throw TooShort("need at least " + std::to_string(min_len) + " values for order (" +
                       std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) +
                       "), got " + std::to_string(series.size()));
    }

    const std::vector<double> w = difference(series, d);
    const double w_mean =
        std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());

    ArimaModel model;
    model.order = order;
    model.fitted_on_length = static_cast<std::int64_t>(series.size());

    const int dim = p + q + 1;
    auto unpack = [&](const std::vector<double>& x, std::vector<double>& phi,
                      std::vector<double>& theta, double& c) {
        phi.assign(x.begin(), x.begin() + p);
        theta.assign(x.begin() + p, x.begin() + p + q);
        c = x[p + q];
    };
    std::vector<double> phi, theta;
    double c = 0.0;
    auto objective = [&](const std::vector<double>& x) {
        std::vector<double> lphi(x.begin(), x.begin() + p);
        std::vector<double> ltheta(x.begin() + p, x.begin() + p + q);
        return css_loss(lphi, ltheta, x[p + q], w);
    };

    std::vector<double> start(dim, 0.0);
    start[p + q] = w_mean;

    const int n_eff = static_cast<int>(w.size()) - std::max(p, q);
    if (p + q == 0) {
        // Only the intercept: the CSS optimum is the series mean, no search needed.
        model.intercept = w_mean;
        model.innovation_variance =
            std::max(css_loss({}, {}, w_mean, w) / std::max(1, n_eff),
                     std::numeric_limits<double>::min());
        return model;
    }

    SimplexResult best = nelder_mead(objective, start, 0.1, options.max_iterations * dim,
                                     options.tolerance);
    unpack(best.x, phi, theta, c);

    model.ar_coeffs = std::move(phi);
    model.ma_coeffs = std::move(theta);
    model.intercept = c;
    model.innovation_variance =
        std::max(best.value / std::max(1, n_eff), std::numeric_limits<double>::min());
    model.converged = best.converged;
    if (!best.converged) {
        model.warnings.push_back("CSS minimizer hit the iteration cap; returning best point");
    }
    model.stationary = ar_polynomial_stationary(model.ar_coeffs);
    if (!model.stationary) {
        model.warnings.push_back("fitted AR polynomial has roots inside the unit circle");
    }
    return model;
}

ArimaOrder select_order(const std::vector<double>& series, int max_p, int max_d, int max_q,
                        const FitOptions& options) {
    if (max_p < 0 || max_d < 0 || max_q < 0) throw ConfigError("order maxima must be >= 0");
    FitOptions opts = options;
    opts.max_p = std::max(opts.max_p, max_p);
    opts.max_d = std::max(opts.max_d, max_d);
    opts.max_q = std::max(opts.max_q, max_q);

    bool found = false;
    ArimaOrder best_order;
    double best_aic = std::numeric_limits<double>::infinity();
    int best_pq = 0, best_d = 0;

    for (int d = 0; d <= max_d; ++d) {
        for (int p = 0; p <= max_p; ++p) {
            for (int q = 0; q <= max_q; ++q) {
                if (p + q < 1 && d < 1) continue; // empty model
                const ArimaOrder order{p, d, q};
                const std::size_t min_len = 10 * static_cast<std::size_t>(p + q + 1) + d;
                if (series.size() < min_len) {
                    throw TooShort("series too short for candidate order (" +
                                   std::to_string(p) + "," + std::to_string(d) + "," +
                                   std::to_string(q) + ")");
                }
                const ArimaModel m = fit(series, order, opts);
                const std::vector<double> w = difference(series, d);
                const int n_eff = static_cast<int>(w.size()) - std::max(p, q);
                const double css = css_loss(m.ar_coeffs, m.ma_coeffs, m.intercept, w);
                const double aic =
                    n_eff * std::log(std::max(css / n_eff, 1e-300)) + 2.0 * (p + q + 1);
                const bool better =
                    !found || aic < best_aic ||
                    (aic == best_aic &&
                     (p + q < best_pq || (p + q == best_pq && d < best_d)));
                if (better) {
                    found = true;
                    best_aic = aic;
                    best_order = order;
                    best_pq = p + q;
                    best_d = d;
                }
            }
        }
    }
    return best_order;
}

std::vector<double> forecast(const ArimaModel& model, const std::vector<double>& history,
                             int horizon) {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    const int p = model.order.p, d = model.order.d, q = model.order.q;
    if (history.size() < static_cast<std::size_t>(p + d)) {
        throw TooShort("history length " + std::to_string(history.size()) +
                       " < p + d = " + std::to_string(p + d));
    }

    const std::vector<double> w = difference(history, d);
    const std::vector<double> resid = css_residuals(model, w);

    // Extended differenced series: observed values then forecasts.
    std::vector<double> wx = w;
    std::vector<double> ex = resid;
    wx.reserve(w.size() + horizon);
    ex.reserve(w.size() + horizon);
    for (int hstep = 0; hstep < horizon; ++hstep) {
        const int t = static_cast<int>(wx.size());
        double value = model.intercept;
        for (int i = 0; i < p; ++i) {
            if (t - 1 - i >= 0) value += model.ar_coeffs[i] * wx[t - 1 - i];
        }
        for (int j = 0; j < q; ++j) {
            if (t - 1 - j >= 0) value += model.ma_coeffs[j] * ex[t - 1 - j];
        }
        wx.push_back(value);
        ex.push_back(0.0); // future innovations at their expectation
    }

    // Integrate back d times using the running tails of each difference level.
    std::vector<double> tails(d);
    {
        std::vector<double> level = history;
        for (int j = 0; j < d; ++j) {
            tails[j] = level.back();
            level = difference(level, 1);
        }
    }
    std::vector<double> out(horizon);
    for (int hstep = 0; hstep < horizon; ++hstep) {
        double v = wx[w.size() + hstep];
        for (int j = d - 1; j >= 0; --j) {
            v += tails[j];
            tails[j] = v;
        }
        out[hstep] = v;
    }
    return out;
}

// --- serialization ----------------------------------------------------

std::string ArimaModel::to_json_string() const {
    json j;
    j["order"] = {{"p", order.p}, {"d", order.d}, {"q", order.q}};
    j["ar_coeffs"] = ar_coeffs;
    j["ma_coeffs"] = ma_coeffs;
    j["intercept"] = intercept;
    j["innovation_variance"] = innovation_variance;
    j["fitted_on_length"] = fitted_on_length;
    j["converged"] = converged;
    j["stationary"] = stationary;
    j["warnings"] = warnings;
    return j.dump(2);
}

ArimaModel ArimaModel::from_json_string(const std::string& text) {
    json j = json::parse(text);
    ArimaModel m;
    m.order.p = j.at("order").at("p").get<int>();
    m.order.d = j.at("order").at("d").get<int>();
    m.order.q = j.at("order").at("q").get<int>();
    m.ar_coeffs = j.at("ar_coeffs").get<std::vector<double>>();
    m.ma_coeffs = j.at("ma_coeffs").get<std::vector<double>>();
    if (m.ar_coeffs.size() != static_cast<std::size_t>(m.order.p) ||
        m.ma_coeffs.size() != static_cast<std::size_t>(m.order.q)) {
        throw DimensionMismatch("coefficient lengths do not match the stored order");
    }
    m.intercept = j.at("intercept").get<double>();
    m.innovation_variance = j.at("innovation_variance").get<double>();
    m.fitted_on_length = j.at("fitted_on_length").get<std::int64_t>();
    m.converged = j.at("converged").get<bool>();
    m.stationary = j.at("stationary").get<bool>();
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    return m;
}

} // namespace arima
} // namespace sea
