#include "sea/loess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace sea {

namespace {

double tricube(double u) {
    const double a = std::abs(u);
    if (a >= 1.0) return 0.0;
    const double t = 1.0 - a * a * a;
    return t * t * t;
}

// Solves the (degree+1)x(degree+1) normal equations by Gaussian elimination
// with partial pivoting. Returns false when the system is rank-deficient
// relative to its own scale.
bool solve_normal(std::array<std::array<double, 3>, 3>& m, std::array<double, 3>& rhs, int dim) {
    double scale = 0.0;
    for (int r = 0; r < dim; ++r) scale = std::max(scale, std::abs(m[r][r]));
    if (scale == 0.0) return false;
    const double tol = scale * 1e-12;

    for (int col = 0; col < dim; ++col) {
        int pivot = col;
        for (int r = col + 1; r < dim; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        }
        if (std::abs(m[pivot][col]) < tol) return false;
        if (pivot != col) {
            std::swap(m[pivot], m[col]);
            std::swap(rhs[pivot], rhs[col]);
        }
        for (int r = col + 1; r < dim; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < dim; ++c) m[r][c] -= f * m[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int col = dim - 1; col >= 0; --col) {
        double acc = rhs[col];
        for (int c = col + 1; c < dim; ++c) acc -= m[col][c] * rhs[c];
        rhs[col] = acc / m[col][col];
    }
    return true;
}

} // namespace

void LoessParams::validate(std::size_t n_points) const {
    if (degree < 0 || degree > 2) {
        throw ConfigError("loess degree must be 0, 1 or 2, got " + std::to_string(degree));
    }
    if (span % 2 == 0 || span < degree + 2) {
        throw ConfigError("loess span must be odd and >= degree + 2, got " +
                          std::to_string(span));
    }
    if (!external_weights.empty() && external_weights.size() != n_points) {
        throw LengthMismatch("external weights (" + std::to_string(external_weights.size()) +
                             ") must match data length (" + std::to_string(n_points) + ")");
    }
    for (double w : external_weights) {
        if (!(w >= 0.0 && w <= 1.0)) {
            throw ConfigError("external weights must lie in [0, 1]");
        }
    }
}

std::vector<double> loess_smooth(const std::vector<double>& xs, const std::vector<double>& ys,
                                 const LoessParams& params,
                                 const std::vector<double>& eval_points,
                                 LoessDiagnostics* diag) {
    const std::size_t n = xs.size();
    if (ys.size() != n) {
        throw LengthMismatch("xs (" + std::to_string(n) + ") and ys (" +
                             std::to_string(ys.size()) + ") differ in length");
    }
    params.validate(n);
    if (n < static_cast<std::size_t>(params.span)) {
        throw InsufficientData("need at least span=" + std::to_string(params.span) +
                               " points, got " + std::to_string(n));
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(xs[i] > xs[i - 1])) {
            throw ConfigError("xs must be strictly increasing");
        }
    }

    const int span = params.span;
    const int dim = params.degree + 1;
    const bool has_ext = !params.external_weights.empty();

    std::vector<double> out(eval_points.size());
    std::vector<double> w(static_cast<std::size_t>(span));

    for (std::size_t e = 0; e < eval_points.size(); ++e) {
        const double x0 = eval_points[e];

        // Contiguous window of the `span` nearest points.
        std::size_t lo = std::lower_bound(xs.begin(), xs.end(), x0) - xs.begin();
        std::size_t s = lo > static_cast<std::size_t>(span / 2) ? lo - span / 2 : 0;
        s = std::min(s, n - span);
        while (s > 0 && x0 - xs[s - 1] < xs[s + span - 1] - x0) --s;
        while (s + span < n && xs[s + span] - x0 < x0 - xs[s]) ++s;

        const double h = std::max(x0 - xs[s], xs[s + span - 1] - x0);

        double wsum = 0.0;
        for (int k = 0; k < span; ++k) {
            double wk = h > 0.0 ? tricube((xs[s + k] - x0) / h) : 1.0;
            if (has_ext) wk *= params.external_weights[s + k];
            w[k] = wk;
            wsum += wk;
        }

        // Weighted least squares on the basis (x - x0)^j; value at x0 is beta0.
        std::array<std::array<double, 3>, 3> m{};
        std::array<double, 3> rhs{};
        for (int k = 0; k < span; ++k) {
            if (w[k] == 0.0) continue;
            const double dx = xs[s + k] - x0;
            const double basis[3] = {1.0, dx, dx * dx};
            for (int r = 0; r < dim; ++r) {
                for (int c = r; c < dim; ++c) m[r][c] += w[k] * basis[r] * basis[c];
                rhs[r] += w[k] * basis[r] * ys[s + k];
            }
        }
        for (int r = 1; r < dim; ++r) {
            for (int c = 0; c < r; ++c) m[r][c] = m[c][r];
        }

        if (wsum > 0.0 && solve_normal(m, rhs, dim)) {
            out[e] = rhs[0];
            continue;
        }

        // Rank-deficient: fall back to the weighted window mean.
        if (diag != nullptr) ++diag->singular_fallbacks;
        if (wsum > 0.0) {
            double acc = 0.0;
            for (int k = 0; k < span; ++k) acc += w[k] * ys[s + k];
            out[e] = acc / wsum;
        } else {
            double acc = 0.0;
            for (int k = 0; k < span; ++k) acc += ys[s + k];
            out[e] = acc / span;
        }
    }
    return out;
}

} // namespace sea
