#ifndef SEA_LOESS_HPP
#define SEA_LOESS_HPP

#include <cstddef>
#include <vector>

#include "sea/errors.hpp"

namespace sea {

// Parameters of the locally weighted regression smoother.
struct LoessParams {
    int span = 7;   // window width in points; odd, >= degree + 2
    int degree = 1; // 0, 1 or 2
    // Optional per-data-point robustness weights in [0, 1]; empty means all 1.
    std::vector<double> external_weights;

    void validate(std::size_t n_points) const;
};

// Counters for events the smoother recovers from internally.
struct LoessDiagnostics {
    std::size_t singular_fallbacks = 0;
};

// Smooths (xs, ys) at each evaluation point by fitting a weighted
// least-squares polynomial over the `span` nearest neighbours with tricube
// weights w(u) = (1 - |u|^3)^3, u = distance / max distance in window,
// multiplied by the external weights when supplied. The local basis is
// centred at the evaluation point, so the fitted value is the constant
// coefficient. Rank-deficient fits fall back to the weighted window mean
// and are counted in `diag` when provided.
//
// xs must be strictly increasing and len(xs) == len(ys) >= span.
std::vector<double> loess_smooth(const std::vector<double>& xs, const std::vector<double>& ys,
                                 const LoessParams& params,
                                 const std::vector<double>& eval_points,
                                 LoessDiagnostics* diag = nullptr);

} // namespace sea

#endif // SEA_LOESS_HPP
