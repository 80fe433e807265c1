#ifndef SEA_ARIMA_HPP
#define SEA_ARIMA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sea/errors.hpp"

namespace sea {
namespace arima {

struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;

    // Rejects the empty model and orders above the configured maxima.
    void validate(int max_p = 5, int max_d = 2, int max_q = 5) const;
};

struct ArimaModel {
    ArimaOrder order;
    std::vector<double> ar_coeffs; // phi, length p
    std::vector<double> ma_coeffs; // theta, length q
    double intercept = 0.0;
    double innovation_variance = 0.0;
    std::int64_t fitted_on_length = 0;
    bool converged = true;
    bool stationary = true; // AR polynomial roots outside the unit circle
    std::vector<std::string> warnings;

    std::string to_json_string() const;
    static ArimaModel from_json_string(const std::string& text);
};

// Applies the first-difference operator d times; output length = n - d.
std::vector<double> difference(const std::vector<double>& series, int d);

// Inverse of difference: initial_values are the d dropped leading values
// of the original series.
std::vector<double> integrate(const std::vector<double>& diffed, int d,
                              const std::vector<double>& initial_values);

// Conditional sum of squares: residuals computed recursively with presample
// values zeroed, summed over t >= max(p, q).
double css_loss(const std::vector<double>& ar_coeffs, const std::vector<double>& ma_coeffs,
                double intercept, const std::vector<double>& series);

struct FitOptions {
    int max_iterations = 2000;
    double tolerance = 1e-10;
    int max_p = 5;
    int max_d = 2;
    int max_q = 5;
};

// CSS fit: differences d times, then minimizes css_loss over
// (phi, theta, intercept) with a Nelder-Mead simplex started from zero
// coefficients and the differenced-series mean. Deterministic.
ArimaModel fit(const std::vector<double>& series, ArimaOrder order,
               const FitOptions& options = {});

// Grid search over all valid (p, d, q) up to the maxima, minimizing
// AIC = n_eff * ln(css / n_eff) + 2 * (p + q + 1); ties broken by smaller
// p + q, then smaller d.
ArimaOrder select_order(const std::vector<double>& series, int max_p, int max_d, int max_q,
                        const FitOptions& options = {});

// Recursive expectation forecasts on the differenced scale (future
// innovations zero, past ones from in-sample residuals), integrated back
// using the last d history values.
std::vector<double> forecast(const ArimaModel& model, const std::vector<double>& history,
                             int horizon);

} // namespace arima
} // namespace sea

#endif // SEA_ARIMA_HPP
