#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sea/arima.hpp"
#include "sea/rng.hpp"

using namespace sea;
using namespace sea::arima;

namespace {

std::vector<double> simulate_ar1(double phi, double sigma, int n, std::uint64_t seed,
                                 double intercept = 0.0) {
    Rng rng(seed);
    std::vector<double> out(n);
    double y = 0.0;
    for (int t = 0; t < n + 100; ++t) { // burn-in
        y = intercept + phi * y + rng.normal(0.0, sigma);
        if (t >= 100) out[t - 100] = y;
    }
    return out;
}

std::vector<double> simulate_ma1(double theta, double sigma, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    double prev_eps = rng.normal(0.0, sigma);
    for (int t = 0; t < n; ++t) {
        const double eps = rng.normal(0.0, sigma);
        out[t] = eps + theta * prev_eps;
        prev_eps = eps;
    }
    return out;
}

} // namespace

TEST_CASE("order validation") {
    CHECK_THROWS_AS((ArimaOrder{0, 0, 0}.validate()), ConfigError);
    CHECK_THROWS_AS((ArimaOrder{6, 0, 0}.validate()), ConfigError);
    CHECK_THROWS_AS((ArimaOrder{-1, 0, 1}.validate()), ConfigError);
    CHECK_NOTHROW((ArimaOrder{0, 1, 0}.validate()));
    CHECK_NOTHROW((ArimaOrder{1, 0, 0}.validate()));
}

TEST_CASE("difference matches hand evaluation") {
    CHECK(difference({1.0, 2.0, 4.0, 7.0}, 1) == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(difference({5.0, 6.0, 8.0}, 0) == std::vector<double>{5.0, 6.0, 8.0});

    std::vector<double> line(20);
    for (int t = 0; t < 20; ++t) line[t] = 3.0 + 0.5 * t;
    for (double v : difference(line, 1)) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(difference({1.0}, 1), TooShort);
    CHECK_THROWS_AS(difference({1.0, 2.0}, 2), TooShort);
}

TEST_CASE("integrate inverts difference exactly") {
    CHECK(integrate(difference({1.0, 2.0, 4.0, 7.0}, 1), 1, {1.0}) ==
          std::vector<double>{1.0, 2.0, 4.0, 7.0});

    // cumulating a constant step from an initial value
    const auto ramp = integrate({2.0, 2.0, 2.0}, 1, {10.0});
    CHECK(ramp == std::vector<double>{10.0, 12.0, 14.0, 16.0});

    CHECK(integrate({1.0, 2.0}, 0, {}) == std::vector<double>{1.0, 2.0});
    CHECK_THROWS_AS(integrate({1.0, 2.0}, 2, {1.0}), ArityMismatch);

    Rng rng(19);
    // Dyadic-grid values keep every difference exactly representable, so
    // the round-trip must be exact; small continuous values bound the
    // representation error of the differenced series well under 1e-12.
    for (int d = 1; d <= 3; ++d) {
        std::vector<double> grid(60), smooth(24);
        for (auto& v : grid) v = std::floor(rng.uniform(-102400.0, 102400.0)) / 1024.0;
        for (auto& v : smooth) v = rng.uniform(-1.0, 1.0);
        for (const auto& x : {grid, smooth}) {
            const auto heads = std::vector<double>(x.begin(), x.begin() + d);
            const auto back = integrate(difference(x, d), d, heads);
            REQUIRE(back.size() == x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                CHECK(std::abs(back[i] - x[i]) <= 1e-12 * std::max(1.0, std::abs(x[i])));
            }
        }
    }
}

TEST_CASE("css loss matches hand recursions") {
    SUBCASE("null model sums the squares") {
        const std::vector<double> y = {1.0, -2.0, 3.0, 0.5};
        double expected = 0.0;
        for (double v : y) expected += v * v;
        CHECK(css_loss({}, {}, 0.0, y) == doctest::Approx(expected).epsilon(1e-15));
    }

    SUBCASE("an exact AR(1) recursion has zero loss at the true coefficient") {
        std::vector<double> y(30);
        y[0] = 1.0;
        for (int t = 1; t < 30; ++t) y[t] = 0.5 * y[t - 1];
        CHECK(css_loss({0.5}, {}, 0.0, y) == doctest::Approx(0.0).epsilon(1e-18));
    }

    SUBCASE("the true coefficient beats offsets of 0.3") {
        const auto y = simulate_ar1(0.5, 1.0, 1000, 4);
        const double at_true = css_loss({0.5}, {}, 0.0, y);
        CHECK(at_true < css_loss({0.2}, {}, 0.0, y));
        CHECK(at_true < css_loss({0.8}, {}, 0.0, y));
    }
}

TEST_CASE("fit recovers AR(1) and MA(1) coefficients") {
    const auto ar_data = simulate_ar1(0.7, 1.0, 2000, 11);
    const ArimaModel ar = fit(ar_data, ArimaOrder{1, 0, 0});
    REQUIRE(ar.ar_coeffs.size() == 1);
    CHECK(ar.ar_coeffs[0] >= 0.62);
    CHECK(ar.ar_coeffs[0] <= 0.78);
    CHECK(ar.innovation_variance > 0.0);
    CHECK(ar.stationary);

    const auto ma_data = simulate_ma1(0.5, 1.0, 2000, 12);
    const ArimaModel ma = fit(ma_data, ArimaOrder{0, 0, 1});
    REQUIRE(ma.ma_coeffs.size() == 1);
    CHECK(ma.ma_coeffs[0] >= 0.4);
    CHECK(ma.ma_coeffs[0] <= 0.6);
}

TEST_CASE("fit is deterministic and never regresses from its start") {
    const auto data = simulate_ar1(0.6, 1.5, 800, 23);
    const ArimaModel a = fit(data, ArimaOrder{2, 0, 1});
    const ArimaModel b = fit(data, ArimaOrder{2, 0, 1});
    CHECK(a.ar_coeffs == b.ar_coeffs);
    CHECK(a.ma_coeffs == b.ma_coeffs);
    CHECK(a.intercept == b.intercept);

    double mean = 0.0;
    for (double v : data) mean += v;
    mean /= static_cast<double>(data.size());
    const double at_start = css_loss({0.0, 0.0}, {0.0}, mean, data);
    const double at_fit = css_loss(a.ar_coeffs, a.ma_coeffs, a.intercept, data);
    CHECK(at_fit <= at_start);
}

TEST_CASE("fit on a constant series with one difference") {
    const std::vector<double> constant(120, 42.0);
    const ArimaModel m = fit(constant, ArimaOrder{0, 1, 0});
    CHECK(m.intercept == doctest::Approx(0.0).epsilon(1e-15));
    const auto fc = forecast(m, constant, 5);
    for (double v : fc) CHECK(v == doctest::Approx(42.0).epsilon(1e-12));
}

TEST_CASE("fit flags an explosive AR polynomial") {
    std::vector<double> blowup(200);
    double y = 1.0;
    for (int t = 0; t < 200; ++t) {
        blowup[t] = y;
        y *= 1.05;
    }
    const ArimaModel m = fit(blowup, ArimaOrder{1, 0, 0});
    CHECK_FALSE(m.stationary);
    CHECK_FALSE(m.warnings.empty());
}

TEST_CASE("fit rejects series that are too short") {
    const std::vector<double> tiny(15, 1.0);
    CHECK_THROWS_AS(fit(tiny, ArimaOrder{2, 0, 2}), TooShort);
}

TEST_CASE("order selection finds structure") {
    SUBCASE("strong AR(1) structure is detected") {
        const auto data = simulate_ar1(0.9, 1.0, 2000, 31);
        const ArimaOrder order = select_order(data, 3, 1, 3);
        CHECK(order.p >= 1);
        CHECK(order.d == 0);
    }

    SUBCASE("a noiseless linear trend selects differencing") {
        std::vector<double> line(300);
        for (int t = 0; t < 300; ++t) line[t] = 2.0 + 0.25 * t;
        const ArimaOrder order = select_order(line, 2, 1, 2);
        CHECK(order.d >= 1);
    }

    SUBCASE("white noise selects a minimal order via the tie-break") {
        Rng rng(47);
        std::vector<double> noise(500);
        for (auto& v : noise) v = rng.normal();
        const ArimaOrder order = select_order(noise, 1, 0, 1);
        CHECK(order.p + order.q <= 1);
    }
}

TEST_CASE("forecasts match hand recursions") {
    SUBCASE("random walk carries the last value forward") {
        ArimaModel m;
        m.order = ArimaOrder{0, 1, 0};
        m.intercept = 0.0;
        m.innovation_variance = 1.0;
        const auto fc = forecast(m, {3.0, 5.0, 4.5, 7.25}, 4);
        for (double v : fc) CHECK(v == doctest::Approx(7.25).epsilon(1e-15));
    }

    SUBCASE("AR(1) halves toward zero") {
        ArimaModel m;
        m.order = ArimaOrder{1, 0, 0};
        m.ar_coeffs = {0.5};
        m.intercept = 0.0;
        m.innovation_variance = 1.0;
        const auto fc = forecast(m, {1.0, 2.0, 8.0}, 3);
        CHECK(fc[0] == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(fc[1] == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(fc[2] == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("the mean model forecasts its intercept") {
        ArimaModel m;
        m.order = ArimaOrder{0, 0, 0};
        m.intercept = 6.5;
        m.innovation_variance = 1.0;
        const auto fc = forecast(m, {1.0, 2.0, 3.0}, 5);
        for (double v : fc) CHECK(v == 6.5);
    }

    SUBCASE("long-horizon AR(1) converges to intercept / (1 - phi)") {
        ArimaModel m;
        m.order = ArimaOrder{1, 0, 0};
        m.ar_coeffs = {0.9};
        m.intercept = 0.5;
        m.innovation_variance = 1.0;
        const auto fc = forecast(m, {0.0, 1.0, 2.0}, 200);
        CHECK(std::abs(fc.back() - 0.5 / (1.0 - 0.9)) <= 1e-6);
    }

    SUBCASE("history shorter than p + d is rejected") {
        ArimaModel m;
        m.order = ArimaOrder{2, 1, 0};
        m.ar_coeffs = {0.5, 0.1};
        m.innovation_variance = 1.0;
        CHECK_THROWS_AS(forecast(m, {1.0, 2.0}, 3), TooShort);
    }
}

TEST_CASE("an MA(1) forecast uses the last residual once") {
    // With theta known and history generated exactly, the one-step forecast
    // is theta * eps_n and the two-step forecast is the intercept (zero).
    ArimaModel m;
    m.order = ArimaOrder{0, 0, 1};
    m.ma_coeffs = {0.5};
    m.intercept = 0.0;
    m.innovation_variance = 1.0;
    // residual recursion with presample zero: eps_t = y_t - 0.5 * eps_{t-1}
    const std::vector<double> history = {1.0, 0.0, 2.0};
    // eps = [1, -0.5, 2.25]
    const auto fc = forecast(m, history, 2);
    CHECK(fc[0] == doctest::Approx(0.5 * 2.25).epsilon(1e-12));
    CHECK(fc[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("model serialization round-trips") {
    const auto data = simulate_ar1(0.7, 1.0, 400, 53);
    const ArimaModel m = fit(data, ArimaOrder{1, 0, 1});
    const ArimaModel back = ArimaModel::from_json_string(m.to_json_string());
    CHECK(back.ar_coeffs == m.ar_coeffs);
    CHECK(back.ma_coeffs == m.ma_coeffs);
    CHECK(back.intercept == m.intercept);
    CHECK(back.innovation_variance == m.innovation_variance);
    CHECK(back.order.p == 1);
    CHECK(back.order.q == 1);

    const auto fa = forecast(m, data, 10);
    const auto fb = forecast(back, data, 10);
    for (std::size_t i = 0; i < fa.size(); ++i) CHECK(fa[i] == fb[i]);
}
