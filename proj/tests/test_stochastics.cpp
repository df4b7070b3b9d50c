#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "follmer/measures.hpp"
#include "follmer/models.hpp"
#include "follmer/rng.hpp"
#include "follmer/stochastics.hpp"

using namespace follmer;

TEST_CASE("brownian increments have the right scale and replay bitwise") {
    const TimeGrid grid(0.0, 1e-3, 1000);
    const std::array<double, 2> start = {1.0, -2.0};
    PhiloxStream rng_a(11, 0), rng_b(11, 0);
    const SamplePath path = sample_brownian_path(rng_a, grid, start);
    const SamplePath replay = sample_brownian_path(rng_b, grid, start);
    CHECK(path.states == replay.states);
    CHECK(path.state(0)[0] == 1.0);
    CHECK(path.state(0)[1] == -2.0);

    // Quadratic variation per coordinate concentrates at t = 1.
    for (std::size_t d = 0; d < 2; ++d) {
        double qv = 0.0;
        for (std::size_t k = 0; k < grid.n_steps(); ++k) {
            const double inc = path.state(k + 1)[d] - path.state(k)[d];
            qv += inc * inc;
        }
        CHECK(qv == doctest::Approx(1.0).epsilon(0.15));  // sd ~ sqrt(2/1000)
    }
}

TEST_CASE("left-point stochastic integral satisfies the discrete identity") {
    // sum X_k dX_k = (X_T^2 - X_0^2 - [X]_T) / 2 exactly, term by term.
    const TimeGrid grid(0.0, 1e-3, 1000);
    const std::array<double, 1> start = {0.5};
    PhiloxStream rng(17, 3);
    const SamplePath path = sample_brownian_path(rng, grid, start);
    const double integral = stochastic_integral(path, [](double, double x) { return x; });
    double qv = 0.0;
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        const double inc = path.state(k + 1)[0] - path.state(k)[0];
        qv += inc * inc;
    }
    const double x0 = path.state(0)[0];
    const double xT = path.state(grid.n_steps())[0];
    CHECK(std::abs(integral - 0.5 * (xT * xT - x0 * x0 - qv)) < 1e-10);
}

TEST_CASE("transformed dynamics: survival frequency matches the oracle") {
    // Q(stop > 0.5) = 2 Phi(1/sqrt(0.5)) - 1 = 0.8427008.
    const double oracle = 0.84270079294971487;
    const auto model = inverse_bessel3();
    const TimeGrid grid(0.0, 1e-3, 500);
    std::size_t survived = 0;
    const std::size_t n = 2000;
    SamplePath path;
    for (std::size_t i = 0; i < n; ++i) {
        PhiloxStream rng(5150, i);
        simulate_q_path_into(path, rng, model, grid, model.canonical_start);
        if (!path.stopped() || path.stop_index > grid.n_steps()) ++survived;
    }
    const double frequency = static_cast<double>(survived) / static_cast<double>(n);
    const double se = std::sqrt(oracle * (1.0 - oracle) / static_cast<double>(n));
    CHECK(std::abs(frequency - oracle) < 3.0 * se + 0.01);
}

TEST_CASE("embedded model stops at the same rate as the radial one") {
    const double oracle = 0.84270079294971487;
    const auto model = embedded_bessel4(1.0, 1.0);
    const TimeGrid grid(0.0, 1e-3, 500);
    std::size_t survived = 0;
    const std::size_t n = 2000;
    SamplePath path;
    for (std::size_t i = 0; i < n; ++i) {
        PhiloxStream rng(5150, i);
        simulate_q_path_into(path, rng, model, grid, model.canonical_start);
        if (!path.stopped()) ++survived;
    }
    const double frequency = static_cast<double>(survived) / static_cast<double>(n);
    const double se = std::sqrt(oracle * (1.0 - oracle) / static_cast<double>(n));
    CHECK(std::abs(frequency - oracle) < 3.0 * se + 0.01);
}

TEST_CASE("h of the stopped transformed path is a martingale at 1") {
    // The radial part of the transformed dynamics is a scalar Brownian
    // motion absorbed near 0, so E[h(Y_{t and stop})] stays at h(start) = 1.
    const auto model = inverse_bessel3();
    const TimeGrid grid(0.0, 1e-3, 1000);
    const std::size_t n = 2000;
    double sum = 0.0, sum2 = 0.0;
    SamplePath path;
    for (std::size_t i = 0; i < n; ++i) {
        PhiloxStream rng(31337, i);
        simulate_q_path_into(path, rng, model, grid, model.canonical_start);
        const double value = path.stopped() ? model.h(path.state(path.stop_index))
                                            : model.h(path.state(grid.n_steps()));
        sum += value;
        sum2 += value * value;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0) < 3.0 * se + 0.01);
}

TEST_CASE("stopped state is pinned at the threshold, and the path continues") {
    const auto model = inverse_bessel3();
    QPathOptions options;
    options.threshold = 1e-2;  // stop often enough to find cases quickly
    const TimeGrid grid(0.0, 1e-3, 2000);
    SamplePath path;
    std::size_t found = 0;
    for (std::size_t i = 0; i < 400 && found < 25; ++i) {
        PhiloxStream rng(8080, i);
        simulate_q_path_into(path, rng, model, grid, model.canonical_start, options);
        if (!path.stopped() || path.stop_index > grid.n_steps()) continue;
        ++found;
        const double h_stop = model.h(path.state(path.stop_index));
        CHECK(h_stop <= options.threshold);
        CHECK(h_stop > 0.0);
        // Substep-resolved stop time lies inside the stop node's step.
        CHECK(path.stop_time <= grid.node(path.stop_index) + 1e-12);
        CHECK(path.stop_time > grid.node(path.stop_index) - grid.dt() - 1e-12);
        // The continuation after the stop is a plain Brownian tail: later
        // nodes exist and generally move away from the held state.
        if (path.stop_index + 2 <= grid.n_steps()) {
            const auto held = path.state(path.stop_index);
            const auto later = path.state(path.stop_index + 2);
            double moved = 0.0;
            for (std::size_t d = 0; d < 3; ++d) moved += std::abs(later[d] - held[d]);
            CHECK(moved > 0.0);
        }
    }
    CHECK(found >= 25);
}

TEST_CASE("tanaka local time from 0 and from 1 match folded-normal means") {
    const TimeGrid grid(0.0, 1e-3, 1000);
    const std::size_t n = 2000;
    // E L_1 from 0 is sqrt(2/pi) = 0.79788; from 1 it is 0.16663.
    for (const auto& [x0, oracle] : std::vector<std::pair<double, double>>{
             {0.0, 0.79788456080286536}, {1.0, 0.1666309411753726}}) {
        double sum = 0.0, sum2 = 0.0;
        const std::array<double, 1> start = {x0};
        SamplePath path;
        for (std::size_t i = 0; i < n; ++i) {
            PhiloxStream rng(404, i);
            sample_brownian_path_into(path, rng, grid, start);
            const LocalTimePath local = local_time_tanaka(path);
            const double value = local.values.back();
            sum += value;
            sum2 += value * value;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum2 / n - mean * mean) / n);
        // The discrete estimator is biased low by O(sqrt(dt)).
        CHECK(std::abs(mean - oracle) < 3.0 * se + 0.03);
        CHECK(mean < oracle + 3.0 * se);  // bias direction
    }
}

TEST_CASE("local time estimators are nondecreasing and agree in the mean") {
    const TimeGrid grid(0.0, 1e-3, 1000);
    const std::array<double, 1> start = {0.0};
    const std::size_t n = 200;
    double tanaka_sum = 0.0, occupation_sum = 0.0;
    SamplePath path;
    for (std::size_t i = 0; i < n; ++i) {
        PhiloxStream rng(606, i);
        sample_brownian_path_into(path, rng, grid, start);
        const LocalTimePath tanaka = local_time_tanaka(path);
        const LocalTimePath occupation = local_time_occupation(path);
        for (std::size_t k = 0; k < grid.n_steps(); ++k) {
            CHECK(tanaka.values[k + 1] >= tanaka.values[k]);
            CHECK(occupation.values[k + 1] >= occupation.values[k]);
        }
        tanaka_sum += tanaka.values.back();
        occupation_sum += occupation.values.back();
    }
    CHECK(std::abs(tanaka_sum / n - occupation_sum / n) < 0.06);
}

TEST_CASE("substep control rejects bad parameters") {
    const auto model = inverse_bessel3();
    CHECK_THROWS_AS(QPathStepper(model, 0.0), std::invalid_argument);
    QPathOptions bad;
    bad.threshold = 0.0;
    CHECK_THROWS_AS(QPathStepper(model, 1e-3, bad), std::invalid_argument);
    bad.threshold = 1e-3;
    bad.substep_safety = -1.0;
    CHECK_THROWS_AS(QPathStepper(model, 1e-3, bad), std::invalid_argument);
    // Starting on the stopping level stops immediately.
    QPathStepper stepper(model, 1e-3);
    const std::array<double, 3> tiny = {1e-4, 0.0, 0.0};
    stepper.reset(tiny);
    CHECK(stepper.stopped());
    CHECK(stepper.stop_node() == 0);
}
