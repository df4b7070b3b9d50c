#include "follmer/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "follmer/normal.hpp"

namespace follmer {

namespace {

struct PathScratch {
    QPathStepper stepper;
    std::uint64_t seed;
};

std::vector<std::size_t> checkpoint_nodes(std::span<const double> t_values, double dt,
                                          std::size_t* max_node) {
    if (t_values.empty()) throw std::invalid_argument("checkpoint_nodes: no checkpoint times");
    std::vector<std::size_t> nodes;
    *max_node = 0;
    for (const double t : t_values) {
        const TimeGrid probe(0.0, dt, static_cast<std::size_t>(t / dt) + 2);
        const std::size_t node = probe.index_of(t);
        if (node == 0) throw std::invalid_argument("checkpoint_nodes: t must be positive");
        nodes.push_back(node);
        *max_node = std::max(*max_node, node);
    }
    return nodes;
}

} // namespace

McEstimate mass_loss(const HarmonicReciprocalModel& model, double t, std::size_t n_paths,
                     std::uint64_t seed, std::size_t workers) {
    if (!(t > 0.0)) throw std::invalid_argument("mass_loss: t must be positive");
    const std::size_t dim = model.dimension;
    const std::vector<double> start = model.canonical_start;
    if (start.size() != dim) throw std::invalid_argument("mass_loss: model has no canonical start");
    const double root_t = std::sqrt(t);

    struct Scratch {
        std::vector<double> point;
        std::uint64_t seed;
    };
    return run_monte_carlo<Scratch>(
        n_paths, workers,
        [dim, seed] {
            return Scratch{std::vector<double>(dim), seed};
        },
        [&model, &start, root_t, dim](std::size_t path_index, Scratch& scratch) {
            PhiloxStream rng(scratch.seed, path_index);
            for (std::size_t d = 0; d < dim; ++d) {
                scratch.point[d] = start[d] + root_t * rng.gaussian();
            }
            const double h = model.h(scratch.point);
            return h > 0.0 ? 1.0 / h : 0.0;  // the zero set is Lebesgue-null
        });
}

double inverse_bessel3_mass_oracle(double t) {
    return 2.0 * normal_cdf(1.0 / std::sqrt(t)) - 1.0;
}

double inverse_bessel3_explosion_oracle(double t) {
    return 2.0 * (1.0 - normal_cdf(1.0 / std::sqrt(t)));
}

SurvivalResult survival_q(const HarmonicReciprocalModel& model,
                          std::span<const double> t_values, double dt, std::size_t n_paths,
                          std::uint64_t seed, std::size_t workers, const QPathOptions& options) {
    std::size_t max_node = 0;
    const std::vector<std::size_t> nodes = checkpoint_nodes(t_values, dt, &max_node);
    const std::vector<double> start = model.canonical_start;

    auto estimates = run_monte_carlo_multi<PathScratch>(
        n_paths, nodes.size(), workers,
        [&model, dt, &options, seed] {
            return PathScratch{QPathStepper(model, dt, options), seed};
        },
        [&nodes, max_node, &start](std::size_t path_index, PathScratch& scratch,
                                   std::span<double> out) {
            PhiloxStream rng(scratch.seed, path_index);
            QPathStepper& stepper = scratch.stepper;
            stepper.reset(start);
            while (stepper.node() < max_node && !stepper.stopped()) {
                stepper.step(rng);
            }
            const std::size_t stop_node =
                stepper.stopped() ? stepper.stop_node() : SamplePath::kNoStop;
            for (std::size_t j = 0; j < nodes.size(); ++j) {
                out[j] = stop_node > nodes[j] ? 1.0 : 0.0;
            }
        });

    SurvivalResult result;
    result.t_values.assign(t_values.begin(), t_values.end());
    result.survival = std::move(estimates);
    return result;
}

DensityCheckResult density_identity_check(const HarmonicReciprocalModel& model, double t,
                                          double c, double dt, std::size_t n_paths,
                                          std::uint64_t seed, std::size_t workers,
                                          const QPathOptions& options) {
    std::size_t target_node = 0;
    const std::vector<std::size_t> nodes = checkpoint_nodes(std::span(&t, 1), dt, &target_node);
    const std::vector<double> start = model.canonical_start;

    McEstimate estimate = run_monte_carlo<PathScratch>(
        n_paths, workers,
        [&model, dt, &options, seed] {
            return PathScratch{QPathStepper(model, dt, options), seed};
        },
        [target_node, &start, &model, c](std::size_t path_index, PathScratch& scratch) {
            PhiloxStream rng(scratch.seed, path_index);
            QPathStepper& stepper = scratch.stepper;
            stepper.reset(start);
            while (stepper.node() < target_node && !stepper.stopped()) {
                stepper.step(rng);
            }
            if (stepper.stopped()) return 0.0;  // the density h(Y) 1{survival} vanished
            const auto y = stepper.state();
            if (y[0] < c) return 0.0;
            return model.h(y);
        });

    DensityCheckResult result;
    result.estimate = estimate;
    result.t = t;
    result.c = c;
    result.oracle = 1.0 - normal_cdf((c - start[0]) / std::sqrt(t));
    return result;
}

NoJumpReport no_jump_to_infinity_check(const HarmonicReciprocalModel& model, double t,
                                       std::span<const double> thresholds,
                                       double dt_for_thresholds, std::span<const double> dts,
                                       double threshold_for_dts, std::size_t n_paths,
                                       std::uint64_t seed) {
    NoJumpReport report;
    const std::vector<double> start = model.canonical_start;

    auto sweep = [&](double threshold, double dt, std::vector<double>* stopped_h,
                     std::size_t* far_count, std::size_t* stop_count) {
        QPathOptions options;
        options.threshold = threshold;
        QPathStepper stepper(model, dt, options);
        std::size_t horizon = 0;
        (void)checkpoint_nodes(std::span(&t, 1), dt, &horizon);
        for (std::size_t path = 0; path < n_paths; ++path) {
            PhiloxStream rng(seed, path);
            stepper.reset(start);
            double h_before = model.h(stepper.state());
            while (stepper.node() < horizon && !stepper.stopped()) {
                const double h_here = model.h(stepper.state());
                stepper.step(rng);
                h_before = h_here;
            }
            if (!stepper.stopped()) continue;  // no stop, no value
            ++*stop_count;
            if (stopped_h) stopped_h->push_back(model.h(stepper.stop_state()));
            if (far_count && h_before > 10.0 * threshold) ++*far_count;
        }
    };

    for (const double threshold : thresholds) {
        std::vector<double> stopped_h;
        std::size_t stop_count = 0;
        sweep(threshold, dt_for_thresholds, &stopped_h, nullptr, &stop_count);
        double median = 0.0;
        if (!stopped_h.empty()) {
            std::nth_element(stopped_h.begin(), stopped_h.begin() + stopped_h.size() / 2,
                             stopped_h.end());
            median = stopped_h[stopped_h.size() / 2];
        }
        report.by_threshold.push_back({threshold, median, stop_count});
    }

    for (const double dt : dts) {
        std::size_t far_count = 0;
        std::size_t stop_count = 0;
        sweep(threshold_for_dts, dt, nullptr, &far_count, &stop_count);
        const double fraction =
            stop_count > 0 ? static_cast<double>(far_count) / static_cast<double>(stop_count) : 0.0;
        report.by_step.push_back({dt, fraction, stop_count});
    }
    return report;
}

} // namespace follmer
