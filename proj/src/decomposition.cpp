#include "follmer/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "follmer/measures.hpp"
#include "follmer/ukernel.hpp"

namespace follmer {

namespace {

double signum(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

} // namespace

double lambda_density(double t) {
    if (!(t > 0.0)) throw std::invalid_argument("lambda_density: t must be positive");
    return std::sqrt(2.0 / (std::numbers::pi * t));
}

DecompositionRecord project_path(const SamplePath& path, std::size_t coordinate) {
    if (coordinate >= path.dimension) {
        throw std::invalid_argument("project_path: coordinate out of range");
    }
    if (path.grid.t_start() != 0.0) {
        throw std::invalid_argument("project_path: grid must start at t = 0");
    }

    const std::size_t n_nodes = path.grid.n_nodes();
    DecompositionRecord record;
    record.grid = path.grid;
    record.stop_index = path.stop_index;
    record.shrunk.resize(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k) {
        record.shrunk[k] = path.state(k)[coordinate];
    }
    if (record.shrunk[0] == 0.0) {
        throw std::invalid_argument("project_path: projected coordinate must not start at 0");
    }

    record.surface.resize(n_nodes);
    record.surface[0] = 1.0 / std::abs(record.shrunk[0]);  // t -> 0 limit of the kernel
    for (std::size_t k = 1; k < n_nodes; ++k) {
        const double t = record.grid.node(k);
        const double x = record.shrunk[k];
        record.surface[k] = x == 0.0 ? u_kernel_at_zero(t) : u_kernel(t, x);
    }

    record.local_time = local_time_tanaka(path, coordinate);
    // Freeze the local time at the stop: past it the path is an auxiliary
    // Brownian continuation whose zero visits must not feed the drift or
    // singular parts.
    const std::size_t freeze = std::min(record.stop_index, n_nodes - 1);
    for (std::size_t k = freeze + 1; k < n_nodes; ++k) {
        record.local_time.values[k] = record.local_time.values[freeze];
    }

    record.drift_part.assign(n_nodes, 0.0);
    record.lambda.assign(n_nodes, 0.0);
    record.lambda_general.assign(n_nodes, 0.0);
    for (std::size_t k = 0; k + 1 < n_nodes; ++k) {
        const double d_local = record.local_time.values[k + 1] - record.local_time.values[k];
        const double t_right = record.grid.node(k + 1);
        const double d_drift = d_local / t_right;
        record.drift_part[k + 1] = record.drift_part[k] + d_drift;
        record.lambda[k + 1] = record.lambda[k] + lambda_density(t_right) * d_local;
        // General increment rule dLambda = dA / S, read at the increment's
        // right node; identical to the closed density when S sits at its
        // on-the-zero-set value.
        record.lambda_general[k + 1] =
            record.lambda_general[k] + (d_drift == 0.0 ? 0.0 : d_drift / record.surface[k + 1]);
    }
    return record;
}

double ito_tanaka_residual(const DecompositionRecord& record) {
    const std::size_t m = std::min(record.stop_index, record.grid.n_steps());
    double integral = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double x = record.shrunk[j];
        double slope;
        if (j == 0) {
            slope = -signum(x) / (x * x);  // t -> 0 limit of the space derivative
        } else if (x == 0.0) {
            slope = 0.0;  // symmetric convention at the kink
        } else {
            slope = u_kernel_dx(record.grid.node(j), x);
        }
        integral += slope * (record.shrunk[j + 1] - record.shrunk[j]);
    }
    return record.surface[m] - record.surface[0] - integral + record.drift_part[m];
}

LambdaSupportStats lambda_support_stats(const DecompositionRecord& record, double eps) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("lambda_support_stats: eps must be positive");
    }
    const std::size_t m = std::min(record.stop_index, record.grid.n_steps());
    LambdaSupportStats out;
    out.total_mass = record.lambda[m];
    double away_mass = 0.0;
    std::size_t occupied = 0;
    for (std::size_t j = 0; j < m; ++j) {
        const double increment = record.lambda[j + 1] - record.lambda[j];
        const double closest =
            std::min(std::abs(record.shrunk[j]), std::abs(record.shrunk[j + 1]));
        if (closest > eps) away_mass += increment;
        if (std::abs(record.shrunk[j]) <= eps) ++occupied;
    }
    if (out.total_mass > 0.0) out.support_fraction = away_mass / out.total_mass;
    if (m > 0) out.occupation_fraction = static_cast<double>(occupied) / static_cast<double>(m);
    return out;
}

CompensatorResult compensator_check(const HarmonicReciprocalModel& model,
                                    std::span<const double> t_values, double dt,
                                    std::size_t n_paths, std::uint64_t seed,
                                    std::size_t workers, const QPathOptions& options) {
    if (t_values.empty()) {
        throw std::invalid_argument("compensator_check: no horizons");
    }
    std::vector<std::size_t> nodes;
    std::size_t max_node = 0;
    for (const double t : t_values) {
        const TimeGrid probe(0.0, dt, static_cast<std::size_t>(t / dt) + 2);
        const std::size_t node = probe.index_of(t);
        if (node == 0) throw std::invalid_argument("compensator_check: t must be positive");
        nodes.push_back(node);
        max_node = std::max(max_node, node);
    }
    const std::vector<double> start = model.canonical_start;

    struct Scratch {
        QPathStepper stepper;
        std::uint64_t seed;
    };
    // Two statistics per horizon: Lambda at t ∧ stop, and the stop indicator.
    auto estimates = run_monte_carlo_multi<Scratch>(
        n_paths, 2 * nodes.size(), workers,
        [&model, dt, &options, seed] {
            return Scratch{QPathStepper(model, dt, options), seed};
        },
        [&nodes, max_node, &start, dt](std::size_t path_index, Scratch& scratch,
                                       std::span<double> out) {
            PhiloxStream rng(scratch.seed, path_index);
            QPathStepper& stepper = scratch.stepper;
            stepper.reset(start);
            double prev_x = start[0];
            double raw = 0.0;
            double clamped = 0.0;
            double lambda = 0.0;
            std::size_t k = 0;
            while (k < max_node) {
                // Once stopped, Lambda is frozen and the indicator settled,
                // so the Brownian continuation never needs simulating.
                if (stepper.stopped()) break;
                ++k;
                stepper.step(rng);
                // The increment ending at node k is pre-stop even when this
                // step crossed: the held state is the crossing state.
                const double x = stepper.state()[0];
                raw += std::abs(x) - std::abs(prev_x) - signum(prev_x) * (x - prev_x);
                if (raw > clamped) {
                    lambda += lambda_density(static_cast<double>(k) * dt) * (raw - clamped);
                    clamped = raw;
                }
                prev_x = x;
                for (std::size_t j = 0; j < nodes.size(); ++j) {
                    if (nodes[j] == k) {
                        out[2 * j] = lambda;
                        out[2 * j + 1] =
                            stepper.stopped() && stepper.stop_node() <= k ? 1.0 : 0.0;
                    }
                }
            }
            for (std::size_t j = 0; j < nodes.size(); ++j) {
                if (nodes[j] > k) {
                    out[2 * j] = lambda;
                    out[2 * j + 1] = stepper.stopped() ? 1.0 : 0.0;
                }
            }
        });

    CompensatorResult result;
    result.t_values.assign(t_values.begin(), t_values.end());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        result.lambda_mean.push_back(estimates[2 * j]);
        result.explosion_fraction.push_back(estimates[2 * j + 1]);
        result.oracle.push_back(inverse_bessel3_explosion_oracle(result.t_values[j]));
    }
    return result;
}

McEstimate compensated_surface_mean(double t, double dt, std::size_t n_paths,
                                    std::uint64_t seed, std::size_t workers) {
    const TimeGrid probe(0.0, dt, static_cast<std::size_t>(t / dt) + 2);
    const std::size_t horizon = probe.index_of(t);
    if (horizon == 0) {
        throw std::invalid_argument("compensated_surface_mean: t must be positive");
    }
    const double root_dt = std::sqrt(dt);

    struct Scratch {
        std::uint64_t seed;
    };
    return run_monte_carlo<Scratch>(
        n_paths, workers,
        [seed] { return Scratch{seed}; },
        [horizon, dt, root_dt, t](std::size_t path_index, Scratch& scratch) {
            PhiloxStream rng(scratch.seed, path_index);
            double x = 1.0;
            double prev_x = x;
            double raw = 0.0;
            double clamped = 0.0;
            double lambda = 0.0;
            for (std::size_t k = 1; k <= horizon; ++k) {
                x += root_dt * rng.gaussian();
                raw += std::abs(x) - std::abs(prev_x) - signum(prev_x) * (x - prev_x);
                if (raw > clamped) {
                    lambda += lambda_density(static_cast<double>(k) * dt) * (raw - clamped);
                    clamped = raw;
                }
                prev_x = x;
            }
            const double surface = x == 0.0 ? u_kernel_at_zero(t) : u_kernel(t, x);
            return std::exp(lambda) * surface;
        });
}

} // namespace follmer
