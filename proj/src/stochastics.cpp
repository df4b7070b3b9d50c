#include "follmer/stochastics.hpp"

#include <cmath>
#include <stdexcept>

namespace follmer {

namespace {

double signum(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_start(const TimeGrid&, std::span<const double> start, std::size_t dim,
                   const char* who) {
    if (start.size() != dim) {
        throw std::invalid_argument(std::string(who) + ": start dimension mismatch");
    }
}

} // namespace

void sample_brownian_path_into(SamplePath& out, PhiloxStream& rng, const TimeGrid& grid,
                               std::span<const double> start) {
    const std::size_t dim = start.size();
    if (dim == 0) throw std::invalid_argument("sample_brownian_path: empty start");
    out.resize(grid, dim);
    const double root_dt = std::sqrt(grid.dt());
    auto node0 = out.state(0);
    for (std::size_t d = 0; d < dim; ++d) node0[d] = start[d];
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        auto prev = out.state(k);
        auto next = out.state(k + 1);
        for (std::size_t d = 0; d < dim; ++d) {
            next[d] = prev[d] + root_dt * rng.gaussian();
        }
    }
}

SamplePath sample_brownian_path(PhiloxStream& rng, const TimeGrid& grid,
                                std::span<const double> start) {
    SamplePath path;
    sample_brownian_path_into(path, rng, grid, start);
    return path;
}

QPathStepper::QPathStepper(const HarmonicReciprocalModel& model, double dt,
                           const QPathOptions& options)
    : model_(&model), options_(options), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("QPathStepper: dt must be positive");
    if (!(options.threshold > 0.0)) {
        throw std::invalid_argument("QPathStepper: threshold must be positive");
    }
    if (!(options.substep_safety > 0.0)) {
        throw std::invalid_argument("QPathStepper: substep_safety must be positive");
    }
    state_.resize(model.dimension);
    stop_state_.resize(model.dimension);
    grad_.resize(model.dimension);
}

void QPathStepper::reset(std::span<const double> start) {
    require_start(TimeGrid{0.0, dt_, 0}, start, model_->dimension, "QPathStepper::reset");
    node_ = 0;
    stop_node_ = SamplePath::kNoStop;
    stop_time_ = 0.0;
    for (std::size_t d = 0; d < state_.size(); ++d) state_[d] = start[d];
    if (model_->h(state_) <= options_.threshold) {
        // Started at (or beyond) the stopping level.
        stop_node_ = 0;
        stop_time_ = 0.0;
        stop_state_ = state_;
    }
}

void QPathStepper::step(PhiloxStream& rng) {
    const std::size_t dim = state_.size();
    if (stopped()) {
        // Driftless Brownian continuation on the same grid.
        const double root_dt = std::sqrt(dt_);
        for (std::size_t d = 0; d < dim; ++d) state_[d] += root_dt * rng.gaussian();
        ++node_;
        return;
    }
    double remaining = dt_;
    while (remaining > 0.0) {
        // The threshold check precedes every gradient evaluation, so the
        // gradient is only requested where h > threshold > 0.
        model_->grad_ln_h(state_, grad_);
        double grad_sq = 0.0;
        for (std::size_t d = 0; d < dim; ++d) grad_sq += grad_[d] * grad_[d];
        double delta = remaining;
        if (grad_sq > 0.0) delta = std::min(delta, options_.substep_safety / grad_sq);
        const double root_delta = std::sqrt(delta);
        for (std::size_t d = 0; d < dim; ++d) {
            state_[d] += root_delta * rng.gaussian() - grad_[d] * delta;
        }
        remaining -= delta;
        if (remaining < 1e-12 * dt_) remaining = 0.0;
        if (model_->h(state_) <= options_.threshold) {
            stop_node_ = node_ + 1;
            stop_time_ = static_cast<double>(node_ + 1) * dt_ - remaining;
            stop_state_ = state_;
            break;  // crossing state is held as the next node's value
        }
    }
    ++node_;
}

void simulate_q_path_into(SamplePath& out, PhiloxStream& rng,
                          const HarmonicReciprocalModel& model, const TimeGrid& grid,
                          std::span<const double> start, const QPathOptions& options) {
    require_start(grid, start, model.dimension, "simulate_q_path");
    out.resize(grid, model.dimension);
    QPathStepper stepper(model, grid.dt(), options);
    stepper.reset(start);
    auto node0 = out.state(0);
    for (std::size_t d = 0; d < model.dimension; ++d) node0[d] = start[d];
    out.stop_index = SamplePath::kNoStop;
    if (stepper.stopped()) {
        out.stop_index = 0;
        out.stop_reason = StopReason::threshold;
        out.stop_time = grid.t_start();
    }
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        stepper.step(rng);
        auto node = out.state(k + 1);
        const auto current = stepper.state();
        for (std::size_t d = 0; d < model.dimension; ++d) node[d] = current[d];
        if (stepper.stopped() && out.stop_index == SamplePath::kNoStop) {
            out.stop_index = stepper.stop_node();
            out.stop_reason = StopReason::threshold;
            out.stop_time = grid.t_start() + stepper.stop_time();
        }
    }
    return;
}

SamplePath simulate_q_path(PhiloxStream& rng, const HarmonicReciprocalModel& model,
                           const TimeGrid& grid, std::span<const double> start,
                           const QPathOptions& options) {
    SamplePath path;
    simulate_q_path_into(path, rng, model, grid, start, options);
    return path;
}

LocalTimePath local_time_tanaka(const SamplePath& path, std::size_t coordinate) {
    if (coordinate >= path.dimension) {
        throw std::invalid_argument("local_time_tanaka: coordinate out of range");
    }
    LocalTimePath out;
    out.grid = path.grid;
    out.values.assign(path.grid.n_nodes(), 0.0);
    double raw = 0.0;
    double clamped = 0.0;
    for (std::size_t k = 0; k < path.grid.n_steps(); ++k) {
        const double x0 = path.state(k)[coordinate];
        const double x1 = path.state(k + 1)[coordinate];
        raw += std::abs(x1) - std::abs(x0) - signum(x0) * (x1 - x0);
        clamped = std::max(clamped, raw);
        out.values[k + 1] = clamped;
    }
    return out;
}

LocalTimePath local_time_occupation(const SamplePath& path, std::size_t coordinate,
                                    double bandwidth) {
    if (coordinate >= path.dimension) {
        throw std::invalid_argument("local_time_occupation: coordinate out of range");
    }
    const double dt = path.grid.dt();
    const double eps = bandwidth > 0.0 ? bandwidth : std::sqrt(dt);
    LocalTimePath out;
    out.grid = path.grid;
    out.values.assign(path.grid.n_nodes(), 0.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < path.grid.n_steps(); ++k) {
        if (std::abs(path.state(k)[coordinate]) <= eps) acc += dt / (2.0 * eps);
        out.values[k + 1] = acc;
    }
    return out;
}

double stochastic_integral(const SamplePath& path,
                           const std::function<double(double, double)>& integrand,
                           std::size_t coordinate) {
    if (coordinate >= path.dimension) {
        throw std::invalid_argument("stochastic_integral: coordinate out of range");
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < path.grid.n_steps(); ++k) {
        const double x0 = path.state(k)[coordinate];
        const double x1 = path.state(k + 1)[coordinate];
        acc += integrand(path.grid.node(k), x0) * (x1 - x0);
    }
    return acc;
}

} // namespace follmer
