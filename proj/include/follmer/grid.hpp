#pragma once
// Uniform time grids and the containers produced by path simulation.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace follmer {

// Uniform grid t_k = t_start + k * dt, k = 0 .. n_steps.  node(k) is a pure
// function of (t_start, dt, k), so grid times are bit-identical however the
// grid is traversed.
class TimeGrid {
public:
    TimeGrid(double t_start, double dt, std::size_t n_steps)
        : t_start_(t_start), dt_(dt), n_steps_(n_steps) {
        if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be positive");
    }

    double t_start() const { return t_start_; }
    double dt() const { return dt_; }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t n_nodes() const { return n_steps_ + 1; }
    double node(std::size_t k) const { return t_start_ + static_cast<double>(k) * dt_; }
    double t_end() const { return node(n_steps_); }

    // Node index for a time that must lie on the grid (within 1e-9 * dt).
    std::size_t index_of(double t) const {
        const double raw = (t - t_start_) / dt_;
        const double rounded = static_cast<double>(static_cast<std::uint64_t>(raw + 0.5));
        if (!(raw >= -0.5) || rounded > static_cast<double>(n_steps_) ||
            !(std::abs(raw - rounded) <= 1e-9 * (1.0 + rounded))) {
            throw std::invalid_argument("TimeGrid: time is not a grid node");
        }
        return static_cast<std::size_t>(rounded);
    }

private:
    double t_start_;
    double dt_;
    std::size_t n_steps_;
};

enum class StopReason { none, threshold };

// A d-dimensional path sampled at grid nodes, stored node-major.  If the
// path was stopped (the model's h dropped to the stopping threshold),
// stop_index is the first node carrying the stopped state: state(stop_index)
// is the state at the moment of crossing, and later nodes hold the driftless
// continuation.
struct SamplePath {
    static constexpr std::size_t kNoStop = static_cast<std::size_t>(-1);

    TimeGrid grid{0.0, 1.0, 0};
    std::size_t dimension = 1;
    std::vector<double> states;
    std::size_t stop_index = kNoStop;
    StopReason stop_reason = StopReason::none;
    double stop_time = 0.0;  // substep-resolved crossing time (valid iff stopped())

    bool stopped() const { return stop_index != kNoStop; }

    std::span<const double> state(std::size_t k) const {
        return {states.data() + k * dimension, dimension};
    }
    std::span<double> state(std::size_t k) {
        return {states.data() + k * dimension, dimension};
    }

    void resize(const TimeGrid& g, std::size_t dim) {
        grid = g;
        dimension = dim;
        states.assign(g.n_nodes() * dim, 0.0);
        stop_index = kNoStop;
        stop_reason = StopReason::none;
        stop_time = 0.0;
    }
};

// Cumulative local-time estimate at grid nodes (values[0] = 0).
struct LocalTimePath {
    TimeGrid grid{0.0, 1.0, 0};
    std::vector<double> values;
};

} // namespace follmer
