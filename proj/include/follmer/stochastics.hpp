#pragma once
// Path simulation and pathwise statistics: Brownian paths, the substepped
// dynamics dY = dW - grad(ln h)(Y) dt associated with a reciprocal-harmonic
// model, two local-time estimators, and left-point stochastic integrals.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "follmer/grid.hpp"
#include "follmer/models.hpp"
#include "follmer/rng.hpp"

namespace follmer {

void sample_brownian_path_into(SamplePath& out, PhiloxStream& rng, const TimeGrid& grid,
                               std::span<const double> start);
SamplePath sample_brownian_path(PhiloxStream& rng, const TimeGrid& grid,
                                std::span<const double> start);

struct QPathOptions {
    // h(Y) <= threshold marks the stopping level standing in for the zero set.
    double threshold = 1e-3;
    // Substep length cap: safety / |grad ln h|^2.  The drift itself is never
    // modified -- shortening the step is what keeps the singular drift's
    // cancellation structure intact.
    double substep_safety = 0.1;
};

// One-macro-step-at-a-time integrator for the transformed dynamics.  After
// the stopping level is crossed (detected at substep resolution), the state
// at the crossing is held as the current node's value, and subsequent steps
// evolve a driftless Brownian continuation from it.
class QPathStepper {
public:
    QPathStepper(const HarmonicReciprocalModel& model, double dt,
                 const QPathOptions& options = {});

    void reset(std::span<const double> start);
    // Advance one macro step of length dt, consuming Normals from rng.
    void step(PhiloxStream& rng);

    std::span<const double> state() const { return state_; }
    std::size_t node() const { return node_; }  // state is at time t_start + node * dt
    bool stopped() const { return stop_node_ != SamplePath::kNoStop; }
    std::size_t stop_node() const { return stop_node_; }
    double stop_time() const { return stop_time_; }  // substep-resolved, relative to node 0
    std::span<const double> stop_state() const { return stop_state_; }

private:
    const HarmonicReciprocalModel* model_;
    QPathOptions options_;
    double dt_;
    std::size_t node_ = 0;
    std::size_t stop_node_ = SamplePath::kNoStop;
    double stop_time_ = 0.0;
    std::vector<double> state_;
    std::vector<double> stop_state_;
    std::vector<double> grad_;
};

void simulate_q_path_into(SamplePath& out, PhiloxStream& rng,
                          const HarmonicReciprocalModel& model, const TimeGrid& grid,
                          std::span<const double> start, const QPathOptions& options = {});
SamplePath simulate_q_path(PhiloxStream& rng, const HarmonicReciprocalModel& model,
                           const TimeGrid& grid, std::span<const double> start,
                           const QPathOptions& options = {});

// Tanaka-formula estimator of the local time at zero of one coordinate:
// cumulative sums of |X_{k+1}| - |X_k| - sgn(X_k)(X_{k+1} - X_k) with
// sgn(0) := 0, clamped to the running maximum so the estimate is
// nondecreasing like its limit.
LocalTimePath local_time_tanaka(const SamplePath& path, std::size_t coordinate = 0);

// Occupation-density estimator: (1/(2 bandwidth)) * time with |X| <= bandwidth,
// left endpoints; bandwidth <= 0 selects the default sqrt(dt).
LocalTimePath local_time_occupation(const SamplePath& path, std::size_t coordinate = 0,
                                    double bandwidth = 0.0);

// Left-point Riemann sum of integrand(t_k, X_k) (X_{k+1} - X_k).
double stochastic_integral(const SamplePath& path,
                           const std::function<double(double, double)>& integrand,
                           std::size_t coordinate = 0);

} // namespace follmer
