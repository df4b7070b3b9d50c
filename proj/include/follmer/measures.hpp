#pragma once
// The two sides of the measure change: the strict-local-martingale mean under
// the Wiener law, survival of the transformed dynamics, and the density-
// process identity tying the two together.

#include <cstdint>
#include <span>
#include <vector>

#include "follmer/mc.hpp"
#include "follmer/models.hpp"
#include "follmer/stochastics.hpp"

namespace follmer {

// E^P[ 1/h(W_t) ] with W_t sampled exactly (Gaussian increments, no grid).
McEstimate mass_loss(const HarmonicReciprocalModel& model, double t, std::size_t n_paths,
                     std::uint64_t seed, std::size_t workers);

// Closed forms for the three-dimensional |y| model started at (1,0,0):
// the retained mass 2 Phi(1/sqrt t) - 1 and its complement, the probability
// 2 (1 - Phi(1/sqrt t)) that the transformed dynamics has hit the zero set.
double inverse_bessel3_mass_oracle(double t);
double inverse_bessel3_explosion_oracle(double t);

struct SurvivalResult {
    std::vector<double> t_values;
    std::vector<McEstimate> survival;  // fraction of paths not yet stopped at t
};
// Simulates transformed paths once to max(t_values) and reads every
// checkpoint off the same sweep.  t_values must lie on the grid.
SurvivalResult survival_q(const HarmonicReciprocalModel& model,
                          std::span<const double> t_values, double dt, std::size_t n_paths,
                          std::uint64_t seed, std::size_t workers,
                          const QPathOptions& options = {});

struct DensityCheckResult {
    McEstimate estimate;
    double oracle = 0.0;
    double t = 0.0;
    double c = 0.0;
};
// E^Q[ h(Y_t) 1{not stopped, Y^1_t >= c} ] against P(W^1_t >= c)
// = 1 - Phi((c - start_1)/sqrt t): the density process h(Y) 1{survival}
// transports Q back to the Wiener law.
DensityCheckResult density_identity_check(const HarmonicReciprocalModel& model, double t,
                                          double c, double dt, std::size_t n_paths,
                                          std::uint64_t seed, std::size_t workers,
                                          const QPathOptions& options = {});

// Continuity diagnostics at the stopping level: the stopped value of h stays
// pinned near the threshold (no jump), and stopping is not reached from far
// away within one macro step.  Serial evaluation; paths without a stop
// contribute no value.
struct NoJumpReport {
    struct ThresholdRow {
        double threshold;
        double median_h_at_stop;
        std::size_t n_stopped;
    };
    struct StepRow {
        double dt;
        double far_fraction;  // share of stopped paths with h > 10 * threshold one node earlier
        std::size_t n_stopped;
    };
    std::vector<ThresholdRow> by_threshold;
    std::vector<StepRow> by_step;
};
NoJumpReport no_jump_to_infinity_check(const HarmonicReciprocalModel& model, double t,
                                       std::span<const double> thresholds,
                                       double dt_for_thresholds, std::span<const double> dts,
                                       double threshold_for_dts, std::size_t n_paths,
                                       std::uint64_t seed);

} // namespace follmer
