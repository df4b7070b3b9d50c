#pragma once
// Pathwise decomposition of the projected strict local martingale: the
// space-time kernel along the shrunk coordinate, its local-time drift part,
// the singular part Lambda carried by the zero level set, and the
// compensator identity tying Lambda's expected mass to the stopping
// probability of the transformed dynamics.

#include <cstdint>
#include <span>
#include <vector>

#include "follmer/grid.hpp"
#include "follmer/mc.hpp"
#include "follmer/models.hpp"
#include "follmer/stochastics.hpp"

namespace follmer {

// Density of the singular part against the local time: dLambda = sqrt(2/(pi t)) dL.
double lambda_density(double t);

struct DecompositionRecord {
    TimeGrid grid{0.0, 1.0, 0};
    std::size_t stop_index = SamplePath::kNoStop;
    std::vector<double> shrunk;          // X_k: the projected coordinate
    std::vector<double> surface;         // S_k = u(t_k, X_k); S_0 is the t->0 limit 1/|X_0|
    LocalTimePath local_time;            // Tanaka estimate for X, frozen after stop_index
    std::vector<double> drift_part;      // A_k = sum_{j<k} (1/t_{j+1}) dL_j
    std::vector<double> lambda;          // sum_{j<k} sqrt(2/(pi t_{j+1})) dL_j (closed density)
    std::vector<double> lambda_general;  // general rule dLambda = dA / S at the node
};

// Projects one path onto its first (or chosen) coordinate and assembles the
// decomposition along it.  Requires grid.t_start() == 0 and X_0 != 0.
// Local-time increments after the path's stop_index are discarded: past the
// stop the path is a driftless continuation that must not feed Lambda.
DecompositionRecord project_path(const SamplePath& path, std::size_t coordinate = 0);

// S_{m} - S_0 - sum_{j<m} u_x(t_j, X_j)(X_{j+1}-X_j) + A_m at m = stop ∧ end.
// The integrand uses the t->0 limit -sgn(X_0)/X_0^2 at the first node and
// the kink convention u_x(t, 0) := 0.
double ito_tanaka_residual(const DecompositionRecord& record);

struct LambdaSupportStats {
    double support_fraction = 0.0;    // Lambda mass collected while |X| > eps
    double occupation_fraction = 0.0; // time fraction with |X| <= eps before the stop
    double total_mass = 0.0;          // Lambda at stop ∧ end
};
LambdaSupportStats lambda_support_stats(const DecompositionRecord& record, double eps);

struct CompensatorResult {
    std::vector<double> t_values;
    std::vector<McEstimate> lambda_mean;        // E^Q[Lambda_{t ∧ stop}]
    std::vector<McEstimate> explosion_fraction; // estimate of Q(stop <= t) from the same paths
    std::vector<double> oracle;                 // 2 (1 - Phi(1/sqrt t))
};
// Transformed-dynamics sweep to max(t_values) accumulating the Tanaka local
// time of the first coordinate and Lambda on the fly (single pass, no path
// storage).
CompensatorResult compensator_check(const HarmonicReciprocalModel& model,
                                    std::span<const double> t_values, double dt,
                                    std::size_t n_paths, std::uint64_t seed,
                                    std::size_t workers, const QPathOptions& options = {});

// Mean of exp(Lambda_T) * u(T, X_T) over scalar Brownian paths from x0 = 1:
// the reciprocal-compensation factor whose expectation is 1.
McEstimate compensated_surface_mean(double t, double dt, std::size_t n_paths,
                                    std::uint64_t seed, std::size_t workers);

} // namespace follmer
