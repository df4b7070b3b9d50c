#pragma once
// Conditional-expectation functionals of the shrunk models, their closed-form
// bounds, and the local-boundedness and scaling diagnostics built on them.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "follmer/quadrature.hpp"

namespace follmer {

// One-coordinate shrinkage of the three-dimensional model:
//   F(t,x) = E[ |x| / (x^2 + Z2^2 + Z3^2)^{3/2} ],  Z2, Z3 ~ N(0,t) i.i.d.
// F(t,0) = 0 (the numerator vanishes), although F(t, x) -> 1/t as x -> 0:
// the functional is bounded by 1/t but discontinuous at the singular point.
double f_example1(double t, double x);

// Independent closed form for cross-checks: F(t,x) = (1 - z R(z)) / t with
// z = |x| / sqrt(t) and R the Mills ratio.
double f_example1_closed(double t, double x);

struct PlanarFunctional {
    double f1 = 0.0;
    double f2 = 0.0;
};

// Planar shrinkage functional of the four-dimensional embedded model started
// at (1,0,0,0):  F_i(t,x) = E[ |Y^i_t| / |Ybar_t|^3 | pi(Y_t) = x ], i = 1,2,
// with pi(y) = (y1 + alpha1 y4, y2 + alpha2 y4) and Ybar = (Y^1, Y^2, Y^3).
// Evaluated at t = 1 by iterated adaptive quadrature over the conditional
// fiber (Y^1, Y^2) = (x1 - alpha1 S, x2 - alpha2 S), Y^3 = H, where S is the
// conditional Gaussian fourth coordinate and H ~ N(0,1); general t is defined
// through the scaling law F(t,x) = t^{-1} F(1, t^{-1/2} x).  Diverges
// (logarithmically in the distance) on the singular line {lambda (alpha1,
// alpha2)}; points on the line throw QuadratureError.
PlanarFunctional f_example2(double t, double x1, double x2, double alpha1, double alpha2);

// Folded-Normal bound at t = 1:  sqrt(2/pi)/sigma_i + E|N(mu_i, sigma_i^2)|,
// where mu_i, sigma_i are the conditional moments of Y^i_1 given pi(Y_1) = x.
// Requires both alphas nonzero.
PlanarFunctional f_example2_bound(double x1, double x2, double alpha1, double alpha2);

// Conditional moments of (Y^1_1, Y^2_1) given pi(Y_1) = x (start (1,0,0,0)).
struct PlanarMoments {
    double mu1, mu2, sigma1, sigma2;
};
PlanarMoments f_example2_moments(double x1, double x2, double alpha1, double alpha2);

// Distance from x to the singular line {lambda (alpha1, alpha2)}.
double singular_line_distance(double x1, double x2, double alpha1, double alpha2);

// Pinned-coordinate configuration (both shrinkage coefficients zero): the
// conditional functional E[ |x_i| / (x1^2 + x2^2 + V^2)^{3/2} ], V ~ N(0,t).
// Scaling is exact here; the functional is unbounded as x -> 0.
double f_counterexample(double t, double x1, double x2, int component);

// Closed-form lower bound at t = 1:
//   sqrt(2/(pi e)) |x_i| / ((x1^2 + x2^2) sqrt(1 + x1^2 + x2^2)).
double counterexample_lower_bound(double x1, double x2, int component);

// |F(t,x) - t^{-1} F(1, t^{-1/2} x)| / (1 + |F(t,x)|).
double scaling_residual(const std::function<double(double, double)>& f, double t, double x);

struct ScalingReport {
    double example1_max = 0.0;        // over the (t,x) pin list, two independent quadratures
    double example2_max = 0.0;        // zero by construction: general t is defined via scaling
    double counterexample_max = 0.0;  // over the (t,x) pin list
    std::size_t pairs_per_family = 0;
};
ScalingReport check_scaling(double alpha1 = 1.0, double alpha2 = 1.0);

// E[1/|W_t|^2] for the three-dimensional Brownian motion from (1,0,0):
// Monte Carlo with exact Gaussian sampling against the radial transition
// density quadrature oracle int r^{-2} p_t(1,r) dr.
double expected_inverse_square_radius(double t);
struct Lbm1Report {
    struct Row {
        double t;
        double estimate;
        double std_error;
        double oracle;
    };
    std::vector<Row> rows;
    double max_abs_z = 0.0;  // max |estimate - oracle| / std_error
};
Lbm1Report check_lbm1(std::span<const double> t_values, std::size_t n_paths,
                      std::uint64_t seed, std::size_t workers);

// Local-boundedness sweep of the conditional functionals.
struct Lbm2Report {
    double example1_grid_max = 0.0;        // max of t * F(t,x): bounded by 1
    double example2_max_bound_ratio = 0.0; // max F_i / bound_i on the off-line grid
    bool example2_bounded = false;
    bool singular_line_divergence = false; // divergence detected on the singular line
    bool counterexample_unbounded = false; // refinement toward 0 exceeded the ceiling
    double ceiling = 0.0;
    std::vector<double> counterexample_refinement;  // values at x = (2^-j, 0)
};
Lbm2Report check_lbm2(double alpha1 = 1.0, double alpha2 = 1.0);

// Divergence probe and bound domination for the pinned configuration.
struct CounterexampleReport {
    struct Row {
        double x1;
        double value;        // f_counterexample(1, (x1, 0), 1)
        double lower_bound;  // closed form
    };
    std::vector<Row> rows;  // x1 = 10^-k, k = 1..3
    bool unbounded_flag = false;
    double max_scaling_residual = 0.0;
};
CounterexampleReport check_counterexample();

} // namespace follmer
