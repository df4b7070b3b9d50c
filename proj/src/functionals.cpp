#include "follmer/functionals.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "follmer/mc.hpp"
#include "follmer/normal.hpp"
#include "follmer/rng.hpp"

namespace follmer {

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

void require_time(double t, const char* who) {
    if (!(t > 0.0)) throw std::invalid_argument(std::string(who) + ": t must be positive");
}

void require_component(int component, const char* who) {
    if (component != 1 && component != 2) {
        throw std::invalid_argument(std::string(who) + ": component must be 1 or 2");
    }
}

// K(w) = (1/sqrt(2 pi)) int exp(-(w s)^2 / 2) (1 + s^2)^{-3/2} ds.  After the
// substitution V = rho s, every Gaussian inverse-cube mean reduces to K with
// an O(1)-scaled integrand, so the quadrature error contract is met
// uniformly as rho -> 0 (the raw integrand is a spike of height rho^{-3}
// there, which starves the adaptive refinement).
double inverse_cube_kernel(double width) {
    if (width <= 1.0) {
        // Substituted form: O(1) value and scale, resolving the width -> 0
        // limit K(0) = sqrt(2/pi) without any spike.
        return integrate(
                   [width](double s) {
                       const double w = width * s;
                       const double q = 1.0 + s * s;
                       return std::exp(-0.5 * w * w) / kSqrt2Pi / (q * std::sqrt(q));
                   },
                   -INFINITY, INFINITY, 1e-11, 25)
            .value;
    }
    // Far field: the raw form width^2 (width^2 + h^2)^{-3/2} phi(h) is smooth
    // at unit scale (the substituted one degenerates into a 1/width-wide
    // spike here, starving the absolute error contract on the tiny value).
    const double w2 = width * width;
    return integrate(
               [w2](double h) {
                   const double q = w2 + h * h;
                   return w2 * std::exp(-0.5 * h * h) / kSqrt2Pi / (q * std::sqrt(q));
               },
               -INFINITY, INFINITY, 1e-11, 25)
        .value;
}

// E_H[(rho^2 + H^2)^{-3/2}] for H ~ N(0,1); finite for rho > 0.
double gaussian_inverse_cube(double rho) {
    return inverse_cube_kernel(rho) / (rho * rho);
}

PlanarFunctional f_example2_unit_time(double x1, double x2, double alpha1, double alpha2) {
    const double kappa = 1.0 + alpha1 * alpha1 + alpha2 * alpha2;
    const double mu_s = (alpha1 * (x1 - 1.0) + alpha2 * x2) / kappa;
    const double sigma_s = 1.0 / std::sqrt(kappa);

    const double line_distance = singular_line_distance(x1, x2, alpha1, alpha2);
    const double scale = 1.0 + std::sqrt(x1 * x1 + x2 * x2);
    if (line_distance < 1e-12 * scale) {
        throw QuadratureError(
            "f_example2: the conditional functional diverges on the singular line");
    }

    auto component = [&](int idx) {
        const double xi = (idx == 1) ? x1 : x2;
        const double ai = (idx == 1) ? alpha1 : alpha2;
        auto outer = [&](double s) {
            const double y1 = x1 - alpha1 * s;
            const double y2 = x2 - alpha2 * s;
            const double yi = xi - ai * s;
            const double rho = std::sqrt(y1 * y1 + y2 * y2);
            if (rho == 0.0) return 0.0;  // measure-zero guard (exact-line case throws above)
            const double weight =
                std::exp(-0.5 * (s - mu_s) * (s - mu_s) / (sigma_s * sigma_s)) /
                (kSqrt2Pi * sigma_s);
            return weight * std::abs(yi) * gaussian_inverse_cube(rho);
        };
        // |y_i| has a kink at s = x_i / a_i, which caps Gauss-Kronrod's
        // refinement rate if it sits inside a panel.  Splitting there leaves
        // two smooth pieces whose error estimates drop geometrically.
        const double tol = 5e-9;
        if (ai == 0.0) return integrate(outer, -INFINITY, INFINITY, tol, 24).value;
        const double cut = xi / ai;
        return integrate(outer, -INFINITY, cut, tol, 24).value +
               integrate(outer, cut, INFINITY, tol, 24).value;
    };

    return {component(1), component(2)};
}

// Values at x = (2^-j, 0) until the ceiling is exceeded (or j runs out).
std::vector<double> counterexample_refinement_values(double ceiling, bool* exceeded) {
    std::vector<double> values;
    *exceeded = false;
    for (int j = 0; j <= 14; ++j) {
        const double x1 = std::ldexp(1.0, -j);
        values.push_back(f_counterexample(1.0, x1, 0.0, 1));
        if (values.back() > ceiling) {
            *exceeded = true;
            break;
        }
    }
    return values;
}

} // namespace

double f_example1(double t, double x) {
    require_time(t, "f_example1");
    if (x == 0.0) return 0.0;
    const double beta = x * x / (2.0 * t);
    // (1/(2t)) int_0^inf (1+s)^{-3/2} e^{-beta s} ds, after s = e^w - 1: the
    // w-integrand decays like e^{-w/2} uniformly in beta, so the infinite
    // range is benign even for tiny beta.
    const double integral =
        integrate([beta](double w) { return std::exp(-0.5 * w - beta * std::expm1(w)); }, 0.0,
                  INFINITY, 1e-10, 22)
            .value;
    return integral / (2.0 * t);
}

double f_example1_closed(double t, double x) {
    require_time(t, "f_example1_closed");
    if (x == 0.0) return 0.0;  // pinned value at the singular point, as in f_example1
    const double z = std::abs(x) / std::sqrt(t);
    return (1.0 - z * mills_ratio(z)) / t;
}

double singular_line_distance(double x1, double x2, double alpha1, double alpha2) {
    const double norm = std::sqrt(alpha1 * alpha1 + alpha2 * alpha2);
    if (norm == 0.0) {
        throw std::invalid_argument("singular_line_distance: alpha must be nonzero");
    }
    return std::abs(alpha1 * x2 - alpha2 * x1) / norm;
}

PlanarFunctional f_example2(double t, double x1, double x2, double alpha1, double alpha2) {
    require_time(t, "f_example2");
    if (alpha1 == 0.0 && alpha2 == 0.0) {
        throw std::invalid_argument(
            "f_example2: alpha = (0,0) is the pinned configuration; use f_counterexample");
    }
    if (t == 1.0) return f_example2_unit_time(x1, x2, alpha1, alpha2);
    // General t through the scaling law (the fixed start point breaks exact
    // scaling of the direct integral, so scaling is the definition here).
    const double root_t = std::sqrt(t);
    const PlanarFunctional unit = f_example2_unit_time(x1 / root_t, x2 / root_t, alpha1, alpha2);
    return {unit.f1 / t, unit.f2 / t};
}

PlanarMoments f_example2_moments(double x1, double x2, double alpha1, double alpha2) {
    const double kappa = 1.0 + alpha1 * alpha1 + alpha2 * alpha2;
    const double mu_s = (alpha1 * (x1 - 1.0) + alpha2 * x2) / kappa;
    const double sigma_s = 1.0 / std::sqrt(kappa);
    return {x1 - alpha1 * mu_s, x2 - alpha2 * mu_s, std::abs(alpha1) * sigma_s,
            std::abs(alpha2) * sigma_s};
}

PlanarFunctional f_example2_bound(double x1, double x2, double alpha1, double alpha2) {
    if (alpha1 == 0.0 || alpha2 == 0.0) {
        throw std::invalid_argument("f_example2_bound: both alphas must be nonzero");
    }
    const PlanarMoments m = f_example2_moments(x1, x2, alpha1, alpha2);
    const double root_2_over_pi = std::sqrt(2.0 / std::numbers::pi);
    return {root_2_over_pi / m.sigma1 + folded_normal_mean(m.mu1, m.sigma1),
            root_2_over_pi / m.sigma2 + folded_normal_mean(m.mu2, m.sigma2)};
}

double f_counterexample(double t, double x1, double x2, int component) {
    require_time(t, "f_counterexample");
    require_component(component, "f_counterexample");
    const double numerator = std::abs(component == 1 ? x1 : x2);
    if (numerator == 0.0) return 0.0;
    const double rho2 = x1 * x1 + x2 * x2;
    // E_V[(rho^2 + V^2)^{-3/2}] for V ~ N(0,t) = rho^{-2} t^{-1/2} K(rho/sqrt t).
    return numerator * inverse_cube_kernel(std::sqrt(rho2 / t)) / (rho2 * std::sqrt(t));
}

double counterexample_lower_bound(double x1, double x2, int component) {
    require_component(component, "counterexample_lower_bound");
    const double numerator = std::abs(component == 1 ? x1 : x2);
    const double rho2 = x1 * x1 + x2 * x2;
    if (rho2 == 0.0) return 0.0;
    // Restrict V to [-1,1], bound the density below by phi(1), integrate the
    // kernel exactly: E[(rho^2+V^2)^{-3/2}] >= sqrt(2/(pi e)) / (rho^2 sqrt(1+rho^2)).
    return std::sqrt(2.0 / (std::numbers::pi * std::numbers::e)) * numerator /
           (rho2 * std::sqrt(1.0 + rho2));
}

double scaling_residual(const std::function<double(double, double)>& f, double t, double x) {
    require_time(t, "scaling_residual");
    const double direct = f(t, x);
    const double composed = f(1.0, x / std::sqrt(t)) / t;
    return std::abs(direct - composed) / (1.0 + std::abs(direct));
}

ScalingReport check_scaling(double alpha1, double alpha2) {
    ScalingReport report;
    const double t_pins[] = {0.25, 0.5, 2.0, 4.0};
    const double x_pins[] = {0.3, 0.7, 1.0, 1.7, 2.5};
    report.pairs_per_family = 20;

    for (const double t : t_pins) {
        for (const double x : x_pins) {
            report.example1_max =
                std::max(report.example1_max, scaling_residual(f_example1, t, x));
        }
    }

    const double planar_pins[][2] = {{0.3, 0.2}, {1.0, 0.0}, {0.5, -0.5}, {2.0, 1.0}, {0.1, 0.1}};
    for (const double t : t_pins) {
        for (const auto& x : planar_pins) {
            const double root_t = std::sqrt(t);
            // Pinned configuration: direct quadrature at both times.
            double worst = 0.0;
            for (int component : {1, 2}) {
                const double direct = f_counterexample(t, x[0], x[1], component);
                const double composed = f_counterexample(1.0, x[0] / root_t, x[1] / root_t, component) / t;
                worst = std::max(worst, std::abs(direct - composed) / (1.0 + std::abs(direct)));
            }
            report.counterexample_max = std::max(report.counterexample_max, worst);

            // Planar functional: general t is defined through scaling, so this
            // residual is structural; evaluated anyway to pin the wiring.
            const PlanarFunctional direct = f_example2(t, x[0] + 2.0, x[1], alpha1, alpha2);
            const PlanarFunctional composed =
                f_example2(1.0, (x[0] + 2.0) / root_t, x[1] / root_t, alpha1, alpha2);
            const double r1 = std::abs(direct.f1 - composed.f1 / t) / (1.0 + std::abs(direct.f1));
            const double r2 = std::abs(direct.f2 - composed.f2 / t) / (1.0 + std::abs(direct.f2));
            report.example2_max = std::max(report.example2_max, std::max(r1, r2));
        }
    }
    return report;
}

double expected_inverse_square_radius(double t) {
    require_time(t, "expected_inverse_square_radius");
    // int_0^inf r^{-2} p_t(1,r) dr with the Bessel(3) bridge density
    // p_t(1,r) = (r/sqrt(2 pi t)) [e^{-(r-1)^2/2t} - e^{-(r+1)^2/2t}].
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * t);
    return integrate(
               [t, norm](double r) {
                   if (r < 1e-8) {
                       // limit of the bracket over r as r -> 0: (2/t) e^{-1/(2t)}
                       return norm * 2.0 / t * std::exp(-0.5 * (1.0 + r * r) / t);
                   }
                   const double a = std::exp(-0.5 * (r - 1.0) * (r - 1.0) / t);
                   const double b = std::exp(-0.5 * (r + 1.0) * (r + 1.0) / t);
                   return norm * (a - b) / r;
               },
               0.0, INFINITY, 1e-10, 22)
        .value;
}

Lbm1Report check_lbm1(std::span<const double> t_values, std::size_t n_paths,
                      std::uint64_t seed, std::size_t workers) {
    Lbm1Report report;
    const std::size_t n_t = t_values.size();
    std::vector<double> times(t_values.begin(), t_values.end());

    struct Scratch {
        std::uint64_t seed;
    };
    auto estimates = run_monte_carlo_multi<Scratch>(
        n_paths, n_t, workers, [seed] { return Scratch{seed}; },
        [&times, n_t](std::size_t path_index, Scratch& scratch, std::span<double> out) {
            PhiloxStream rng(scratch.seed, path_index);
            const double g1 = rng.gaussian();
            const double g2 = rng.gaussian();
            const double g3 = rng.gaussian();
            for (std::size_t j = 0; j < n_t; ++j) {
                const double root_t = std::sqrt(times[j]);
                const double y1 = 1.0 + root_t * g1;
                const double y2 = root_t * g2;
                const double y3 = root_t * g3;
                out[j] = 1.0 / (y1 * y1 + y2 * y2 + y3 * y3);
            }
        });

    for (std::size_t j = 0; j < n_t; ++j) {
        const double oracle = expected_inverse_square_radius(times[j]);
        report.rows.push_back({times[j], estimates[j].mean, estimates[j].std_error, oracle});
        if (estimates[j].std_error > 0.0) {
            report.max_abs_z = std::max(report.max_abs_z,
                                        std::abs(estimates[j].mean - oracle) / estimates[j].std_error);
        }
    }
    return report;
}

Lbm2Report check_lbm2(double alpha1, double alpha2) {
    Lbm2Report report;
    report.ceiling = 1e3;

    // One-coordinate functional: t * F(t, x) <= 1 everywhere.
    for (const double t : {0.25, 1.0, 4.0}) {
        for (int i = -12; i <= 12; ++i) {
            const double x = 0.25 * i;
            report.example1_grid_max = std::max(report.example1_grid_max, t * f_example1(t, x));
        }
    }

    // Planar functional against the folded-Normal bound on a grid transverse
    // to the singular line (x2 nodes offset by a quarter step so every node
    // keeps clearance from the line, where the functional diverges).
    double max_ratio = 0.0;
    bool all_finite = true;
    for (int i = 0; i <= 12; ++i) {
        const double x1 = -3.0 + 0.5 * i;
        for (int j = 0; j <= 11; ++j) {
            const double x2 = -2.75 + 0.5 * j;
            try {
                const PlanarFunctional value = f_example2(1.0, x1, x2, alpha1, alpha2);
                const PlanarFunctional bound = f_example2_bound(x1, x2, alpha1, alpha2);
                max_ratio = std::max(max_ratio, value.f1 / bound.f1);
                max_ratio = std::max(max_ratio, value.f2 / bound.f2);
            } catch (const QuadratureError&) {
                all_finite = false;
            }
        }
    }
    report.example2_max_bound_ratio = max_ratio;
    report.example2_bounded = all_finite && max_ratio <= 1.0;

    // On the singular line the functional must be reported divergent.
    try {
        (void)f_example2(1.0, 1.3 * alpha1, 1.3 * alpha2, alpha1, alpha2);
        report.singular_line_divergence = false;
    } catch (const QuadratureError&) {
        report.singular_line_divergence = true;
    }

    bool exceeded = false;
    report.counterexample_refinement = counterexample_refinement_values(report.ceiling, &exceeded);
    report.counterexample_unbounded = exceeded;
    return report;
}

CounterexampleReport check_counterexample() {
    CounterexampleReport report;
    for (int k = 1; k <= 3; ++k) {
        const double x1 = std::pow(10.0, -k);
        report.rows.push_back(
            {x1, f_counterexample(1.0, x1, 0.0, 1), counterexample_lower_bound(x1, 0.0, 1)});
    }
    bool exceeded = false;
    (void)counterexample_refinement_values(1e3, &exceeded);
    report.unbounded_flag = exceeded;

    for (const double t : {0.25, 4.0}) {
        for (const auto& x : {std::pair{0.3, 0.2}, std::pair{1.0, 0.0}, std::pair{0.5, -0.5},
                              std::pair{2.0, 1.0}}) {
            const double root_t = std::sqrt(t);
            const double direct = f_counterexample(t, x.first, x.second, 1);
            const double composed =
                f_counterexample(1.0, x.first / root_t, x.second / root_t, 1) / t;
            report.max_scaling_residual =
                std::max(report.max_scaling_residual,
                         std::abs(direct - composed) / (1.0 + std::abs(direct)));
        }
    }
    return report;
}

} // namespace follmer
