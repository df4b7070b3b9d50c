#include "follmer/ukernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "follmer/normal.hpp"

namespace follmer {

double u_kernel(double t, double x) {
    if (!(t > 0.0)) throw std::invalid_argument("u_kernel: t must be positive");
    const double root_t = std::sqrt(t);
    return mills_ratio(std::abs(x) / root_t) / root_t;
}

double u_kernel_dx(double t, double x) {
    if (!(t > 0.0)) throw std::invalid_argument("u_kernel_dx: t must be positive");
    if (x == 0.0) {
        throw std::invalid_argument(
            "u_kernel_dx: one-sided at x = 0 (limits are -1/t and +1/t)");
    }
    const double z = std::abs(x) / std::sqrt(t);
    const double slope = (z * mills_ratio(z) - 1.0) / t;  // derivative for x > 0
    return x > 0.0 ? slope : -slope;
}

double u_kernel_at_zero(double t) {
    if (!(t > 0.0)) throw std::invalid_argument("u_kernel_at_zero: t must be positive");
    return std::sqrt(0.5 * std::numbers::pi / t);
}

} // namespace follmer
