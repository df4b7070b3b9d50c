#include "follmer/normal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace follmer {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double mills_ratio(double z) {
    if (z <= 6.0) {
        // R(z) = sqrt(2 pi)/2 * erfc(z/sqrt 2) * exp(z^2/2)
        return 0.5 * kSqrt2Pi * std::erfc(z / kSqrt2) * std::exp(0.5 * z * z);
    }
    // Laplace continued fraction R(z) = 1/(z + 1/(z + 2/(z + ...))), bottom-up;
    // depth 80 puts the truncation error far below double precision for z > 6.
    double tail = 0.0;
    for (int k = 80; k >= 1; --k) tail = static_cast<double>(k) / (z + tail);
    return 1.0 / (z + tail);
}

double folded_normal_mean(double mu, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("folded_normal_mean: sigma must be >= 0");
    if (sigma == 0.0) return std::abs(mu);
    const double r = mu / sigma;
    return sigma * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * r * r) +
           mu * (1.0 - 2.0 * normal_cdf(-r));
}

} // namespace follmer
