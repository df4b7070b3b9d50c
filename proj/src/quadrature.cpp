#include "follmer/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>

namespace follmer {

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double tol, int max_depth) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate: tol must be positive");
    using boost::math::quadrature::gauss_kronrod;
    double error = 0.0;
    double l1_norm = 0.0;
    double value = 0.0;
    try {
        // Ask the backend for a tighter target than the acceptance threshold
        // so the contract check below has headroom.
        value = gauss_kronrod<double, 15>::integrate(f, a, b, static_cast<unsigned>(max_depth),
                                                     tol * 0.1, &error, &l1_norm);
    } catch (const std::exception& e) {
        throw QuadratureError(std::string("integrate: backend failure: ") + e.what());
    }
    if (!std::isfinite(value) || !(error <= tol * (1.0 + std::abs(value)))) {
        char buffer[160];
        std::snprintf(buffer, sizeof(buffer),
                      "integrate: did not converge (value %.6g, error estimate %.3g, tol %.3g)",
                      value, error, tol);
        throw QuadratureError(buffer);
    }
    return {value, error};
}

} // namespace follmer
