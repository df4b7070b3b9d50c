#pragma once
// Adaptive quadrature on finite or infinite intervals with a hard error
// contract: integrate() returns only if the reported error estimate is below
// tol * (1 + |I|), and throws QuadratureError otherwise.  Divergent
// integrands therefore surface as exceptions, never as silent garbage.

#include <functional>
#include <stdexcept>
#include <string>

namespace follmer {

class QuadratureError : public std::runtime_error {
public:
    explicit QuadratureError(const std::string& message) : std::runtime_error(message) {}
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

// Integrate f over [a, b]; either endpoint may be infinite.  `tol` is the
// acceptance threshold on the absolute-plus-relative error contract above;
// max_depth bounds adaptive bisection.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double tol = 1e-10, int max_depth = 22);

} // namespace follmer
