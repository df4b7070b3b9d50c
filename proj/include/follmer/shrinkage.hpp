#pragma once
// Linear filtration shrinkage: observing pi(Y) for a surjective linear map
// pi with rank strictly below the state dimension, and the induced Gaussian
// conditioning of Y_t given pi(Y_t) = x when Y is a Brownian motion started
// at y0.
//
// Conditioning is computed through the Moore-Penrose pseudoinverse:
//   mean = pinv(pi) x + (I - pinv(pi) pi) y0,   cov = t (I - pinv(pi) pi).

#include <cstddef>
#include <span>
#include <vector>

#include "follmer/rng.hpp"

namespace follmer {

class LinearShrinkage {
public:
    // pi_row_major has dim_out rows and dim_in columns.  Requires
    // 1 <= dim_out < dim_in and rank(pi) == dim_out (a genuine, surjective
    // shrinkage); throws std::invalid_argument otherwise.
    LinearShrinkage(std::size_t dim_in, std::size_t dim_out, std::vector<double> pi_row_major);

    std::size_t dim_in() const { return dim_in_; }
    std::size_t dim_out() const { return dim_out_; }

    // x = pi y.
    void apply(std::span<const double> y, std::span<double> x) const;
    // y = pinv(pi) x.
    void apply_pinv(std::span<const double> x, std::span<double> y) const;
    // y_out = (I - pinv(pi) pi) y: projection onto the null space of pi.
    void project_null(std::span<const double> y, std::span<double> y_out) const;

    const std::vector<double>& matrix() const { return pi_; }
    const std::vector<double>& pinv_matrix() const { return pinv_; }

private:
    std::size_t dim_in_;
    std::size_t dim_out_;
    std::vector<double> pi_;    // dim_out x dim_in, row-major
    std::vector<double> pinv_;  // dim_in x dim_out, row-major
    std::vector<double> null_proj_;  // dim_in x dim_in, row-major: I - pinv(pi) pi
};

// Conditional law of Y_t given pi(Y_t) = x for Y a Brownian motion from y0:
// a degenerate Gaussian on R^{dim_in} supported on the affine fiber.
struct ConditionalGaussian {
    std::vector<double> mean;        // dim_in
    std::vector<double> covariance;  // dim_in x dim_in, row-major == t * null projector
    double t = 0.0;

    double marginal_variance(std::size_t i) const;
    // Draws a sample of the conditional law into `out` (size dim_in).
    void sample(PhiloxStream& rng, std::span<double> out) const;
};

// Throws std::invalid_argument if t <= 0 or if x is (numerically) outside
// the image of pi.
ConditionalGaussian gaussian_condition(const LinearShrinkage& shrinkage, double t,
                                       std::span<const double> start,
                                       std::span<const double> observed);

// Observe the first coordinate of a 3-dimensional state: pi = [1 0 0].
LinearShrinkage shrinkage_example1();

// Observe (y1 + alpha1 y4, y2 + alpha2 y4) of a 4-dimensional state.
LinearShrinkage shrinkage_example2(double alpha1, double alpha2);

} // namespace follmer
