#pragma once
// Reciprocal-harmonic diffusion models.  A model is a positive function h on
// R^d whose reciprocal 1/h is harmonic away from the zero set of h; the
// process 1/h(W) for a Brownian motion W is then a strict local martingale,
// and -grad(ln h) is the drift of the associated transformed dynamics.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace follmer {

struct HarmonicReciprocalModel {
    std::size_t dimension = 0;
    std::string label;
    // h(y) >= 0; h = 0 exactly on the zero set.
    std::function<double(std::span<const double>)> h;
    // Writes grad(ln h)(y) into `out` (size = dimension); throws
    // std::domain_error on the zero set.
    std::function<void(std::span<const double>, std::span<double>)> grad_ln_h;
    // Euclidean distance from y to the zero set of h.
    std::function<double(std::span<const double>)> zero_set_distance;
    // Default start point for simulations (h(start) = 1 for the factories).
    std::vector<double> canonical_start;
    // Shrinkage parameters carried by the four-dimensional embedded model.
    std::optional<std::pair<double, double>> alpha;
};

// h(y) = |y| on R^3, canonical start (1,0,0): the inverse Bessel(3) model.
HarmonicReciprocalModel inverse_bessel3();

// h(y) = |(y1,y2,y3)| on R^4 with an idle fourth coordinate, canonical start
// (1,0,0,0).  alpha = (alpha1, alpha2) parametrizes the planar shrinkage map
// paired with this model and must not be (0,0) (that configuration belongs
// to the pinned-coordinate counterexample).
HarmonicReciprocalModel embedded_bessel4(double alpha1, double alpha2);

// Same model with h evaluated at y - offset (zero set and start translated).
HarmonicReciprocalModel translate(const HarmonicReciprocalModel& model,
                                  std::vector<double> offset);

// Superposition: 1/h = sum_i 1/h_i.  grad(ln h) is the convex combination of
// the parts' gradients with weights (1/h_i) / sum_j (1/h_j); the zero set is
// the union of the parts' zero sets.
HarmonicReciprocalModel superpose(std::vector<HarmonicReciprocalModel> parts);

// Discrete Laplacian of 1/h at y via second central differences with the
// given step in every coordinate.  Returns |sum_i d2_i (1/h)|; small values
// certify harmonicity of 1/h near y.  Requires y at distance > 2 * step from
// the zero set.
double check_harmonic(const HarmonicReciprocalModel& model, std::span<const double> y,
                      double step);

} // namespace follmer
