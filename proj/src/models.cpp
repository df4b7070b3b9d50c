#include "follmer/models.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace follmer {

namespace {

double norm3(std::span<const double> y) {
    return std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
}

void require_dimension(const HarmonicReciprocalModel& model, std::span<const double> y) {
    if (y.size() != model.dimension) {
        throw std::invalid_argument("model '" + model.label + "': point has dimension " +
                                    std::to_string(y.size()) + ", expected " +
                                    std::to_string(model.dimension));
    }
}

} // namespace

HarmonicReciprocalModel inverse_bessel3() {
    HarmonicReciprocalModel model;
    model.dimension = 3;
    model.label = "inverse_bessel3";
    model.canonical_start = {1.0, 0.0, 0.0};
    model.h = [](std::span<const double> y) { return norm3(y); };
    model.grad_ln_h = [](std::span<const double> y, std::span<double> out) {
        // grad ln|y| = y / |y|^2
        const double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
        if (r2 == 0.0) throw std::domain_error("inverse_bessel3: grad ln h undefined at 0");
        out[0] = y[0] / r2;
        out[1] = y[1] / r2;
        out[2] = y[2] / r2;
    };
    model.zero_set_distance = [](std::span<const double> y) { return norm3(y); };
    return model;
}

HarmonicReciprocalModel embedded_bessel4(double alpha1, double alpha2) {
    if (alpha1 == 0.0 && alpha2 == 0.0) {
        throw std::invalid_argument(
            "embedded_bessel4: alpha = (0,0) is the pinned-coordinate configuration; "
            "use the counterexample functional for it");
    }
    HarmonicReciprocalModel model;
    model.dimension = 4;
    model.label = "embedded_bessel4";
    model.canonical_start = {1.0, 0.0, 0.0, 0.0};
    model.alpha = {alpha1, alpha2};
    model.h = [](std::span<const double> y) { return norm3(y.first(3)); };
    model.grad_ln_h = [](std::span<const double> y, std::span<double> out) {
        const double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
        if (r2 == 0.0) throw std::domain_error("embedded_bessel4: grad ln h undefined on the zero set");
        out[0] = y[0] / r2;
        out[1] = y[1] / r2;
        out[2] = y[2] / r2;
        out[3] = 0.0;
    };
    model.zero_set_distance = [](std::span<const double> y) { return norm3(y.first(3)); };
    return model;
}

HarmonicReciprocalModel translate(const HarmonicReciprocalModel& model,
                                  std::vector<double> offset) {
    if (offset.size() != model.dimension) {
        throw std::invalid_argument("translate: offset dimension mismatch");
    }
    HarmonicReciprocalModel out = model;
    out.label = model.label + "@shifted";
    for (std::size_t i = 0; i < offset.size(); ++i) out.canonical_start[i] += offset[i];

    auto shift = [offset](std::span<const double> y, std::vector<double>& scratch) {
        scratch.resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) scratch[i] = y[i] - offset[i];
    };
    out.h = [base = model.h, shift](std::span<const double> y) {
        std::vector<double> shifted;
        shift(y, shifted);
        return base(shifted);
    };
    out.grad_ln_h = [base = model.grad_ln_h, shift](std::span<const double> y,
                                                    std::span<double> g) {
        std::vector<double> shifted;
        shift(y, shifted);
        base(shifted, g);
    };
    out.zero_set_distance = [base = model.zero_set_distance, shift](std::span<const double> y) {
        std::vector<double> shifted;
        shift(y, shifted);
        return base(shifted);
    };
    return out;
}

HarmonicReciprocalModel superpose(std::vector<HarmonicReciprocalModel> parts) {
    if (parts.empty()) throw std::invalid_argument("superpose: needs at least one part");
    const std::size_t dim = parts[0].dimension;
    std::string label = "superpose(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].dimension != dim) {
            throw std::invalid_argument("superpose: parts have mismatched dimensions");
        }
        label += (i ? "+" : "") + parts[i].label;
    }
    label += ")";

    // Shared ownership so the closures survive the factory call.
    auto shared = std::make_shared<std::vector<HarmonicReciprocalModel>>(std::move(parts));

    HarmonicReciprocalModel model;
    model.dimension = dim;
    model.label = std::move(label);
    model.canonical_start = (*shared)[0].canonical_start;
    model.h = [shared](std::span<const double> y) {
        double recip_sum = 0.0;
        for (const auto& part : *shared) {
            const double hv = part.h(y);
            if (hv == 0.0) return 0.0;  // on a part's zero set the superposed h vanishes too
            recip_sum += 1.0 / hv;
        }
        return 1.0 / recip_sum;
    };
    model.grad_ln_h = [shared, dim](std::span<const double> y, std::span<double> out) {
        // grad ln h = sum_i w_i grad ln h_i with w_i = (1/h_i) / sum_j (1/h_j).
        std::vector<double> grad_part(dim);
        std::vector<double> weights(shared->size());
        double recip_sum = 0.0;
        for (std::size_t i = 0; i < shared->size(); ++i) {
            const double hv = (*shared)[i].h(y);
            if (hv == 0.0) throw std::domain_error("superpose: grad ln h undefined on the zero set");
            weights[i] = 1.0 / hv;
            recip_sum += weights[i];
        }
        for (std::size_t d = 0; d < dim; ++d) out[d] = 0.0;
        for (std::size_t i = 0; i < shared->size(); ++i) {
            (*shared)[i].grad_ln_h(y, grad_part);
            const double w = weights[i] / recip_sum;
            for (std::size_t d = 0; d < dim; ++d) out[d] += w * grad_part[d];
        }
    };
    model.zero_set_distance = [shared](std::span<const double> y) {
        double dist = (*shared)[0].zero_set_distance(y);
        for (std::size_t i = 1; i < shared->size(); ++i) {
            dist = std::min(dist, (*shared)[i].zero_set_distance(y));
        }
        return dist;
    };
    return model;
}

double check_harmonic(const HarmonicReciprocalModel& model, std::span<const double> y,
                      double step) {
    require_dimension(model, y);
    if (!(step > 0.0)) throw std::invalid_argument("check_harmonic: step must be positive");
    if (!(model.zero_set_distance(y) > 2.0 * step)) {
        throw std::invalid_argument(
            "check_harmonic: point too close to the zero set for the difference stencil");
    }
    std::vector<double> probe(y.begin(), y.end());
    const double center = 1.0 / model.h(y);
    double laplacian = 0.0;
    for (std::size_t d = 0; d < model.dimension; ++d) {
        const double saved = probe[d];
        probe[d] = saved + step;
        const double plus = 1.0 / model.h(probe);
        probe[d] = saved - step;
        const double minus = 1.0 / model.h(probe);
        probe[d] = saved;
        laplacian += (plus - 2.0 * center + minus) / (step * step);
    }
    return std::abs(laplacian);
}

} // namespace follmer
