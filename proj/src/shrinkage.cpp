#include "follmer/shrinkage.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace follmer {

namespace {

using Matrix = Eigen::MatrixXd;

Matrix to_eigen(std::size_t rows, std::size_t cols, const std::vector<double>& row_major) {
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = row_major[r * cols + c];
    return m;
}

std::vector<double> from_eigen(const Matrix& m) {
    std::vector<double> out(static_cast<std::size_t>(m.rows() * m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
    return out;
}

void matvec(const std::vector<double>& m, std::size_t rows, std::size_t cols,
            std::span<const double> v, std::span<double> out) {
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += m[r * cols + c] * v[c];
        out[r] = acc;
    }
}

} // namespace

LinearShrinkage::LinearShrinkage(std::size_t dim_in, std::size_t dim_out,
                                 std::vector<double> pi_row_major)
    : dim_in_(dim_in), dim_out_(dim_out), pi_(std::move(pi_row_major)) {
    if (dim_out_ < 1 || dim_out_ >= dim_in_) {
        throw std::invalid_argument(
            "LinearShrinkage: need 1 <= dim_out < dim_in (a strict shrinkage)");
    }
    if (pi_.size() != dim_in_ * dim_out_) {
        throw std::invalid_argument("LinearShrinkage: matrix size mismatch");
    }
    const Matrix pi = to_eigen(dim_out_, dim_in_, pi_);
    Eigen::JacobiSVD<Matrix> svd(pi, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& singular = svd.singularValues();
    const double tol = 1e-12 * singular(0) * static_cast<double>(dim_in_);
    if (singular.size() < static_cast<Eigen::Index>(dim_out_) ||
        !(singular(singular.size() - 1) > tol)) {
        throw std::invalid_argument("LinearShrinkage: pi must have full row rank");
    }
    // Moore-Penrose pseudoinverse via SVD.
    Matrix inv_sigma = Matrix::Zero(dim_out_, dim_out_);
    for (std::size_t i = 0; i < dim_out_; ++i) inv_sigma(i, i) = 1.0 / singular(i);
    const Matrix pinv = svd.matrixV() * inv_sigma * svd.matrixU().transpose();
    pinv_ = from_eigen(pinv);
    const Matrix null_proj = Matrix::Identity(dim_in_, dim_in_) - pinv * pi;
    null_proj_ = from_eigen(null_proj);
}

void LinearShrinkage::apply(std::span<const double> y, std::span<double> x) const {
    if (y.size() != dim_in_ || x.size() != dim_out_) {
        throw std::invalid_argument("LinearShrinkage::apply: size mismatch");
    }
    matvec(pi_, dim_out_, dim_in_, y, x);
}

void LinearShrinkage::apply_pinv(std::span<const double> x, std::span<double> y) const {
    if (x.size() != dim_out_ || y.size() != dim_in_) {
        throw std::invalid_argument("LinearShrinkage::apply_pinv: size mismatch");
    }
    matvec(pinv_, dim_in_, dim_out_, x, y);
}

void LinearShrinkage::project_null(std::span<const double> y, std::span<double> y_out) const {
    if (y.size() != dim_in_ || y_out.size() != dim_in_) {
        throw std::invalid_argument("LinearShrinkage::project_null: size mismatch");
    }
    matvec(null_proj_, dim_in_, dim_in_, y, y_out);
}

double ConditionalGaussian::marginal_variance(std::size_t i) const {
    return covariance[i * mean.size() + i];
}

void ConditionalGaussian::sample(PhiloxStream& rng, std::span<double> out) const {
    const std::size_t n = mean.size();
    if (out.size() != n) throw std::invalid_argument("ConditionalGaussian::sample: size mismatch");
    // cov = t * P with P an orthogonal projector, so mean + sqrt(t) * P g has
    // exactly the right (degenerate) covariance for standard Normal g.
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = rng.gaussian();
    const double root_t = std::sqrt(t);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += covariance[i * n + j] * g[j];
        out[i] = mean[i] + acc / (root_t == 0.0 ? 1.0 : root_t);  // (t P) g / sqrt(t) = sqrt(t) P g
    }
}

ConditionalGaussian gaussian_condition(const LinearShrinkage& shrinkage, double t,
                                       std::span<const double> start,
                                       std::span<const double> observed) {
    if (!(t > 0.0)) throw std::invalid_argument("gaussian_condition: t must be positive");
    const std::size_t n = shrinkage.dim_in();
    const std::size_t q = shrinkage.dim_out();
    if (start.size() != n || observed.size() != q) {
        throw std::invalid_argument("gaussian_condition: size mismatch");
    }
    // Image membership check: pi pinv(pi) x must reproduce x.
    std::vector<double> lifted(n), roundtrip(q);
    shrinkage.apply_pinv(observed, lifted);
    shrinkage.apply(lifted, roundtrip);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        err += (roundtrip[i] - observed[i]) * (roundtrip[i] - observed[i]);
        scale += observed[i] * observed[i];
    }
    if (!(std::sqrt(err) <= 1e-9 * (1.0 + std::sqrt(scale)))) {
        throw std::invalid_argument("gaussian_condition: observed point is outside the image of pi");
    }

    ConditionalGaussian out;
    out.t = t;
    out.mean.resize(n);
    std::vector<double> null_part(n);
    shrinkage.project_null(start, null_part);
    for (std::size_t i = 0; i < n; ++i) out.mean[i] = lifted[i] + null_part[i];

    out.covariance.resize(n * n);
    // cov = t (I - pinv(pi) pi): recover the projector columnwise.
    std::vector<double> basis(n, 0.0), column(n);
    for (std::size_t j = 0; j < n; ++j) {
        basis[j] = 1.0;
        shrinkage.project_null(basis, column);
        basis[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) out.covariance[i * n + j] = t * column[i];
    }
    return out;
}

LinearShrinkage shrinkage_example1() {
    return LinearShrinkage(3, 1, {1.0, 0.0, 0.0});
}

LinearShrinkage shrinkage_example2(double alpha1, double alpha2) {
    return LinearShrinkage(4, 2,
                           {1.0, 0.0, 0.0, alpha1,
                            0.0, 1.0, 0.0, alpha2});
}

} // namespace follmer
