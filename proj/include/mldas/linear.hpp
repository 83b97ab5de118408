#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "mldas/matrix.hpp"

namespace mldas {

/// Ordinary least squares via the normal equations with a tiny Tikhonov
/// term (1e-10) to keep collinear inputs solvable. normalize=true z-scores
/// each feature with training-set statistics before the solve; the scaling
/// constants are kept for prediction. normalize is ignored when
/// fit_intercept is false, mirroring the library semantics the
/// hyperparameter descriptions assume.
class LinearModel {
  public:
    LinearModel() = default;
    LinearModel(bool fit_intercept, bool normalize)
        : fit_intercept_(fit_intercept), normalize_(fit_intercept && normalize) {}

    void fit(const Matrix& x, std::span<const double> y) {
        if (x.rows == 0 || x.rows != y.size()) throw TrainingError("linear model: empty training set");
        n_features_ = x.cols;
        means_.assign(x.cols, 0.0);
        scales_.assign(x.cols, 1.0);
        if (normalize_) {
            for (std::size_t c = 0; c < x.cols; ++c) {
                double sum = 0.0;
                for (std::size_t r = 0; r < x.rows; ++r) sum += x.at(r, c);
                means_[c] = sum / double(x.rows);
            }
            for (std::size_t c = 0; c < x.cols; ++c) {
                double ss = 0.0;
                for (std::size_t r = 0; r < x.rows; ++r) {
                    const double d = x.at(r, c) - means_[c];
                    ss += d * d;
                }
                const double sd = std::sqrt(ss / double(x.rows));
                scales_[c] = sd > 0.0 ? sd : 1.0;  // constant columns keep unit scale
            }
        }

        const std::size_t p = x.cols + (fit_intercept_ ? 1 : 0);
        std::vector<double> xtx(p * p, 0.0);
        std::vector<double> xty(p, 0.0);
        std::vector<double> row(p, 1.0);  // last slot holds the intercept column
        for (std::size_t r = 0; r < x.rows; ++r) {
            for (std::size_t c = 0; c < x.cols; ++c) {
                row[c] = (x.at(r, c) - (normalize_ ? means_[c] : 0.0)) / (normalize_ ? scales_[c] : 1.0);
            }
            for (std::size_t i = 0; i < p; ++i) {
                for (std::size_t j = i; j < p; ++j) xtx[i * p + j] += row[i] * row[j];
                xty[i] += row[i] * y[r];
            }
        }
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < i; ++j) xtx[i * p + j] = xtx[j * p + i];
        }

        std::vector<double> solution = solve_linear_system(std::move(xtx), std::move(xty), p, 1e-10);
        weights_.assign(solution.begin(), solution.begin() + std::ptrdiff_t(x.cols));
        intercept_ = fit_intercept_ ? solution[x.cols] : 0.0;
    }

    double predict_row(const double* row) const {
        double acc = intercept_;
        for (std::size_t c = 0; c < n_features_; ++c) {
            const double v = normalize_ ? (row[c] - means_[c]) / scales_[c] : row[c];
            acc += weights_[c] * v;
        }
        return acc;
    }

    std::vector<double> predict(const Matrix& x) const {
        if (x.cols != n_features_) throw ArgumentError("linear model: feature arity mismatch");
        std::vector<double> out(x.rows, 0.0);
        for (std::size_t r = 0; r < x.rows; ++r) out[r] = predict_row(x.row(r));
        return out;
    }

    bool fit_intercept() const { return fit_intercept_; }
    bool normalized() const { return normalize_; }
    const std::vector<double>& weights() const { return weights_; }
    double intercept() const { return intercept_; }
    const std::vector<double>& means() const { return means_; }
    const std::vector<double>& scales() const { return scales_; }

    void restore(std::vector<double> weights, double intercept, std::vector<double> means,
                 std::vector<double> scales, bool fit_intercept, bool normalize) {
        weights_ = std::move(weights);
        intercept_ = intercept;
        means_ = std::move(means);
        scales_ = std::move(scales);
        fit_intercept_ = fit_intercept;
        normalize_ = normalize;
        n_features_ = weights_.size();
    }

  private:
    bool fit_intercept_ = true;
    bool normalize_ = false;
    std::size_t n_features_ = 0;
    std::vector<double> weights_;
    double intercept_ = 0.0;
    std::vector<double> means_;
    std::vector<double> scales_;
};

}  // namespace mldas
