#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mldas/errors.hpp"

namespace mldas {

/// Row-major numeric matrix with named columns; the training-sample
/// container shared by all models.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;
    std::vector<std::string> column_names;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    const double* row(std::size_t r) const { return data.data() + r * cols; }

    Matrix take_rows(const std::vector<std::size_t>& indices) const {
        Matrix out(indices.size(), cols);
        out.column_names = column_names;
        for (std::size_t i = 0; i < indices.size(); ++i) {
            const double* src = row(indices[i]);
            std::copy(src, src + cols, out.data.begin() + std::ptrdiff_t(i * cols));
        }
        return out;
    }

    // contiguous slice [begin, end)
    Matrix slice(std::size_t begin, std::size_t end) const {
        Matrix out(end - begin, cols);
        out.column_names = column_names;
        std::copy(data.begin() + std::ptrdiff_t(begin * cols), data.begin() + std::ptrdiff_t(end * cols),
                  out.data.begin());
        return out;
    }
};

/// Solves (A + lambda I) x = b in place with partial pivoting. A is n x n
/// row-major. Throws TrainingError when the system is singular.
inline std::vector<double> solve_linear_system(std::vector<double> a, std::vector<double> b,
                                               std::size_t n, double lambda = 0.0) {
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] += lambda;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double mag = std::abs(a[r * n + col]);
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (best == 0.0) throw TrainingError("singular system in linear solve");
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
            std::swap(b[pivot], b[col]);
        }
        const double diag = a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = a[r * n + col] / diag;
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i * n + c] * x[c];
        x[i] = acc / a[i * n + i];
    }
    return x;
}

}  // namespace mldas
