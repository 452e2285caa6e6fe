#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "image.hpp"
#include "projector.hpp"

namespace fvtomo {

/**
 * A reconstruction problem: measurements b = A x* of a known phantom x*.
 * The system matrix is shared; a Problem is immutable once built.
 */
struct Problem {
    std::string id;
    std::shared_ptr<const SystemMatrix> matrix;
    std::vector<double> sinogram;
    Image ground_truth;
    double mu = 0.0;
    double lower = kMinIntensity;
    double upper = kMaxIntensity;

    const SystemMatrix& A() const { return *matrix; }
    std::size_t dimension() const { return matrix->cols(); }
    std::size_t width() const { return ground_truth.width(); }
    std::size_t height() const { return ground_truth.height(); }
};

/// Builds a consistent problem: the sinogram is the forward projection of the phantom.
inline Problem make_problem(std::string id, std::shared_ptr<const SystemMatrix> matrix, Image phantom,
                            double mu = 0.0) {
    if (!matrix) throw std::invalid_argument("make_problem: null system matrix");
    if (phantom.size() != matrix->cols())
        throw std::invalid_argument("make_problem: phantom size does not match matrix columns");
    if (mu < 0.0) throw std::invalid_argument("make_problem: mu must be non-negative");
    Problem p;
    p.id = std::move(id);
    p.sinogram = forward_project(*matrix, phantom.pixels());
    p.matrix = std::move(matrix);
    p.ground_truth = std::move(phantom);
    p.mu = mu;
    return p;
}

/// ||b - A y||_2^2
inline double reconstruction_error(const Problem& problem, std::span<const double> y) {
    const auto& A = problem.A();
    if (y.size() != A.cols()) throw std::invalid_argument("reconstruction_error: length mismatch");
    double sum = 0.0;
    for (std::size_t r = 0; r < A.rows(); ++r) {
        const double d = problem.sinogram[r] - A.row_dot(r, y);
        sum += d * d;
    }
    return sum;
}

/// ||y - x*||_1
inline double reproduction_error(std::span<const double> y, std::span<const double> truth) {
    if (y.size() != truth.size()) throw std::invalid_argument("reproduction_error: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) sum += std::abs(y[i] - truth[i]);
    return sum;
}

inline double reproduction_error(std::span<const double> y, const Image& truth) {
    return reproduction_error(y, truth.pixels());
}

/**
 * Isotropic total variation over forward differences. Differences that would
 * reach past the last row or column count as zero.
 */
inline double total_variation(std::span<const double> y, std::size_t width, std::size_t height) {
    if (width * height != y.size()) throw std::invalid_argument("total_variation: shape mismatch");
    double tv = 0.0;
    for (std::size_t i = 0; i < height; ++i) {
        const double* row = y.data() + i * width;
        const double* next = (i + 1 < height) ? row + width : nullptr;
        for (std::size_t j = 0; j < width; ++j) {
            const double dv = next ? next[j] - row[j] : 0.0;
            const double dh = (j + 1 < width) ? row[j + 1] - row[j] : 0.0;
            if (dv != 0.0 || dh != 0.0) tv += std::sqrt(dv * dv + dh * dh);
        }
    }
    return tv;
}

/// e1 + mu * TV; identical to e1 when mu is zero.
inline double regularised_error(const Problem& problem, std::span<const double> y) {
    const double e1 = reconstruction_error(problem, y);
    if (problem.mu == 0.0) return e1;
    return e1 + problem.mu * total_variation(y, problem.width(), problem.height());
}

enum class ScaleMode { Clamp, MinMax };

inline std::string_view to_string(ScaleMode mode) { return mode == ScaleMode::Clamp ? "clamp" : "minmax"; }

inline ScaleMode parse_scale_mode(std::string_view name) {
    if (name == "clamp") return ScaleMode::Clamp;
    if (name == "minmax") return ScaleMode::MinMax;
    throw std::invalid_argument("unknown scale mode: " + std::string(name));
}

/// Maps an unconstrained reconstruction onto [0, 255].
inline std::vector<double> scale_to_range(std::span<const double> y, ScaleMode mode = ScaleMode::Clamp) {
    std::vector<double> out(y.begin(), y.end());
    if (out.empty()) return out;
    if (mode == ScaleMode::Clamp) {
        for (auto& v : out) v = std::clamp(v, kMinIntensity, kMaxIntensity);
        return out;
    }
    const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
    const double min = *lo, max = *hi;
    if (max == min) {
        std::fill(out.begin(), out.end(), 0.0);
        return out;
    }
    for (auto& v : out) v = (v - min) / (max - min) * kMaxIntensity;
    return out;
}

}  // namespace fvtomo
