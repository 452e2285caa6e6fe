#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "objective.hpp"
#include "projector.hpp"

namespace fvtomo::baselines {

enum class Method { Art, Sart, Sirt, Cgls, Fbp };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::Art: return "art";
        case Method::Sart: return "sart";
        case Method::Sirt: return "sirt";
        case Method::Cgls: return "cgls";
        case Method::Fbp: return "fbp";
    }
    throw std::invalid_argument("unknown baseline");
}

inline Method parse_method(std::string_view name) {
    for (auto m : {Method::Art, Method::Sart, Method::Sirt, Method::Cgls, Method::Fbp})
        if (to_string(m) == name) return m;
    throw std::invalid_argument("unknown baseline: " + std::string(name));
}

inline std::size_t default_iterations(Method m) {
    switch (m) {
        case Method::Art: return 200;
        case Method::Sart: return 200;
        case Method::Sirt: return 500;
        case Method::Cgls: return 50;
        case Method::Fbp: return 1;
    }
    return 1;
}

struct BaselineConfig {
    Method method = Method::Sirt;
    std::size_t iterations = 500;
    double relaxation = 1.0;

    static BaselineConfig defaults(Method m) { return {m, default_iterations(m), 1.0}; }

    void validate() const {
        if (iterations < 1) throw std::invalid_argument("BaselineConfig: iterations must be >= 1");
        if (!(relaxation > 0.0 && relaxation < 2.0))
            throw std::invalid_argument("BaselineConfig: relaxation must lie in (0, 2)");
    }
};

/// Observer called after each iteration with (iteration, current estimate).
using IterationFn = std::function<void(std::size_t, std::span<const double>)>;

namespace detail {

inline std::vector<double> inverse_row_sums(const SystemMatrix& A, std::size_t first, std::size_t last) {
    std::vector<double> inv(last - first, 0.0);
    for (std::size_t r = first; r < last; ++r) {
        double sum = 0.0;
        for (double v : A.row_values(r)) sum += v;
        inv[r - first] = sum > 0.0 ? 1.0 / sum : 0.0;
    }
    return inv;
}

inline std::vector<double> inverse_col_sums(const SystemMatrix& A, std::size_t first, std::size_t last) {
    std::vector<double> sums(A.cols(), 0.0);
    for (std::size_t r = first; r < last; ++r) {
        const auto cols = A.row_cols(r);
        const auto vals = A.row_values(r);
        for (std::size_t k = 0; k < cols.size(); ++k) sums[cols[k]] += vals[k];
    }
    for (auto& s : sums) s = s > 0.0 ? 1.0 / s : 0.0;
    return sums;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace detail

/// Cyclic Kaczmarz sweeps from x = 0; rows with zero norm are skipped.
inline std::vector<double> art_reconstruct(const Problem& problem, const BaselineConfig& config) {
    config.validate();
    const auto& A = problem.A();
    const auto& b = problem.sinogram;
    std::vector<double> norms(A.rows(), 0.0);
    for (std::size_t r = 0; r < A.rows(); ++r)
        for (double v : A.row_values(r)) norms[r] += v * v;

    std::vector<double> x(A.cols(), 0.0);
    for (std::size_t it = 0; it < config.iterations; ++it) {
        for (std::size_t r = 0; r < A.rows(); ++r) {
            if (norms[r] == 0.0) continue;
            const double step = config.relaxation * (b[r] - A.row_dot(r, x)) / norms[r];
            if (step == 0.0) continue;
            const auto cols = A.row_cols(r);
            const auto vals = A.row_values(r);
            for (std::size_t k = 0; k < cols.size(); ++k) x[cols[k]] += step * vals[k];
        }
    }
    return x;
}

/**
 * SIRT: x <- x + lambda C A^T R (b - A x), with R and C the inverse row and
 * column sums (zero where a row or column is empty).
 */
inline std::vector<double> sirt_reconstruct(const Problem& problem, const BaselineConfig& config,
                                            const IterationFn& on_iteration = {}) {
    config.validate();
    const auto& A = problem.A();
    const auto& b = problem.sinogram;
    const auto R = detail::inverse_row_sums(A, 0, A.rows());
    const auto C = detail::inverse_col_sums(A, 0, A.rows());

    std::vector<double> x(A.cols(), 0.0), residual(A.rows()), correction(A.cols());
    for (std::size_t it = 0; it < config.iterations; ++it) {
        for (std::size_t r = 0; r < A.rows(); ++r) residual[r] = (b[r] - A.row_dot(r, x)) * R[r];
        back_project(A, residual, correction);
        for (std::size_t j = 0; j < x.size(); ++j) x[j] += config.relaxation * C[j] * correction[j];
        if (on_iteration) on_iteration(it + 1, x);
    }
    return x;
}

/// SART: the SIRT update applied block by block, one block per projection angle.
inline std::vector<double> sart_reconstruct(const Problem& problem, const BaselineConfig& config) {
    config.validate();
    const auto& A = problem.A();
    const auto& b = problem.sinogram;
    const std::size_t block = A.geometry().num_rays;
    if (block == 0 || A.rows() % block != 0)
        throw std::invalid_argument("sart_reconstruct: rows are not grouped by angle");
    const std::size_t blocks = A.rows() / block;

    std::vector<std::vector<double>> R(blocks), C(blocks);
    for (std::size_t a = 0; a < blocks; ++a) {
        R[a] = detail::inverse_row_sums(A, a * block, (a + 1) * block);
        C[a] = detail::inverse_col_sums(A, a * block, (a + 1) * block);
    }

    std::vector<double> x(A.cols(), 0.0), correction(A.cols());
    std::vector<double> residual(block);
    for (std::size_t it = 0; it < config.iterations; ++it) {
        for (std::size_t a = 0; a < blocks; ++a) {
            std::fill(correction.begin(), correction.end(), 0.0);
            for (std::size_t k = 0; k < block; ++k) {
                const std::size_t r = a * block + k;
                const double res = (b[r] - A.row_dot(r, x)) * R[a][k];
                if (res == 0.0) continue;
                const auto cols = A.row_cols(r);
                const auto vals = A.row_values(r);
                for (std::size_t q = 0; q < cols.size(); ++q) correction[cols[q]] += vals[q] * res;
            }
            for (std::size_t j = 0; j < x.size(); ++j) x[j] += config.relaxation * C[a][j] * correction[j];
        }
    }
    return x;
}

/**
 * CGLS (conjugate gradients on A^T A x = A^T b) from x = 0. Stops after
 * `iterations` steps or once ||A^T (b - A x)|| < 1e-10.
 */
inline std::vector<double> cgls_reconstruct(const Problem& problem, const BaselineConfig& config,
                                            const IterationFn& on_iteration = {}) {
    config.validate();
    constexpr double kTolerance = 1e-10;
    const auto& A = problem.A();
    std::vector<double> x(A.cols(), 0.0);
    std::vector<double> r = problem.sinogram;
    std::vector<double> s = back_project(A, r);
    std::vector<double> p = s;
    std::vector<double> q(A.rows());
    double gamma = detail::dot(s, s);
    if (std::sqrt(gamma) < kTolerance) return x;

    for (std::size_t it = 0; it < config.iterations; ++it) {
        forward_project(A, p, q);
        const double qq = detail::dot(q, q);
        if (qq == 0.0) break;
        const double alpha = gamma / qq;
        for (std::size_t j = 0; j < x.size(); ++j) x[j] += alpha * p[j];
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= alpha * q[i];
        back_project(A, r, s);
        const double gamma_next = detail::dot(s, s);
        if (on_iteration) on_iteration(it + 1, x);
        if (std::sqrt(gamma_next) < kTolerance) break;
        const double beta = gamma_next / gamma;
        gamma = gamma_next;
        for (std::size_t j = 0; j < p.size(); ++j) p[j] = s[j] + beta * p[j];
    }
    return x;
}

namespace detail {

// In-place iterative radix-2 FFT; `inverse` applies the 1/n scaling.
inline void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (auto& v : a) v /= static_cast<double>(n);
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Frequency response 2|f| built from the band-limited spatial Ram-Lak kernel.
inline std::vector<double> ramp_filter(std::size_t padded) {
    std::vector<std::complex<double>> h(padded, 0.0);
    const auto half = static_cast<long>(padded / 2);
    for (long k = -half; k < half; ++k) {
        double v = 0.0;
        if (k == 0)
            v = 0.25;
        else if (k % 2 != 0)
            v = -1.0 / (std::numbers::pi * std::numbers::pi * static_cast<double>(k * k));
        h[static_cast<std::size_t>((k + static_cast<long>(padded)) % static_cast<long>(padded))] = v;
    }
    fft(h, false);
    std::vector<double> response(padded);
    for (std::size_t i = 0; i < padded; ++i) response[i] = 2.0 * h[i].real();
    return response;
}

}  // namespace detail

/// Ramp-filtered sinogram, one row of `num_rays` values per angle.
inline std::vector<double> ramp_filter_sinogram(std::span<const double> sinogram, std::size_t num_angles,
                                                std::size_t num_rays) {
    if (sinogram.size() != num_angles * num_rays)
        throw std::invalid_argument("ramp_filter_sinogram: size mismatch");
    const std::size_t padded = detail::next_pow2(2 * num_rays);
    const auto response = detail::ramp_filter(padded);
    std::vector<double> out(sinogram.size());
    std::vector<std::complex<double>> buf(padded);
    for (std::size_t a = 0; a < num_angles; ++a) {
        std::fill(buf.begin(), buf.end(), 0.0);
        for (std::size_t r = 0; r < num_rays; ++r) buf[r] = sinogram[a * num_rays + r];
        detail::fft(buf, false);
        for (std::size_t i = 0; i < padded; ++i) buf[i] *= response[i];
        detail::fft(buf, true);
        for (std::size_t r = 0; r < num_rays; ++r) out[a * num_rays + r] = buf[r].real();
    }
    return out;
}

/**
 * Filtered backprojection for the parallel geometry the matrix was built
 * with: ramp filter per angle, pixel-driven backprojection with linear
 * detector interpolation, scaled by pi / (2 * num_angles).
 */
inline std::vector<double> fbp_reconstruct(const Problem& problem, const BaselineConfig& config = {Method::Fbp, 1, 1.0}) {
    config.validate();
    const auto& A = problem.A();
    const auto& g = A.geometry();
    const std::size_t side = A.side();
    if (side == 0 || g.num_rays != side || g.angles.size() != g.num_angles)
        throw std::invalid_argument("fbp_reconstruct: requires a parallel-beam matrix");

    const auto filtered = ramp_filter_sinogram(problem.sinogram, g.num_angles, g.num_rays);
    std::vector<double> x(A.cols(), 0.0);
    const double half = static_cast<double>(side) / 2.0;
    const double centre = (static_cast<double>(g.num_rays) - 1.0) / 2.0;
    for (std::size_t a = 0; a < g.num_angles; ++a) {
        const double c = std::cos(g.angles[a]), s = std::sin(g.angles[a]);
        const double* q = filtered.data() + a * g.num_rays;
        for (std::size_t i = 0; i < side; ++i) {
            const double y = half - static_cast<double>(i) - 0.5;
            for (std::size_t j = 0; j < side; ++j) {
                const double xc = static_cast<double>(j) + 0.5 - half;
                const double pos = xc * c + y * s + centre;
                const double fl = std::floor(pos);
                const auto k = static_cast<long>(fl);
                const double frac = pos - fl;
                double v = 0.0;
                if (k >= 0 && k < static_cast<long>(g.num_rays)) v += (1.0 - frac) * q[k];
                if (k + 1 >= 0 && k + 1 < static_cast<long>(g.num_rays)) v += frac * q[k + 1];
                x[i * side + j] += v;
            }
        }
    }
    const double scale = std::numbers::pi / (2.0 * static_cast<double>(g.num_angles));
    for (auto& v : x) v *= scale;
    return x;
}

inline std::vector<double> reconstruct(const Problem& problem, const BaselineConfig& config) {
    switch (config.method) {
        case Method::Art: return art_reconstruct(problem, config);
        case Method::Sart: return sart_reconstruct(problem, config);
        case Method::Sirt: return sirt_reconstruct(problem, config);
        case Method::Cgls: return cgls_reconstruct(problem, config);
        case Method::Fbp: return fbp_reconstruct(problem, config);
    }
    throw std::invalid_argument("unknown baseline");
}

}  // namespace fvtomo::baselines
