#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace fvtomo {

/**
 * Parallel-beam geometry. Angles are equally spaced over [0, pi) without the
 * endpoint; at angle 0 the rays travel along +y and the detector runs along x.
 * Detector bins have unit spacing and are centred on the image.
 */
struct ParallelGeometry {
    std::size_t num_angles = 1;
    std::size_t num_rays = 1;
    std::vector<double> angles;

    static ParallelGeometry equally_spaced(std::size_t num_angles, std::size_t num_rays) {
        if (num_angles < 1 || num_rays < 1)
            throw std::invalid_argument("ParallelGeometry: need at least one angle and one ray");
        ParallelGeometry g;
        g.num_angles = num_angles;
        g.num_rays = num_rays;
        g.angles.resize(num_angles);
        for (std::size_t i = 0; i < num_angles; ++i)
            g.angles[i] = static_cast<double>(i) * std::numbers::pi / static_cast<double>(num_angles);
        return g;
    }

    static ParallelGeometry with_angles(std::vector<double> angles, std::size_t num_rays) {
        if (angles.empty() || num_rays < 1)
            throw std::invalid_argument("ParallelGeometry: need at least one angle and one ray");
        for (std::size_t i = 0; i < angles.size(); ++i) {
            if (angles[i] < 0.0 || angles[i] >= std::numbers::pi)
                throw std::invalid_argument("ParallelGeometry: angles must lie in [0, pi)");
            if (i > 0 && angles[i] <= angles[i - 1])
                throw std::invalid_argument("ParallelGeometry: angles must be strictly increasing");
        }
        ParallelGeometry g;
        g.num_angles = angles.size();
        g.num_rays = num_rays;
        g.angles = std::move(angles);
        return g;
    }

    std::size_t num_measurements() const { return num_angles * num_rays; }

    /// Signed detector offset of ray r, in pixel units.
    double ray_offset(std::size_t r) const {
        return static_cast<double>(r) - (static_cast<double>(num_rays) - 1.0) / 2.0;
    }
};

/// Sparse system matrix in compressed-row form; entry (ray, pixel) is the chord length.
class SystemMatrix {
  public:
    SystemMatrix() = default;

    std::size_t rows() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }
    std::size_t side() const { return side_; }
    const ParallelGeometry& geometry() const { return geometry_; }

    std::span<const std::uint32_t> row_cols(std::size_t r) const {
        return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
    }
    std::span<const double> row_values(std::size_t r) const {
        return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
    }

    double row_dot(std::size_t r, std::span<const double> x) const {
        double acc = 0.0;
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += values_[k] * x[col_idx_[k]];
        return acc;
    }

    /// Dense copy, for tests and debugging on small problems.
    std::vector<std::vector<double>> to_dense() const {
        std::vector<std::vector<double>> dense(rows(), std::vector<double>(cols_, 0.0));
        for (std::size_t r = 0; r < rows(); ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) dense[r][col_idx_[k]] = values_[k];
        return dense;
    }

    /// Writes `row col weight` triplets, one per line.
    void dump_triplets(std::ostream& out) const {
        const auto old_precision = out.precision(17);
        for (std::size_t r = 0; r < rows(); ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                out << r << ' ' << col_idx_[k] << ' ' << values_[k] << '\n';
        out.precision(old_precision);
    }

    /// Builds from explicit rows; used for small hand-written systems.
    static SystemMatrix from_dense(const std::vector<std::vector<double>>& dense) {
        SystemMatrix m;
        m.cols_ = dense.empty() ? 0 : dense.front().size();
        m.row_ptr_.push_back(0);
        for (const auto& row : dense) {
            if (row.size() != m.cols_) throw std::invalid_argument("from_dense: ragged rows");
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (row[c] < 0.0) throw std::invalid_argument("from_dense: negative weight");
                if (row[c] > 0.0) {
                    m.col_idx_.push_back(static_cast<std::uint32_t>(c));
                    m.values_.push_back(row[c]);
                }
            }
            m.row_ptr_.push_back(m.values_.size());
        }
        m.geometry_.num_angles = 1;
        m.geometry_.num_rays = dense.size();
        m.geometry_.angles = {0.0};
        return m;
    }

    /// Reads the triplet format written by dump_triplets; rows must be non-decreasing.
    static SystemMatrix from_triplets(const ParallelGeometry& geometry, std::size_t side, std::istream& in) {
        SystemMatrix m;
        m.cols_ = side * side;
        m.side_ = side;
        m.geometry_ = geometry;
        const std::size_t rows = geometry.num_measurements();
        m.row_ptr_.assign(rows + 1, 0);
        std::size_t r = 0, c = 0, last_row = 0;
        double w = 0.0;
        while (in >> r >> c >> w) {
            if (r >= rows || c >= m.cols_ || r < last_row || !(w > 0.0))
                throw std::runtime_error("from_triplets: malformed matrix entry");
            last_row = r;
            m.col_idx_.push_back(static_cast<std::uint32_t>(c));
            m.values_.push_back(w);
            ++m.row_ptr_[r + 1];
        }
        if (!in.eof()) throw std::runtime_error("from_triplets: unreadable matrix data");
        for (std::size_t i = 0; i < rows; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
        return m;
    }

  private:
    friend SystemMatrix build_system_matrix(const ParallelGeometry& geometry, std::size_t side);

    std::size_t cols_ = 0;
    std::size_t side_ = 0;
    ParallelGeometry geometry_;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::uint32_t> col_idx_;
    std::vector<double> values_;
};

namespace detail {

inline constexpr double kDirectionEps = 1e-12;
inline constexpr double kMinWeight = 1e-12;

struct PixelChord {
    std::uint32_t col;
    double length;
};

// Exact chord lengths of one ray through the side x side grid. The grid
// covers [-side/2, side/2]^2; row 0 is the top (largest y).
inline std::vector<PixelChord> trace_ray(double angle, double offset, std::size_t side) {
    const double half = static_cast<double>(side) / 2.0;
    const double ux = std::cos(angle), uy = std::sin(angle);
    const double dx = -uy, dy = ux;
    const double ox = offset * ux, oy = offset * uy;

    double t_enter = -std::numeric_limits<double>::infinity();
    double t_exit = std::numeric_limits<double>::infinity();
    auto clip = [&](double origin, double dir) {
        if (std::abs(dir) < kDirectionEps) {
            if (std::abs(origin) >= half) t_exit = t_enter;  // parallel and outside
            return;
        }
        double t0 = (-half - origin) / dir;
        double t1 = (half - origin) / dir;
        if (t0 > t1) std::swap(t0, t1);
        t_enter = std::max(t_enter, t0);
        t_exit = std::min(t_exit, t1);
    };
    clip(ox, dx);
    clip(oy, dy);
    if (!(t_exit > t_enter)) return {};

    std::vector<double> ts{t_enter, t_exit};
    auto add_crossings = [&](double origin, double dir) {
        if (std::abs(dir) < kDirectionEps) return;
        for (std::size_t k = 0; k <= side; ++k) {
            const double t = (static_cast<double>(k) - half - origin) / dir;
            if (t > t_enter && t < t_exit) ts.push_back(t);
        }
    };
    add_crossings(ox, dx);
    add_crossings(oy, dy);
    std::sort(ts.begin(), ts.end());

    std::vector<PixelChord> chords;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        const double len = ts[k + 1] - ts[k];
        if (len < kMinWeight) continue;
        const double tm = 0.5 * (ts[k] + ts[k + 1]);
        const double x = ox + tm * dx;
        const double y = oy + tm * dy;
        const auto col = static_cast<long>(std::floor(x + half));
        const auto row = static_cast<long>(std::floor(half - y));
        const auto s = static_cast<long>(side);
        if (col < 0 || col >= s || row < 0 || row >= s) continue;
        const auto idx = static_cast<std::uint32_t>(row * s + col);
        if (!chords.empty() && chords.back().col == idx)
            chords.back().length += len;
        else
            chords.push_back({idx, len});
    }
    std::sort(chords.begin(), chords.end(), [](const auto& a, const auto& b) { return a.col < b.col; });
    // Segments split by a grazing crossing can revisit a pixel.
    std::vector<PixelChord> merged;
    for (const auto& c : chords) {
        if (!merged.empty() && merged.back().col == c.col)
            merged.back().length += c.length;
        else
            merged.push_back(c);
    }
    std::erase_if(merged, [](const PixelChord& c) { return c.length < kMinWeight; });
    return merged;
}

}  // namespace detail

/**
 * Exact ray-tracing system matrix for a side x side image. Row index is
 * angle * num_rays + ray; column index is row-major pixel index.
 */
inline SystemMatrix build_system_matrix(const ParallelGeometry& geometry, std::size_t side) {
    if (geometry.num_rays != side)
        throw std::invalid_argument("build_system_matrix: num_rays must equal the image side");
    if (geometry.angles.size() != geometry.num_angles)
        throw std::invalid_argument("build_system_matrix: angle list does not match num_angles");

    SystemMatrix m;
    m.cols_ = side * side;
    m.side_ = side;
    m.geometry_ = geometry;
    m.row_ptr_.reserve(geometry.num_measurements() + 1);
    m.row_ptr_.push_back(0);
    for (std::size_t a = 0; a < geometry.num_angles; ++a) {
        for (std::size_t r = 0; r < geometry.num_rays; ++r) {
            for (const auto& c : detail::trace_ray(geometry.angles[a], geometry.ray_offset(r), side)) {
                m.col_idx_.push_back(c.col);
                m.values_.push_back(c.length);
            }
            m.row_ptr_.push_back(m.values_.size());
        }
    }
    return m;
}

/// out = A x. `out` must have A.rows() elements.
inline void forward_project(const SystemMatrix& A, std::span<const double> x, std::span<double> out) {
    if (x.size() != A.cols()) throw std::invalid_argument("forward_project: x length != A.cols()");
    if (out.size() != A.rows()) throw std::invalid_argument("forward_project: out length != A.rows()");
    for (std::size_t r = 0; r < A.rows(); ++r) out[r] = A.row_dot(r, x);
}

inline std::vector<double> forward_project(const SystemMatrix& A, std::span<const double> x) {
    std::vector<double> out(A.rows());
    forward_project(A, x, out);
    return out;
}

/// out = A^T r. `out` must have A.cols() elements.
inline void back_project(const SystemMatrix& A, std::span<const double> r, std::span<double> out) {
    if (r.size() != A.rows()) throw std::invalid_argument("back_project: r length != A.rows()");
    if (out.size() != A.cols()) throw std::invalid_argument("back_project: out length != A.cols()");
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t row = 0; row < A.rows(); ++row) {
        const double v = r[row];
        if (v == 0.0) continue;
        const auto cols = A.row_cols(row);
        const auto vals = A.row_values(row);
        for (std::size_t k = 0; k < cols.size(); ++k) out[cols[k]] += vals[k] * v;
    }
}

inline std::vector<double> back_project(const SystemMatrix& A, std::span<const double> r) {
    std::vector<double> out(A.cols());
    back_project(A, r, out);
    return out;
}

}  // namespace fvtomo
