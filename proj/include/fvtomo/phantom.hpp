#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include "image.hpp"

namespace fvtomo {

enum class PhantomKind { BinaryDisk, BinaryAnnulus, BinaryRects, BinaryBars, SheppLogan };

struct PhantomSpec {
    PhantomKind kind = PhantomKind::SheppLogan;
    std::size_t side = 32;
};

inline std::string_view to_string(PhantomKind kind) {
    switch (kind) {
        case PhantomKind::BinaryDisk: return "binary-disk";
        case PhantomKind::BinaryAnnulus: return "binary-annulus";
        case PhantomKind::BinaryRects: return "binary-rects";
        case PhantomKind::BinaryBars: return "binary-bars";
        case PhantomKind::SheppLogan: return "shepp-logan";
    }
    throw std::invalid_argument("unknown phantom kind");
}

inline PhantomKind parse_phantom_kind(std::string_view name) {
    for (auto kind : {PhantomKind::BinaryDisk, PhantomKind::BinaryAnnulus, PhantomKind::BinaryRects,
                      PhantomKind::BinaryBars, PhantomKind::SheppLogan})
        if (to_string(kind) == name) return kind;
    throw std::invalid_argument("unknown phantom kind: " + std::string(name));
}

inline bool is_binary(PhantomKind kind) { return kind != PhantomKind::SheppLogan; }

namespace detail {

struct Ellipse {
    double intensity;
    double semi_x;
    double semi_y;
    double centre_x;
    double centre_y;
    double angle_deg;

    bool contains(double x, double y) const {
        const double t = angle_deg * std::numbers::pi / 180.0;
        const double dx = x - centre_x;
        const double dy = y - centre_y;
        const double u = dx * std::cos(t) + dy * std::sin(t);
        const double v = -dx * std::sin(t) + dy * std::cos(t);
        return (u * u) / (semi_x * semi_x) + (v * v) / (semi_y * semi_y) <= 1.0;
    }
};

// 1974 ellipse geometry with the contrast-enhanced intensity column, so that
// summed intensities land on the nominal levels below.
inline constexpr std::array<Ellipse, 10> kSheppLogan{{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
    {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
    {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
}};

inline constexpr std::array<double, 6> kSheppLoganLevels{0.0, 0.1, 0.2, 0.3, 0.4, 1.0};

// Lattice coordinate on [-1, 1): pixel side/2 sits on the origin.
inline double lattice_coord(std::size_t index, std::size_t side) {
    return 2.0 * (static_cast<double>(index) - static_cast<double>(side) / 2.0) /
           static_cast<double>(side);
}

}  // namespace detail

/// Summed ellipse intensity of the Shepp-Logan head at a point of [-1,1]^2.
inline double shepp_logan_intensity(double x, double y) {
    double sum = 0.0;
    for (const auto& e : detail::kSheppLogan)
        if (e.contains(x, y)) sum += e.intensity;
    return sum;
}

/// Nearest nominal Shepp-Logan level, scaled to [0,255] with round-half-up.
inline double shepp_logan_grey_level(double summed_intensity) {
    double best = detail::kSheppLoganLevels[0];
    for (double level : detail::kSheppLoganLevels)
        if (std::abs(level - summed_intensity) < std::abs(best - summed_intensity)) best = level;
    return std::floor(best * kMaxIntensity + 0.5);
}

/**
 * Six-level Shepp-Logan phantom.
 *
 * Pixel (row, col) is point-sampled at x = 2(col - side/2)/side,
 * y = 2(side/2 - row)/side. Overlapping ellipse intensities are summed and
 * snapped to {0, 0.1, 0.2, 0.3, 0.4, 1.0} before scaling by 255.
 */
inline Image generate_shepp_logan(std::size_t side) {
    if (side < 2) throw std::invalid_argument("generate_shepp_logan: side must be >= 2");
    Image img(side, side);
    for (std::size_t row = 0; row < side; ++row) {
        const double y = -detail::lattice_coord(row, side);
        for (std::size_t col = 0; col < side; ++col) {
            const double x = detail::lattice_coord(col, side);
            img(row, col) = shepp_logan_grey_level(shepp_logan_intensity(x, y));
        }
    }
    return img;
}

/**
 * Parametric binary stand-ins, sampled at pixel centres in pixel units:
 *   disk     radius 0.35*side about the image centre
 *   annulus  0.2*side <= r < 0.4*side
 *   rects    two disjoint rectangles, each 0.3 x 0.5 of the image (15%)
 *   bars     three vertical bars of width side/8 spanning rows 0.15..0.85
 */
inline Image generate_binary_phantom(const PhantomSpec& spec) {
    if (!is_binary(spec.kind))
        throw std::invalid_argument("generate_binary_phantom: not a binary phantom kind");
    if (spec.side < 2) throw std::invalid_argument("generate_binary_phantom: side must be >= 2");

    const double s = static_cast<double>(spec.side);
    const double c = s / 2.0;
    Image img(spec.side, spec.side);
    for (std::size_t row = 0; row < spec.side; ++row) {
        for (std::size_t col = 0; col < spec.side; ++col) {
            const double py = static_cast<double>(row) + 0.5;
            const double px = static_cast<double>(col) + 0.5;
            const double fy = py / s;
            const double fx = px / s;
            const double r = std::hypot(px - c, py - c);
            bool inside = false;
            switch (spec.kind) {
                case PhantomKind::BinaryDisk: inside = r < 0.35 * s; break;
                case PhantomKind::BinaryAnnulus: inside = r >= 0.2 * s && r < 0.4 * s; break;
                case PhantomKind::BinaryRects:
                    inside = (fy >= 0.15 && fy < 0.45 && fx >= 0.10 && fx < 0.60) ||
                             (fy >= 0.55 && fy < 0.85 && fx >= 0.40 && fx < 0.90);
                    break;
                case PhantomKind::BinaryBars: {
                    if (fy < 0.15 || fy >= 0.85) break;
                    const double width = s / 8.0;
                    for (double centre : {0.25 * s, 0.5 * s, 0.75 * s})
                        if (px >= centre - width / 2.0 && px < centre + width / 2.0) inside = true;
                    break;
                }
                case PhantomKind::SheppLogan: break;
            }
            img(row, col) = inside ? kMaxIntensity : kMinIntensity;
        }
    }
    return img;
}

inline Image generate_phantom(const PhantomSpec& spec) {
    return spec.kind == PhantomKind::SheppLogan ? generate_shepp_logan(spec.side)
                                                : generate_binary_phantom(spec);
}

}  // namespace fvtomo
