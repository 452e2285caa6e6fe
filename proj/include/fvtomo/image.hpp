#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fvtomo {

/// Greyscale intensity bounds shared by phantoms, trial solutions and renders.
inline constexpr double kMinIntensity = 0.0;
inline constexpr double kMaxIntensity = 255.0;

/**
 * A 2-D row-major pixel grid. Row 0 is the top of the image.
 *
 * Values are real-valued so the same type carries both discrete phantoms and
 * continuous trial solutions.
 */
class Image {
  public:
    Image() = default;

    Image(std::size_t width, std::size_t height, double fill = 0.0)
        : width_(width), height_(height), pixels_(width * height, fill) {}

    Image(std::size_t width, std::size_t height, std::vector<double> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        if (pixels_.size() != width_ * height_)
            throw std::invalid_argument("Image: pixel count does not match width*height");
    }

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    std::size_t size() const { return pixels_.size(); }

    double& operator()(std::size_t row, std::size_t col) { return pixels_[row * width_ + col]; }
    double operator()(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }

    double& operator[](std::size_t i) { return pixels_[i]; }
    double operator[](std::size_t i) const { return pixels_[i]; }

    std::span<double> pixels() { return pixels_; }
    std::span<const double> pixels() const { return pixels_; }
    const std::vector<double>& data() const { return pixels_; }

    /// True when every value lies in [0, 255].
    bool in_range() const {
        return std::all_of(pixels_.begin(), pixels_.end(), [](double v) {
            return v >= kMinIntensity && v <= kMaxIntensity;
        });
    }

    friend bool operator==(const Image&, const Image&) = default;

  private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<double> pixels_;
};

/// Round-half-up to an integer grey level, clamped into [0, 255].
inline double quantise_value(double v) {
    if (!(v > kMinIntensity)) return kMinIntensity;  // also maps NaN to 0
    if (v >= kMaxIntensity) return kMaxIntensity;
    return std::floor(v + 0.5);
}

inline std::vector<double> quantise(std::span<const double> values) {
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(), quantise_value);
    return out;
}

inline Image quantise(const Image& image) {
    return Image(image.width(), image.height(), quantise(image.pixels()));
}

}  // namespace fvtomo
