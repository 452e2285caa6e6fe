#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "../image.hpp"

namespace fvtomo::harness {

/**
 * Writes an 8-bit binary PGM (P5). Values are clamped and rounded to 0..255.
 * `comment` becomes a single `#` line after the magic number.
 */
inline void render_image(std::span<const double> pixels, std::size_t width, std::size_t height,
                         const std::filesystem::path& path, const std::string& comment = {}) {
    if (width * height != pixels.size() || width == 0 || height == 0)
        throw std::invalid_argument("render_image: shape does not match pixel count");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write image: " + path.string());
    out << "P5\n";
    if (!comment.empty()) {
        std::string line = comment;
        for (auto& c : line)
            if (c == '\n' || c == '\r') c = ' ';
        out << "# " << line << '\n';
    }
    out << width << ' ' << height << "\n255\n";
    std::vector<char> bytes(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i)
        bytes[i] = static_cast<char>(static_cast<std::uint8_t>(quantise_value(pixels[i])));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing image: " + path.string());
}

inline void render_image(const Image& image, const std::filesystem::path& path, const std::string& comment = {}) {
    render_image(image.pixels(), image.width(), image.height(), path, comment);
}

struct PgmData {
    std::size_t width = 0;
    std::size_t height = 0;
    std::string comment;
    std::vector<std::uint8_t> bytes;
};

/// Reads back a P5 file written by render_image.
inline PgmData read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read image: " + path.string());
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("not a binary PGM: " + path.string());
    PgmData d;
    in.get();
    if (in.peek() == '#') {
        std::getline(in, d.comment);
        d.comment.erase(0, d.comment.find_first_not_of("# "));
    }
    int maxval = 0;
    in >> d.width >> d.height >> maxval;
    in.get();
    if (!in || maxval != 255) throw std::runtime_error("unsupported PGM header: " + path.string());
    d.bytes.resize(d.width * d.height);
    in.read(reinterpret_cast<char*>(d.bytes.data()), static_cast<std::streamsize>(d.bytes.size()));
    if (!in) throw std::runtime_error("truncated PGM: " + path.string());
    return d;
}

}  // namespace fvtomo::harness
