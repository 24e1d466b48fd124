#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ablq/geometry.hpp"

namespace ablq {

// Row-major binary raster. Pixel (x, y) has its center at (x+0.5, y+0.5)
// in continuous coordinates, origin top-left, y down.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), bits(std::size_t(w) * h, 0) {}

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
    bool at(int x, int y) const {
        return in_bounds(x, y) && bits[std::size_t(y) * width + x] != 0;
    }
    void set(int x, int y, bool v = true) {
        if (in_bounds(x, y)) bits[std::size_t(y) * width + x] = v ? 1 : 0;
    }
    std::size_t count() const;
};

// Stroke a polyline onto a fresh canvas: a pixel is set iff its center
// lies within thickness/2 of the polyline (round caps and joins). Parts
// outside the canvas are clipped.
BinaryMask rasterize_polyline(const Polyline& poly, double thickness,
                              int width, int height);

// Number of 8-connected foreground components.
int component_count(const BinaryMask& mask);

// Recover the centerline of a stroked line mask:
//   1. trace the outer boundary as an ordered pixel cycle,
//   2. from the leftmost boundary pixel, pair the k-th pixel before with
//      the k-th after along the cycle and take midpoints (line A),
//   3. repeat from the rightmost pixel (line B),
//   4. resample both to `resample_points` and average them pointwise.
// The mask must hold exactly one component.
Polyline centerline_from_mask(const BinaryMask& mask,
                              std::size_t resample_points = 64);

// Binary PGM (P5) writer: foreground 255, background 0.
void write_pgm(const BinaryMask& mask, const std::string& path);

} // namespace ablq
