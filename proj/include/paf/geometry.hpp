// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "paf/error.hpp"

namespace paf {

// 2-D point / vector in pixel coordinates: x = column, y = row.
// Pixel centers sit at integer coordinates.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2&) const = default;

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
    // Rotated 90 degrees counter-clockwise in image coordinates.
    Vec2 perp() const { return {-y, x}; }
};

// Dense row-major 2-D grid. value(x, y) lives at data[y * width + x].
template <typename T>
struct Grid {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Grid() = default;
    Grid(int w, int h, T fill = T{}) : width(w), height(h), data(size_t(w) * size_t(h), fill) {}

    T& operator()(int x, int y) { return data[size_t(y) * width + x]; }
    const T& operator()(int x, int y) const { return data[size_t(y) * width + x]; }

    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
    bool same_shape(const Grid& o) const { return width == o.width && height == o.height; }
};

template <typename T>
bool bitwise_equal(const Grid<T>& a, const Grid<T>& b) {
    if (!a.same_shape(b)) return false;
    return std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(T)) == 0;
}

// Maps a down-sampled grid index back to full-resolution pixel coordinates.
// stride 1 is the identity; stride s samples cell centers.
inline double strided_coord(int index, int stride) {
    return double(stride) * index + 0.5 * (stride - 1);
}

// Continuous extension of strided_coord, for sub-pixel plane positions.
inline Vec2 plane_to_pixel(Vec2 p, int stride) {
    const double offset = 0.5 * (stride - 1);
    return {double(stride) * p.x + offset, double(stride) * p.y + offset};
}

inline int strided_extent(int full, int stride) { return (full + stride - 1) / stride; }

}  // namespace paf
