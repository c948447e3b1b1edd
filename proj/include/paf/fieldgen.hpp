// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "paf/geometry.hpp"
#include "paf/scene.hpp"
#include "paf/topology.hpp"

namespace paf {

// Ground-truth field planes for one grid: one confidence plane per part and
// one (x, y) scalar plane pair per limb, all 32-bit floats.
struct FieldStack {
    int width = 0;
    int height = 0;
    std::vector<Grid<float>> confidence;  // part_count planes
    std::vector<Grid<float>> paf;         // 2 * limb_count planes, (x, y) interleaved

    int channel_count() const { return int(confidence.size() + paf.size()); }
};

inline bool bitwise_equal(const FieldStack& a, const FieldStack& b) {
    if (a.width != b.width || a.height != b.height) return false;
    if (a.confidence.size() != b.confidence.size() || a.paf.size() != b.paf.size()) return false;
    for (size_t i = 0; i < a.confidence.size(); ++i)
        if (!bitwise_equal(a.confidence[i], b.confidence[i])) return false;
    for (size_t i = 0; i < a.paf.size(); ++i)
        if (!bitwise_equal(a.paf[i], b.paf[i])) return false;
    return true;
}

struct RenderParams {
    double sigma = 7.0;       // confidence peak spread, px
    double sigma_limb = 8.0;  // PAF band half-width, px
    int stride = 1;           // 1 = full resolution; >1 samples cell centers
};

// exp(-t) as float is exactly +0 for t >= 104; use 110 for margin. Skipping
// pixels beyond this radius is a pure speedup: the skipped contributions are
// bit-identical to evaluating the formula (they underflow to the same +0.0f).
inline constexpr double kZeroExpThreshold = 110.0;

namespace detail {

struct IndexRange {
    int lo, hi;  // inclusive; empty when lo > hi
};

// Index range of a strided grid whose pixel coordinates fall in [lo, hi].
inline IndexRange index_range(double lo, double hi, int extent, int stride) {
    double offset = 0.5 * (stride - 1);
    int a = int(std::floor((lo - offset) / stride));
    int b = int(std::ceil((hi - offset) / stride));
    return {std::max(a, 0), std::min(b, extent - 1)};
}

}  // namespace detail

// Confidence plane for a single keypoint: plane(p) = exp(-|p - center|^2 / sigma^2).
// Peak value 1.0 at the keypoint, exp(-1) one sigma away. width/height are the
// output plane extents; cell (ix, iy) samples pixel strided_coord(ix, stride).
inline Grid<float> confidence_map_person(Vec2 center, double sigma, int width, int height,
                                         int stride = 1) {
    if (sigma <= 0.0) throw error(errc::non_positive_sigma, "sigma must be positive");
    Grid<float> plane(width, height, 0.0f);
    const double inv = 1.0 / (sigma * sigma);
    const double radius = sigma * std::sqrt(kZeroExpThreshold);
    auto xr = detail::index_range(center.x - radius, center.x + radius, width, stride);
    auto yr = detail::index_range(center.y - radius, center.y + radius, height, stride);
    for (int iy = yr.lo; iy <= yr.hi; ++iy) {
        const double dy = strided_coord(iy, stride) - center.y;
        for (int ix = xr.lo; ix <= xr.hi; ++ix) {
            const double dx = strided_coord(ix, stride) - center.x;
            plane(ix, iy) = float(std::exp(-(dx * dx + dy * dy) * inv));
        }
    }
    return plane;
}

// Pixelwise max across per-person planes.
inline Grid<float> aggregate_confidence(std::span<const Grid<float>> planes) {
    if (planes.empty()) throw error(errc::empty_input, "no planes to aggregate");
    Grid<float> out = planes[0];
    for (size_t k = 1; k < planes.size(); ++k) {
        if (!planes[k].same_shape(out))
            throw error(errc::dim_mismatch, "confidence planes differ in shape");
        for (size_t i = 0; i < out.data.size(); ++i)
            out.data[i] = std::max(out.data[i], planes[k].data[i]);
    }
    return out;
}

// PAF plane pair for a single limb: the unit vector from a to b on every pixel
// within the limb band (longitudinally between the endpoints, laterally within
// sigma_limb of the segment), zero elsewhere. width/height are the output plane
// extents; cell (ix, iy) samples pixel strided_coord(ix, stride).
inline std::pair<Grid<float>, Grid<float>> paf_person(Vec2 a, Vec2 b, double sigma_limb, int width,
                                                      int height, int stride = 1) {
    if (sigma_limb <= 0.0) throw error(errc::non_positive_sigma, "sigma_limb must be positive");
    const Vec2 d = b - a;
    const double len = d.norm();
    if (len < 1e-12) throw error(errc::degenerate_limb, "limb endpoints coincide");
    const Vec2 v{d.x / len, d.y / len};
    const Vec2 vperp = v.perp();
    const float vx = float(v.x);
    const float vy = float(v.y);

    Grid<float> px(width, height, 0.0f);
    Grid<float> py(width, height, 0.0f);
    const double margin = sigma_limb + stride;
    auto xr = detail::index_range(std::min(a.x, b.x) - margin, std::max(a.x, b.x) + margin, width, stride);
    auto yr = detail::index_range(std::min(a.y, b.y) - margin, std::max(a.y, b.y) + margin, height, stride);
    for (int iy = yr.lo; iy <= yr.hi; ++iy) {
        const double ry = strided_coord(iy, stride) - a.y;
        for (int ix = xr.lo; ix <= xr.hi; ++ix) {
            const double rx = strided_coord(ix, stride) - a.x;
            const double along = v.x * rx + v.y * ry;
            if (along < 0.0 || along > len) continue;
            const double across = vperp.x * rx + vperp.y * ry;
            if (std::abs(across) > sigma_limb) continue;
            px(ix, iy) = vx;
            py(ix, iy) = vy;
        }
    }
    return {std::move(px), std::move(py)};
}

// Per-pixel average of the nonzero vectors across per-person PAF planes.
// Accumulation runs in doubles, in input order, so the result is independent
// of person permutation in practice and bit-stable run to run.
inline std::pair<Grid<float>, Grid<float>> aggregate_paf(
    std::span<const std::pair<Grid<float>, Grid<float>>> planes) {
    if (planes.empty()) throw error(errc::empty_input, "no planes to aggregate");
    const int w = planes[0].first.width;
    const int h = planes[0].first.height;
    Grid<float> out_x(w, h, 0.0f);
    Grid<float> out_y(w, h, 0.0f);
    std::vector<double> sum_x(size_t(w) * h, 0.0), sum_y(size_t(w) * h, 0.0);
    std::vector<uint16_t> count(size_t(w) * h, 0);
    for (const auto& [px, py] : planes) {
        if (px.width != w || px.height != h || py.width != w || py.height != h)
            throw error(errc::dim_mismatch, "PAF planes differ in shape");
        for (size_t i = 0; i < sum_x.size(); ++i) {
            if (px.data[i] != 0.0f || py.data[i] != 0.0f) {
                sum_x[i] += px.data[i];
                sum_y[i] += py.data[i];
                ++count[i];
            }
        }
    }
    for (size_t i = 0; i < sum_x.size(); ++i) {
        if (count[i]) {
            out_x.data[i] = float(sum_x[i] / count[i]);
            out_y.data[i] = float(sum_y[i] / count[i]);
        }
    }
    return {std::move(out_x), std::move(out_y)};
}

// Full ground-truth stack for a scene. Bit-identical to composing the
// per-person primitives with the aggregators above; this path just avoids
// materializing one plane per person.
inline FieldStack render_scene_fields(const Scene& scene, const SkeletonTopology& topo,
                                      const RenderParams& params) {
    if (params.sigma <= 0.0 || params.sigma_limb <= 0.0)
        throw error(errc::non_positive_sigma, "sigma and sigma_limb must be positive");
    validate_scene(scene, topo);

    FieldStack stack;
    stack.width = strided_extent(scene.width, params.stride);
    stack.height = strided_extent(scene.height, params.stride);
    const size_t n = size_t(stack.width) * stack.height;

    for (int j = 0; j < topo.part_count(); ++j) {
        Grid<float> plane(stack.width, stack.height, 0.0f);
        const double inv = 1.0 / (params.sigma * params.sigma);
        const double radius = params.sigma * std::sqrt(kZeroExpThreshold);
        for (const auto& person : scene.people) {
            if (!person.parts[j]) continue;
            const Vec2 c = person.parts[j]->pos;
            auto xr = detail::index_range(c.x - radius, c.x + radius, stack.width, params.stride);
            auto yr = detail::index_range(c.y - radius, c.y + radius, stack.height, params.stride);
            for (int iy = yr.lo; iy <= yr.hi; ++iy) {
                const double dy = strided_coord(iy, params.stride) - c.y;
                for (int ix = xr.lo; ix <= xr.hi; ++ix) {
                    const double dx = strided_coord(ix, params.stride) - c.x;
                    const float g = float(std::exp(-(dx * dx + dy * dy) * inv));
                    float& cell = plane(ix, iy);
                    cell = std::max(cell, g);
                }
            }
        }
        stack.confidence.push_back(std::move(plane));
    }

    std::vector<double> sum_x(n), sum_y(n);
    std::vector<uint16_t> count(n);
    for (int c = 0; c < topo.limb_count(); ++c) {
        std::fill(sum_x.begin(), sum_x.end(), 0.0);
        std::fill(sum_y.begin(), sum_y.end(), 0.0);
        std::fill(count.begin(), count.end(), uint16_t(0));
        const auto [j1, j2] = topo.limbs[c];
        for (const auto& person : scene.people) {
            if (!person.parts[j1] || !person.parts[j2]) continue;
            const Vec2 a = person.parts[j1]->pos;
            const Vec2 b = person.parts[j2]->pos;
            const Vec2 d = b - a;
            const double len = d.norm();
            if (len < 1e-12) throw error(errc::degenerate_limb, "limb '" + topo.parts[j1] + "'-'" +
                                                                    topo.parts[j2] + "' has coincident endpoints");
            const Vec2 v{d.x / len, d.y / len};
            const Vec2 vperp = v.perp();
            const float vx = float(v.x);
            const float vy = float(v.y);
            const double margin = params.sigma_limb + params.stride;
            auto xr = detail::index_range(std::min(a.x, b.x) - margin, std::max(a.x, b.x) + margin,
                                          stack.width, params.stride);
            auto yr = detail::index_range(std::min(a.y, b.y) - margin, std::max(a.y, b.y) + margin,
                                          stack.height, params.stride);
            for (int iy = yr.lo; iy <= yr.hi; ++iy) {
                const double ry = strided_coord(iy, params.stride) - a.y;
                for (int ix = xr.lo; ix <= xr.hi; ++ix) {
                    const double rx = strided_coord(ix, params.stride) - a.x;
                    const double along = v.x * rx + v.y * ry;
                    if (along < 0.0 || along > len) continue;
                    const double across = vperp.x * rx + vperp.y * ry;
                    if (std::abs(across) > params.sigma_limb) continue;
                    const size_t i = size_t(iy) * stack.width + ix;
                    sum_x[i] += vx;
                    sum_y[i] += vy;
                    ++count[i];
                }
            }
        }
        Grid<float> px(stack.width, stack.height, 0.0f);
        Grid<float> py(stack.width, stack.height, 0.0f);
        for (size_t i = 0; i < n; ++i) {
            if (count[i]) {
                px.data[i] = float(sum_x[i] / count[i]);
                py.data[i] = float(sum_y[i] / count[i]);
            }
        }
        stack.paf.push_back(std::move(px));
        stack.paf.push_back(std::move(py));
    }
    return stack;
}

struct LossPair {
    double f_paf = 0.0;   // summed squared PAF error under the mask
    double f_conf = 0.0;  // summed squared confidence error under the mask
};

// Masked L2 training losses between a predicted stack and ground truth.
// The binary mask zeroes pixels whose annotation is missing.
inline LossPair weighted_l2_loss(const FieldStack& pred, const FieldStack& gt,
                                 const Grid<uint8_t>& mask) {
    if (pred.width != gt.width || pred.height != gt.height ||
        pred.confidence.size() != gt.confidence.size() || pred.paf.size() != gt.paf.size())
        throw error(errc::dim_mismatch, "predicted and ground-truth stacks differ in shape");
    if (mask.width != pred.width || mask.height != pred.height)
        throw error(errc::dim_mismatch, "mask shape does not match the stacks");

    LossPair loss;
    for (size_t ch = 0; ch < pred.confidence.size(); ++ch) {
        const auto& p = pred.confidence[ch].data;
        const auto& g = gt.confidence[ch].data;
        for (size_t i = 0; i < p.size(); ++i) {
            if (!mask.data[i]) continue;
            const double d = double(p[i]) - double(g[i]);
            loss.f_conf += d * d;
        }
    }
    for (size_t ch = 0; ch < pred.paf.size(); ++ch) {
        const auto& p = pred.paf[ch].data;
        const auto& g = gt.paf[ch].data;
        for (size_t i = 0; i < p.size(); ++i) {
            if (!mask.data[i]) continue;
            const double d = double(p[i]) - double(g[i]);
            loss.f_paf += d * d;
        }
    }
    return loss;
}

}  // namespace paf
