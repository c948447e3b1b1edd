// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <vector>

#include "paf/fieldgen.hpp"
#include "paf/geometry.hpp"
#include "paf/topology.hpp"

namespace paf {

// One detected peak in a confidence plane. pos may be sub-pixel after
// refinement; (peak_x, peak_y) is the integer maximum it came from, and score
// is the confidence value there.
struct PartCandidate {
    int part = 0;
    int index = 0;  // position within this part's candidate list
    Vec2 pos;
    double score = 0.0;
    int peak_x = 0;
    int peak_y = 0;
};

struct DetectParams {
    double threshold = 0.1;  // peaks must exceed this confidence
    int window_radius = 3;   // strict maximum over the (2r+1)^2 neighborhood
    bool refine = true;      // quadratic sub-pixel refinement
};

// Separable 3x3 quadratic fit around an interior integer peak. Each axis fits
// a parabola through the three samples and moves to its vertex, clamped to
// half a pixel. Border peaks are returned unchanged by the caller.
inline Vec2 subpixel_refine(const Grid<float>& plane, int px, int py) {
    auto vertex_offset = [](double fm, double f0, double fp) {
        const double denom = fm - 2.0 * f0 + fp;
        if (denom == 0.0) return 0.0;
        const double off = 0.5 * (fm - fp) / denom;
        return std::clamp(off, -0.5, 0.5);
    };
    const double ox = vertex_offset(plane(px - 1, py), plane(px, py), plane(px + 1, py));
    const double oy = vertex_offset(plane(px, py - 1), plane(px, py), plane(px, py + 1));
    return {px + ox, py + oy};
}

// Non-maximum suppression: every pixel above threshold that is a strict
// maximum of its clipped (2r+1)^2 window. Exact ties resolve toward the
// lexicographically smallest (row, col), so plateaus yield one peak.
// Candidates come back ordered by descending score, ties by (row, col).
inline std::vector<PartCandidate> nms_peaks(const Grid<float>& plane, const DetectParams& params,
                                            int part = 0) {
    std::vector<PartCandidate> out;
    const int r = params.window_radius;
    for (int y = 0; y < plane.height; ++y) {
        for (int x = 0; x < plane.width; ++x) {
            const float v = plane(x, y);
            if (!(v > params.threshold)) continue;
            bool is_peak = true;
            for (int dy = -r; dy <= r && is_peak; ++dy) {
                const int ny = y + dy;
                if (ny < 0 || ny >= plane.height) continue;
                for (int dx = -r; dx <= r; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx;
                    if (nx < 0 || nx >= plane.width) continue;
                    const float nv = plane(nx, ny);
                    if (nv > v || (nv == v && (ny < y || (ny == y && nx < x)))) {
                        is_peak = false;
                        break;
                    }
                }
            }
            if (!is_peak) continue;
            PartCandidate cand;
            cand.part = part;
            cand.score = v;
            cand.peak_x = x;
            cand.peak_y = y;
            const bool interior =
                x > 0 && y > 0 && x < plane.width - 1 && y < plane.height - 1;
            cand.pos = (params.refine && interior) ? subpixel_refine(plane, x, y)
                                                   : Vec2{double(x), double(y)};
            out.push_back(cand);
        }
    }
    std::sort(out.begin(), out.end(), [](const PartCandidate& a, const PartCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.peak_y != b.peak_y) return a.peak_y < b.peak_y;
        return a.peak_x < b.peak_x;
    });
    for (size_t i = 0; i < out.size(); ++i) out[i].index = int(i);
    return out;
}

// Peaks for every part channel of a stack.
inline std::vector<std::vector<PartCandidate>> detect_candidates(const FieldStack& stack,
                                                                 const SkeletonTopology& topo,
                                                                 const DetectParams& params) {
    if (int(stack.confidence.size()) != topo.part_count())
        throw error(errc::topology_field_mismatch,
                    "stack has " + std::to_string(stack.confidence.size()) +
                        " confidence planes, topology declares " + std::to_string(topo.part_count()));
    std::vector<std::vector<PartCandidate>> out(topo.part_count());
    for (int j = 0; j < topo.part_count(); ++j) out[j] = nms_peaks(stack.confidence[j], params, j);
    return out;
}

}  // namespace paf
