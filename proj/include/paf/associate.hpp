// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "paf/detect.hpp"
#include "paf/geometry.hpp"

namespace paf {

enum class SampleMode {
    bilinear,  // default
    nearest,   // ablation only
};

struct AssocParams {
    int n_samples = 10;                 // uniformly spaced samples, endpoints included
    double min_score = 0.05;            // connection acceptance threshold on E
    double min_aligned_fraction = 0.8;  // fraction of samples whose local dot must exceed min_score
    SampleMode mode = SampleMode::bilinear;
};

// Line-integral result for one candidate pair: the mean dot product E and the
// fraction of samples individually aligned with the candidate direction.
struct LimbScore {
    double score = 0.0;
    double aligned_fraction = 0.0;
};

inline bool eligible(const LimbScore& s, const AssocParams& params) {
    return s.score > params.min_score && s.aligned_fraction >= params.min_aligned_fraction;
}

// Bilinear read with out-of-grid taps as zero. Pixel centers at integers.
inline double bilinear_at(const Grid<float>& g, double x, double y) {
    const int x0 = int(std::floor(x));
    const int y0 = int(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    auto tap = [&](int xi, int yi) -> double { return g.contains(xi, yi) ? g(xi, yi) : 0.0; };
    return (1.0 - fx) * (1.0 - fy) * tap(x0, y0) + fx * (1.0 - fy) * tap(x0 + 1, y0) +
           (1.0 - fx) * fy * tap(x0, y0 + 1) + fx * fy * tap(x0 + 1, y0 + 1);
}

inline double nearest_at(const Grid<float>& g, double x, double y) {
    const int xi = int(std::lround(x));
    const int yi = int(std::lround(y));
    return g.contains(xi, yi) ? g(xi, yi) : 0.0;
}

// E for one candidate pair: the PAF sampled at n uniformly spaced points on
// the segment d1 -> d2, dotted with the segment's unit direction, averaged.
inline LimbScore line_integral(const Grid<float>& paf_x, const Grid<float>& paf_y, Vec2 d1, Vec2 d2,
                               const AssocParams& params) {
    if (params.n_samples < 2) throw error(errc::bad_argument, "n_samples must be at least 2");
    const Vec2 d = d2 - d1;
    const double len = d.norm();
    if (len < 1e-12) throw error(errc::coincident_candidates, "candidate pair coincides");
    const Vec2 v{d.x / len, d.y / len};

    double sum = 0.0;
    int aligned = 0;
    for (int i = 0; i < params.n_samples; ++i) {
        const double u = double(i) / (params.n_samples - 1);
        const Vec2 p = d1 + d * u;
        const double lx = params.mode == SampleMode::bilinear ? bilinear_at(paf_x, p.x, p.y)
                                                              : nearest_at(paf_x, p.x, p.y);
        const double ly = params.mode == SampleMode::bilinear ? bilinear_at(paf_y, p.x, p.y)
                                                              : nearest_at(paf_y, p.x, p.y);
        const double dot = lx * v.x + ly * v.y;
        sum += dot;
        if (dot > params.min_score) ++aligned;
    }
    return {sum / params.n_samples, double(aligned) / params.n_samples};
}

inline double line_integral_score(const Grid<float>& paf_x, const Grid<float>& paf_y, Vec2 d1,
                                  Vec2 d2, const AssocParams& params = {}) {
    return line_integral(paf_x, paf_y, d1, d2, params).score;
}

// Dense score matrix: rows index candidates of the limb's source part,
// columns candidates of its destination part.
struct ScoreMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<LimbScore> cells;  // row-major

    ScoreMatrix() = default;
    ScoreMatrix(int r, int c) : rows(r), cols(c), cells(size_t(r) * size_t(c)) {}

    LimbScore& at(int m, int n) { return cells[size_t(m) * cols + n]; }
    const LimbScore& at(int m, int n) const { return cells[size_t(m) * cols + n]; }

    // Test / tooling convenience: plain values, fully aligned.
    static ScoreMatrix from_values(const std::vector<std::vector<double>>& vals) {
        ScoreMatrix m(int(vals.size()), vals.empty() ? 0 : int(vals[0].size()));
        for (int r = 0; r < m.rows; ++r)
            for (int c = 0; c < m.cols; ++c) m.at(r, c) = {vals[r][c], 1.0};
        return m;
    }
};

// Scores every candidate pair of one limb. Coincident pairs (degenerate
// segments) score as zero / unaligned rather than throwing: a matrix must be
// total for the matchers.
inline ScoreMatrix score_matrix(const Grid<float>& paf_x, const Grid<float>& paf_y,
                                const std::vector<PartCandidate>& src,
                                const std::vector<PartCandidate>& dst, const AssocParams& params) {
    ScoreMatrix m(int(src.size()), int(dst.size()));
    for (int a = 0; a < m.rows; ++a) {
        for (int b = 0; b < m.cols; ++b) {
            if ((src[a].pos - dst[b].pos).norm() < 1e-12) {
                m.at(a, b) = {0.0, 0.0};
            } else {
                m.at(a, b) = line_integral(paf_x, paf_y, src[a].pos, dst[b].pos, params);
            }
        }
    }
    return m;
}

namespace detail {

// O(n^3) Kuhn-Munkres with potentials on a square cost matrix (minimization).
// Returns row_of[col]. Classic shortest-augmenting-path formulation.
inline std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost) {
    const int n = int(cost.size());
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_of(n);
    for (int j = 1; j <= n; ++j) row_of[j - 1] = p[j] - 1;
    return row_of;
}

}  // namespace detail

// Optimal partial matching: maximizes total E over one-to-one assignments
// (negative pairs are never worth taking), then drops pairs that fail the
// acceptance rule. Pairs come back sorted by (row, col).
inline std::vector<std::pair<int, int>> hungarian_match(const ScoreMatrix& m,
                                                        const AssocParams& params = {}) {
    if (m.rows == 0 || m.cols == 0) return {};
    const int n = std::max(m.rows, m.cols);
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) cost[r][c] = -std::max(m.at(r, c).score, 0.0);
    const auto row_of = detail::solve_assignment(cost);
    std::vector<std::pair<int, int>> out;
    for (int c = 0; c < n; ++c) {
        const int r = row_of[c];
        if (r >= m.rows || c >= m.cols) continue;
        if (m.at(r, c).score <= 0.0) continue;  // padding-equivalent, not a real match
        if (!eligible(m.at(r, c), params)) continue;
        out.emplace_back(r, c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Greedy matching: eligible pairs by descending E (ties lexicographic by
// (row, col)), accepting whenever both endpoints are still free.
inline std::vector<std::pair<int, int>> greedy_match(const ScoreMatrix& m,
                                                     const AssocParams& params = {}) {
    struct Entry {
        double score;
        int r, c;
    };
    std::vector<Entry> entries;
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c)
            if (eligible(m.at(r, c), params)) entries.push_back({m.at(r, c).score, r, c});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.r != b.r) return a.r < b.r;
        return a.c < b.c;
    });
    std::vector<char> row_used(m.rows, 0), col_used(m.cols, 0);
    std::vector<std::pair<int, int>> out;
    for (const auto& e : entries) {
        if (row_used[e.r] || col_used[e.c]) continue;
        row_used[e.r] = 1;
        col_used[e.c] = 1;
        out.emplace_back(e.r, e.c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline double matching_total(const ScoreMatrix& m, const std::vector<std::pair<int, int>>& pairs) {
    double total = 0.0;
    for (auto [r, c] : pairs) total += m.at(r, c).score;
    return total;
}

}  // namespace paf
