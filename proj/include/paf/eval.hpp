// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "paf/detect.hpp"
#include "paf/parse.hpp"
#include "paf/rng.hpp"
#include "paf/scene.hpp"

namespace paf {

// Sampling prior for one limb: how far from its parent the child part sits,
// in units of person scale, and the limb's absolute direction in radians.
struct LimbPrior {
    double length = 0.25;
    double length_jitter = 0.08;  // relative, multiplicative
    double angle = 0.0;
    double angle_jitter = 0.12;   // radians, additive
};

// Everything a seeded scene draw depends on.
struct SceneSpec {
    uint64_t seed = 1;
    int scenes = 100;  // number of scenes a suite evaluates
    int min_people = 1;
    int max_people = 8;
    double min_scale = 50.0;
    double max_scale = 70.0;
    int width = 368;
    int height = 368;
    double min_separation = 40.0;  // min distance between parts of different people
    SkeletonTopology topology;
    std::vector<LimbPrior> priors;  // one per limb; default-filled when empty
};

namespace detail {

// Canonical stick-figure offsets for the 18-part reference body, in person
// scale units relative to the neck. x grows right, y grows down.
inline const std::vector<Vec2>& coco18_offsets() {
    static const std::vector<Vec2> offsets = {
        {0.00, -0.20},  // nose
        {0.00, 0.00},   // neck
        {-0.17, 0.01},  // right_shoulder
        {-0.21, 0.22},  // right_elbow
        {-0.23, 0.42},  // right_wrist
        {0.17, 0.01},   // left_shoulder
        {0.21, 0.22},   // left_elbow
        {0.23, 0.42},   // left_wrist
        {-0.10, 0.40},  // right_hip
        {-0.11, 0.64},  // right_knee
        {-0.12, 0.88},  // right_ankle
        {0.10, 0.40},   // left_hip
        {0.11, 0.64},   // left_knee
        {0.12, 0.88},   // left_ankle
        {-0.04, -0.24}, // right_eye
        {0.04, -0.24},  // left_eye
        {-0.09, -0.21}, // right_ear
        {0.09, -0.21},  // left_ear
    };
    return offsets;
}

}  // namespace detail

// Limb priors derived from canonical part offsets (one offset per part,
// relative to the root). Works for any topology.
inline std::vector<LimbPrior> priors_from_offsets(const SkeletonTopology& topo,
                                                  const std::vector<Vec2>& offsets) {
    std::vector<LimbPrior> priors(topo.limb_count());
    for (int c = 0; c < topo.limb_count(); ++c) {
        const auto [a, b] = topo.limbs[c];
        const Vec2 d = offsets[b] - offsets[a];
        priors[c].length = d.norm();
        priors[c].angle = std::atan2(d.y, d.x);
    }
    return priors;
}

// Reference-body priors when the topology matches the 18-part body; otherwise
// a deterministic golden-angle fan that keeps limbs from collapsing.
inline std::vector<LimbPrior> default_limb_priors(const SkeletonTopology& topo) {
    if (topo.part_count() == 18 && topo.limb_count() == 19 &&
        topology_hash(topo) == topology_hash(coco18_topology()))
        return priors_from_offsets(topo, detail::coco18_offsets());
    std::vector<LimbPrior> priors(topo.limb_count());
    for (int c = 0; c < topo.limb_count(); ++c) {
        const double frac = std::fmod(0.618033988749895 * (c + 1), 1.0);
        priors[c].angle = 2.0 * std::numbers::pi * frac;
        priors[c].length = 0.25;
    }
    return priors;
}

namespace detail {

// Tree traversal order: (limb, parent part, child part), parents first.
inline std::vector<std::tuple<int, int, int>> articulation_order(const SkeletonTopology& topo,
                                                                 const EdgeClassification& edges) {
    std::vector<std::tuple<int, int, int>> order;
    std::vector<char> placed(topo.part_count(), 0);
    placed[topo.root] = 1;
    std::vector<char> used(topo.limb_count(), 0);
    bool progress = true;
    while (progress) {
        progress = false;
        for (int c : edges.tree_edges) {
            if (used[c]) continue;
            const auto [a, b] = topo.limbs[c];
            if (placed[a] && !placed[b]) {
                order.emplace_back(c, a, b);
                placed[b] = used[c] = 1;
                progress = true;
            } else if (placed[b] && !placed[a]) {
                order.emplace_back(c, b, a);
                placed[a] = used[c] = 1;
                progress = true;
            }
        }
    }
    return order;
}

}  // namespace detail

// One articulated person: root position given, each tree limb sampling a
// length and absolute angle from its prior.
inline PersonAnnotation articulate_person(const SkeletonTopology& topo,
                                          const std::vector<std::tuple<int, int, int>>& order,
                                          const std::vector<LimbPrior>& priors, Vec2 root_pos,
                                          double scale, Rng& rng) {
    PersonAnnotation person;
    person.parts.resize(topo.part_count());
    std::vector<Vec2> pos(topo.part_count());
    pos[topo.root] = root_pos;
    for (const auto& [c, parent, child] : order) {
        const LimbPrior& prior = priors[c];
        const double len = scale * prior.length * (1.0 + prior.length_jitter * rng.uniform(-1.0, 1.0));
        const double ang = prior.angle + prior.angle_jitter * rng.uniform(-1.0, 1.0);
        Vec2 step{len * std::cos(ang), len * std::sin(ang)};
        const auto [a, b] = topo.limbs[c];
        // Priors describe the declared src->dst direction; flip when the tree
        // reaches the limb from the dst side.
        if (parent == b) step = step * -1.0;
        pos[child] = pos[parent] + step;
    }
    for (int j = 0; j < topo.part_count(); ++j) person.parts[j] = Keypoint{pos[j], false};
    return person;
}

// Seeded scene draw: people count, scales, placements, and articulation all
// from one generator, with rejection sampling to honor the separation and
// in-bounds constraints. Deterministic given the spec.
inline Scene random_scene(const SceneSpec& spec) {
    const SkeletonTopology& topo = spec.topology;
    const EdgeClassification edges = classify_edges(topo);
    const auto order = detail::articulation_order(topo, edges);
    const std::vector<LimbPrior> priors =
        spec.priors.empty() ? default_limb_priors(topo) : spec.priors;
    if (int(priors.size()) != topo.limb_count())
        throw error(errc::dim_mismatch, "limb prior table does not match the limb count");

    Rng rng(spec.seed);
    const int target = rng.uniform_between(spec.min_people, spec.max_people);
    constexpr double kEdgeMargin = 2.0;  // keep peaks interior so refinement applies

    auto fits = [&](const PersonAnnotation& person, const std::vector<PersonAnnotation>& placed) {
        for (const auto& kp : person.parts) {
            const Vec2 p = kp->pos;
            if (p.x < kEdgeMargin || p.y < kEdgeMargin || p.x >= spec.width - kEdgeMargin ||
                p.y >= spec.height - kEdgeMargin)
                return false;
        }
        for (const auto& other : placed)
            for (const auto& kp : person.parts)
                for (const auto& okp : other.parts)
                    if ((kp->pos - okp->pos).norm() < spec.min_separation) return false;
        return true;
    };

    for (int scene_attempt = 0; scene_attempt < 40; ++scene_attempt) {
        Scene scene;
        scene.width = spec.width;
        scene.height = spec.height;
        bool ok = true;
        for (int i = 0; i < target && ok; ++i) {
            bool placed = false;
            for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
                const double scale = rng.uniform(spec.min_scale, spec.max_scale);
                const Vec2 root{rng.uniform(0.0, spec.width), rng.uniform(0.0, spec.height)};
                PersonAnnotation person = articulate_person(topo, order, priors, root, scale, rng);
                if (fits(person, scene.people)) {
                    scene.people.push_back(std::move(person));
                    placed = true;
                }
            }
            ok = placed;
        }
        if (ok) return scene;
    }
    throw error(errc::infeasible_spec,
                "could not place " + std::to_string(target) + " people at separation " +
                    std::to_string(spec.min_separation) + " on a " + std::to_string(spec.width) +
                    "x" + std::to_string(spec.height) + " grid");
}

// --- Metrics ----------------------------------------------------------------

// Ground-truth person scale: diagonal of the annotated bounding box over
// sqrt(2), floored at one pixel so degenerate annotations stay finite.
inline double person_scale(const PersonAnnotation& gt) {
    bool any = false;
    Vec2 lo{0, 0}, hi{0, 0};
    for (const auto& kp : gt.parts) {
        if (!kp) continue;
        if (!any) {
            lo = hi = kp->pos;
            any = true;
        } else {
            lo.x = std::min(lo.x, kp->pos.x);
            lo.y = std::min(lo.y, kp->pos.y);
            hi.x = std::max(hi.x, kp->pos.x);
            hi.y = std::max(hi.y, kp->pos.y);
        }
    }
    if (!any) throw error(errc::no_annotated_parts, "ground-truth person has no annotated parts");
    return std::max((hi - lo).norm() / std::numbers::sqrt2, 1.0);
}

// Object keypoint similarity: mean over annotated ground-truth parts of
// exp(-d^2 / (2 s^2 kappa^2)); parts missing from the prediction contribute 0.
inline double oks(const PersonParse& pred, const PersonAnnotation& gt, double gt_scale,
                  const std::vector<double>& kappas = {}, double kappa_uniform = 0.08) {
    double sum = 0.0;
    int annotated = 0;
    for (size_t j = 0; j < gt.parts.size(); ++j) {
        if (!gt.parts[j]) continue;
        ++annotated;
        if (j >= pred.parts.size() || !pred.parts[j]) continue;
        const double kappa = kappas.empty() ? kappa_uniform : kappas[j];
        const Vec2 d = pred.parts[j]->pos - gt.parts[j]->pos;
        sum += std::exp(-d.dot(d) / (2.0 * gt_scale * gt_scale * kappa * kappa));
    }
    if (annotated == 0) throw error(errc::no_annotated_parts, "OKS needs at least one annotated part");
    return sum / annotated;
}

// Fraction of annotated parts the prediction places within alpha * head_size.
inline double pckh(const PersonParse& pred, const PersonAnnotation& gt, double head_size,
                   double alpha = 0.5) {
    int annotated = 0;
    int hits = 0;
    for (size_t j = 0; j < gt.parts.size(); ++j) {
        if (!gt.parts[j]) continue;
        ++annotated;
        if (j >= pred.parts.size() || !pred.parts[j]) continue;
        if ((pred.parts[j]->pos - gt.parts[j]->pos).norm() <= alpha * head_size) ++hits;
    }
    if (annotated == 0) throw error(errc::no_annotated_parts, "PCKh needs at least one annotated part");
    return double(hits) / annotated;
}

// Head size estimate for synthetic people: twice the nose-neck distance when
// both are annotated, else a fraction of the person scale.
inline double head_size(const PersonAnnotation& gt, const SkeletonTopology& topo) {
    const int nose = topo.part_index("nose");
    const int neck = topo.part_index("neck");
    if (nose >= 0 && neck >= 0 && gt.parts[nose] && gt.parts[neck])
        return 2.0 * (gt.parts[nose]->pos - gt.parts[neck]->pos).norm();
    return 0.6 * person_scale(gt);
}

// --- Reports ----------------------------------------------------------------

struct StrategySummary {
    std::string name;
    double total_score = 0.0;
    double mean_ap = 0.0;
    double wall_ms = 0.0;
};

struct MatchReport {
    int scenes = 0;
    int gt_people = 0;
    int predictions = 0;
    std::vector<double> oks_thresholds;
    std::vector<double> precision;  // per threshold
    std::vector<double> recall;     // per threshold
    std::vector<double> ap;         // per threshold
    double mean_ap = 0.0;
    double pckh05 = 0.0;
    std::optional<double> pose_recall;  // empty when the suite saw no people
    int false_positives = 0;
    double mean_localization_error = 0.0;            // px, refined candidates
    double mean_localization_error_unrefined = 0.0;  // px, integer peaks
    std::vector<StrategySummary> strategies;         // strategy comparison only
    double greedy_exhaustive_ratio = 1.0;
    bool score_bound_ok = true;
    double speed_ratio = 0.0;  // exhaustive wall-time / greedy wall-time
    double wall_ms = 0.0;
};

namespace detail {

struct MatchedPrediction {
    double person_score = 0.0;
    double oks = 0.0;      // 0 when unmatched
    bool matched = false;  // paired with a ground-truth person at any OKS
};

struct SceneMatch {
    std::vector<MatchedPrediction> preds;          // one per prediction
    std::vector<std::pair<int, int>> pairs;        // (pred index, gt index)
};

// Greedy one-to-one pairing by descending OKS within one scene.
inline SceneMatch match_scene(const std::vector<PersonParse>& preds,
                              const std::vector<PersonAnnotation>& gts) {
    struct Pair {
        double oks;
        int pred, gt;
    };
    std::vector<Pair> pairs;
    std::vector<double> scales(gts.size());
    for (size_t g = 0; g < gts.size(); ++g) scales[g] = person_scale(gts[g]);
    for (size_t p = 0; p < preds.size(); ++p)
        for (size_t g = 0; g < gts.size(); ++g)
            pairs.push_back({oks(preds[p], gts[g], scales[g]), int(p), int(g)});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.oks != b.oks) return a.oks > b.oks;
        if (a.pred != b.pred) return a.pred < b.pred;
        return a.gt < b.gt;
    });
    SceneMatch out;
    out.preds.resize(preds.size());
    for (size_t p = 0; p < preds.size(); ++p) out.preds[p].person_score = preds[p].score;
    std::vector<char> pred_used(preds.size(), 0), gt_used(gts.size(), 0);
    for (const auto& pr : pairs) {
        if (pred_used[pr.pred] || gt_used[pr.gt]) continue;
        pred_used[pr.pred] = gt_used[pr.gt] = 1;
        out.preds[pr.pred].matched = true;
        out.preds[pr.pred].oks = pr.oks;
        out.pairs.emplace_back(pr.pred, pr.gt);
    }
    return out;
}

// VOC-style AP at one OKS threshold: predictions ranked by person score,
// each true positive contributing the precision at its rank.
inline double average_precision(std::vector<MatchedPrediction> preds, int total_gt, double thr) {
    if (total_gt == 0) return 0.0;
    std::stable_sort(preds.begin(), preds.end(),
                     [](const MatchedPrediction& a, const MatchedPrediction& b) {
                         return a.person_score > b.person_score;
                     });
    double ap = 0.0;
    int tp = 0;
    for (size_t k = 0; k < preds.size(); ++k) {
        if (preds[k].matched && preds[k].oks >= thr) {
            ++tp;
            ap += double(tp) / double(k + 1);
        }
    }
    return ap / total_gt;
}

}  // namespace detail

// Renders seeded scenes, runs the full detect-associate-parse pipeline, and
// scores the recovered poses against the ground truth they were built from.
inline MatchReport roundtrip_suite(const SceneSpec& spec, const RenderParams& render,
                                   const ParseConfig& parse_config,
                                   const DetectParams& detect_params = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    const SkeletonTopology& topo = spec.topology;
    const EdgeClassification edges = classify_edges(topo);

    MatchReport report;
    report.scenes = spec.scenes;
    for (double t = 0.50; t < 0.951; t += 0.05) report.oks_thresholds.push_back(t);

    std::vector<detail::MatchedPrediction> all_preds;
    double pckh_num = 0.0;
    int pckh_den = 0;
    int matched_at_half = 0;
    double loc_sum = 0.0, loc_sum_unrefined = 0.0;
    long loc_count = 0;

    for (int s = 0; s < spec.scenes; ++s) {
        SceneSpec scene_spec = spec;
        scene_spec.seed = derive_seed(spec.seed, uint64_t(s));
        const Scene scene = random_scene(scene_spec);
        const FieldStack stack = render_scene_fields(scene, topo, render);
        const auto candidates = detect_candidates(stack, topo, detect_params);
        ParseResult result = parse_poses(candidates, stack, topo, edges, parse_config);
        // Detection and parsing live in plane coordinates; ground truth is in
        // pixels, so down-sampled runs map back before scoring.
        if (render.stride != 1)
            for (auto& person : result.people)
                for (auto& part : person.parts)
                    if (part) part->pos = plane_to_pixel(part->pos, render.stride);

        report.gt_people += int(scene.people.size());
        report.predictions += int(result.people.size());
        const detail::SceneMatch match = detail::match_scene(result.people, scene.people);

        for (const auto& gt : scene.people) pckh_den += gt.annotated_count();
        for (const auto& [p, g] : match.pairs) {
            if (match.preds[p].oks < 0.5) continue;
            ++matched_at_half;
            const auto& gt = scene.people[g];
            const auto& pd = result.people[p];
            pckh_num += pckh(pd, gt, head_size(gt, topo), 0.5) * gt.annotated_count();
            for (size_t j = 0; j < gt.parts.size(); ++j) {
                if (!gt.parts[j] || !pd.parts[j]) continue;
                loc_sum += (pd.parts[j]->pos - gt.parts[j]->pos).norm();
                const auto& cand = candidates[j][pd.parts[j]->candidate];
                const Vec2 peak{strided_coord(cand.peak_x, render.stride),
                                strided_coord(cand.peak_y, render.stride)};
                loc_sum_unrefined += (peak - gt.parts[j]->pos).norm();
                ++loc_count;
            }
        }
        for (const auto& mp : match.preds)
            if (!mp.matched || mp.oks < 0.5) ++report.false_positives;
        all_preds.insert(all_preds.end(), match.preds.begin(), match.preds.end());
    }

    for (double t : report.oks_thresholds) {
        int tp = 0;
        for (const auto& mp : all_preds)
            if (mp.matched && mp.oks >= t) ++tp;
        report.precision.push_back(report.predictions ? double(tp) / report.predictions : 0.0);
        report.recall.push_back(report.gt_people ? double(tp) / report.gt_people : 0.0);
        report.ap.push_back(detail::average_precision(all_preds, report.gt_people, t));
    }
    if (!report.ap.empty()) {
        double sum = 0.0;
        for (double a : report.ap) sum += a;
        report.mean_ap = sum / report.ap.size();
    }
    if (report.gt_people > 0) report.pose_recall = double(matched_at_half) / report.gt_people;
    report.pckh05 = pckh_den ? pckh_num / pckh_den : 0.0;
    report.mean_localization_error = loc_count ? loc_sum / loc_count : 0.0;
    report.mean_localization_error_unrefined = loc_count ? loc_sum_unrefined / loc_count : 0.0;
    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

// Runs the same seeded scenes through greedy parsing, optimal per-limb
// matching, and the exhaustive joint oracle, and compares total scores and
// wall time. Scenes must stay inside the exhaustive guard.
inline MatchReport compare_strategies(const SceneSpec& spec, const RenderParams& render,
                                      const ParseConfig& base_config,
                                      const DetectParams& detect_params = {}) {
    const SkeletonTopology& topo = spec.topology;
    const EdgeClassification edges = classify_edges(topo);
    const auto t0 = std::chrono::steady_clock::now();

    MatchReport report;
    report.scenes = spec.scenes;
    for (double t = 0.50; t < 0.951; t += 0.05) report.oks_thresholds.push_back(t);

    struct Strategy {
        std::string name;
        double total = 0.0;
        double wall = 0.0;
        std::vector<detail::MatchedPrediction> preds;
    };
    std::vector<Strategy> strategies(3);
    strategies[0].name = "greedy";
    strategies[1].name = "hungarian";
    strategies[2].name = "exhaustive";

    for (int s = 0; s < spec.scenes; ++s) {
        SceneSpec scene_spec = spec;
        scene_spec.seed = derive_seed(spec.seed, uint64_t(s));
        const Scene scene = random_scene(scene_spec);
        const FieldStack stack = render_scene_fields(scene, topo, render);
        const auto candidates = detect_candidates(stack, topo, detect_params);
        report.gt_people += int(scene.people.size());

        std::vector<ScoreMatrix> matrices;
        for (int c = 0; c < topo.limb_count(); ++c)
            matrices.push_back(score_matrix(stack.paf[topo.paf_channel_x(c)],
                                            stack.paf[topo.paf_channel_y(c)], candidates[topo.limbs[c].first],
                                            candidates[topo.limbs[c].second], base_config.assoc));

        for (auto& strat : strategies) {
            const auto st = std::chrono::steady_clock::now();
            ParseResult result;
            if (strat.name == "exhaustive") {
                result = exhaustive_parse(candidates, matrices, topo, base_config.assoc);
            } else {
                ParseConfig cfg = base_config;
                cfg.matcher = strat.name == "greedy" ? Matcher::greedy : Matcher::hungarian;
                result = parse_poses(candidates, stack, topo, edges, cfg);
            }
            strat.wall +=
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - st)
                    .count();
            strat.total += total_score(result);
            const detail::SceneMatch match = detail::match_scene(result.people, scene.people);
            strat.preds.insert(strat.preds.end(), match.preds.begin(), match.preds.end());
        }
    }

    double greedy_total = 0.0, exhaustive_total = 0.0, greedy_wall = 0.0, exhaustive_wall = 0.0;
    for (auto& strat : strategies) {
        StrategySummary summary;
        summary.name = strat.name;
        summary.total_score = strat.total;
        summary.wall_ms = strat.wall;
        double sum = 0.0;
        for (double t : report.oks_thresholds)
            sum += detail::average_precision(strat.preds, report.gt_people, t);
        summary.mean_ap = report.oks_thresholds.empty() ? 0.0 : sum / report.oks_thresholds.size();
        if (strat.name == "greedy") {
            greedy_total = strat.total;
            greedy_wall = strat.wall;
        }
        if (strat.name == "exhaustive") {
            exhaustive_total = strat.total;
            exhaustive_wall = strat.wall;
        }
        report.strategies.push_back(summary);
    }
    report.greedy_exhaustive_ratio =
        exhaustive_total > 0.0 ? greedy_total / exhaustive_total : 1.0;
    report.score_bound_ok = greedy_total >= 0.95 * exhaustive_total;
    report.speed_ratio = greedy_wall > 0.0 ? exhaustive_wall / greedy_wall : 0.0;
    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

// --- Latency ----------------------------------------------------------------

struct LatencyStats {
    int n_people = 0;
    int repetitions = 0;
    double mean_ms = 0.0;
    double p50_ms = 0.0;
    double p95_ms = 0.0;
    double score_checksum = 0.0;  // keeps the timed work observable
};

struct BenchParams {
    uint64_t seed = 424242;
    int width = 368;
    int height = 368;
    double min_scale = 38.0;
    double max_scale = 46.0;
    double min_separation = 25.0;
    SkeletonTopology topology;  // defaults to the 18-part reference body
};

// Times parse_poses alone: the scene is rendered and detected once, outside
// the timed region.
inline LatencyStats bench_parse(int n_people, int repetitions, const BenchParams& params = {},
                                const ParseConfig& parse_config = {}) {
    if (repetitions <= 0) throw error(errc::empty_benchmark, "repetitions must be positive");
    SceneSpec spec;
    spec.topology = params.topology.part_count() ? params.topology : coco18_topology();
    spec.seed = derive_seed(params.seed, uint64_t(n_people));
    spec.min_people = spec.max_people = n_people;
    spec.width = params.width;
    spec.height = params.height;
    spec.min_scale = params.min_scale;
    spec.max_scale = params.max_scale;
    spec.min_separation = params.min_separation;

    const EdgeClassification edges = classify_edges(spec.topology);
    const Scene scene = random_scene(spec);
    const FieldStack stack = render_scene_fields(scene, spec.topology, RenderParams{});
    const auto candidates = detect_candidates(stack, spec.topology, DetectParams{});

    LatencyStats stats;
    stats.n_people = n_people;
    stats.repetitions = repetitions;
    std::vector<double> samples(repetitions);
    for (int r = 0; r < repetitions; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const ParseResult result = parse_poses(candidates, stack, spec.topology, edges, parse_config);
        const auto t1 = std::chrono::steady_clock::now();
        samples[r] = std::chrono::duration<double, std::milli>(t1 - t0).count();
        stats.score_checksum += total_score(result);
    }
    double sum = 0.0;
    for (double s : samples) sum += s;
    stats.mean_ms = sum / repetitions;
    std::sort(samples.begin(), samples.end());
    stats.p50_ms = samples[repetitions / 2];
    stats.p95_ms = samples[std::min(repetitions - 1, (repetitions * 95) / 100)];
    return stats;
}

}  // namespace paf
