// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end for the part-affinity-field toolkit.
//
// Subcommands:
//   gen        render ground-truth fields for a seeded random scene
//   detect     extract part candidates from a field file
//   parse      recover multi-person poses from a field file
//   roundtrip  scene -> fields -> poses evaluation suite
//   compare    greedy vs. optimal vs. exhaustive association strategies
//   bench      parse-stage latency benchmark
//
// Exit codes: 0 success, 1 usage error, 2 data/runtime error,
//             3 requested quality assertion failed.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "paf/paf.hpp"

namespace {

struct Range {
    double lo = 0;
    double hi = 0;
};

// "N" or "LO:HI".
Range parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        const double v = std::stod(text);
        return {v, v};
    }
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        out.push_back(std::stoi(text.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

paf::SkeletonTopology resolve_topology(const std::string& path) {
    if (path.empty()) return paf::coco18_topology();
    return paf::load_topology(path);
}

// Five-part star used by `compare` when no topology is given: small enough
// for the exhaustive strategy to enumerate.
paf::SkeletonTopology mini5_topology() {
    paf::RawTopology raw;
    raw.name = "mini5";
    raw.parts = {"head", "neck", "pelvis", "l_foot", "r_foot"};
    raw.limbs = {{"neck", "head"}, {"neck", "pelvis"}, {"pelvis", "l_foot"}, {"pelvis", "r_foot"}};
    raw.root = "neck";
    return paf::validate_topology(raw);
}

void emit(const nlohmann::json& doc, const std::string& out_path) {
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty())
        std::fwrite(text.data(), 1, text.size(), stdout);
    else
        paf::atomic_write(out_path, text);
}

void emit_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::fwrite(text.data(), 1, text.size(), stdout);
    else
        paf::atomic_write(out_path, text);
}

struct CommonOptions {
    std::string topology_path;
    std::string out_path;
    bool human = false;
    uint64_t seed = 1;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"part affinity field toolkit: ground-truth field synthesis, candidate "
                 "detection, pairwise association, and multi-person parsing"};
    app.require_subcommand(1);

    // --- gen -----------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "render ground-truth fields for a seeded random scene");
    struct {
        CommonOptions common;
        std::string base;
        std::string people = "1:8";
        std::string scale = "50:70";
        double min_sep = 40.0;
        int width = 368, height = 368;
        double sigma = 7.0, sigma_limb = 8.0;
        int stride = 1;
    } g;
    gen->add_option("--out", g.base, "output base path (writes BASE.scene.json and BASE.paff)")
        ->required();
    gen->add_option("--topology", g.common.topology_path, "topology JSON file (default: 18-part body)");
    gen->add_option("--seed", g.common.seed, "random seed");
    gen->add_option("--people", g.people, "person count, N or MIN:MAX");
    gen->add_option("--scale", g.scale, "person scale in px, N or LO:HI");
    gen->add_option("--min-sep", g.min_sep, "min distance between parts of different people (px)");
    gen->add_option("--width", g.width, "grid width");
    gen->add_option("--height", g.height, "grid height");
    gen->add_option("--sigma", g.sigma, "confidence peak width (px)");
    gen->add_option("--sigma-limb", g.sigma_limb, "limb band half-width (px)");
    gen->add_option("--stride", g.stride, "output stride (1 = full resolution)");
    gen->add_flag("--human", g.common.human, "human-readable summary instead of JSON");

    // --- detect ----------------------------------------------------------------
    auto* detect = app.add_subcommand("detect", "extract part candidates from a field file");
    struct {
        CommonOptions common;
        std::string fields;
        double threshold = 0.1;
        int window = 3;
        bool no_refine = false;
    } d;
    detect->add_option("--fields", d.fields, "field file (.paff)")->required();
    detect->add_option("--topology", d.common.topology_path, "topology JSON file");
    detect->add_option("--threshold", d.threshold, "confidence threshold for peaks");
    detect->add_option("--window", d.window, "non-maximum suppression window radius");
    detect->add_flag("--no-refine", d.no_refine, "skip sub-pixel refinement");
    detect->add_option("--out", d.common.out_path, "write the candidate document here");
    detect->add_flag("--human", d.common.human, "human-readable summary instead of JSON");

    // --- parse -----------------------------------------------------------------
    auto* parse = app.add_subcommand("parse", "recover multi-person poses from a field file");
    struct {
        CommonOptions common;
        std::string fields;
        std::string matcher = "greedy";
        int min_parts = 3;
        double min_person_score = 0.2;
        int samples = 10;
        double threshold = 0.1;
        int window = 3;
        bool no_refine = false;
        double min_score = 0.05;
        double min_aligned = 0.8;
        bool nearest = false;
        bool no_redundant = false;
    } p;
    parse->add_option("--fields", p.fields, "field file (.paff)")->required();
    parse->add_option("--topology", p.common.topology_path, "topology JSON file");
    parse->add_option("--matcher", p.matcher, "per-limb matcher")
        ->check(CLI::IsMember({"greedy", "hungarian"}));
    parse->add_option("--min-parts", p.min_parts, "drop people with fewer parts");
    parse->add_option("--min-person-score", p.min_person_score,
                      "drop people scoring below this per assigned part");
    parse->add_option("--samples", p.samples, "line-integral sample count");
    parse->add_option("--threshold", p.threshold, "confidence threshold for peaks");
    parse->add_option("--window", p.window, "non-maximum suppression window radius");
    parse->add_flag("--no-refine", p.no_refine, "skip sub-pixel refinement");
    parse->add_option("--min-score", p.min_score, "min mean alignment for a usable connection");
    parse->add_option("--min-aligned", p.min_aligned, "min fraction of aligned samples");
    parse->add_flag("--nearest", p.nearest, "nearest-neighbor field sampling (default bilinear)");
    parse->add_flag("--no-redundant", p.no_redundant, "use spanning-tree limbs only");
    parse->add_option("--out", p.common.out_path, "write the pose document here");
    parse->add_flag("--human", p.common.human, "human-readable summary instead of JSON");

    // --- roundtrip ---------------------------------------------------------------
    auto* roundtrip =
        app.add_subcommand("roundtrip", "scene -> fields -> poses evaluation suite");
    struct {
        CommonOptions common;
        int scenes = 20;
        std::string people = "1:8";
        std::string scale = "50:70";
        double min_sep = 40.0;
        int width = 368, height = 368;
        double sigma = 7.0, sigma_limb = 8.0;
        int stride = 1;
        std::string matcher = "greedy";
        int min_parts = 3;
        int samples = 10;
        double threshold = 0.1;
        std::string csv_path;
        double min_pose_recall = -1.0;
        double max_loc_error = -1.0;
    } rt;
    roundtrip->add_option("--scenes", rt.scenes, "number of scenes");
    roundtrip->add_option("--seed", rt.common.seed, "random seed");
    roundtrip->add_option("--topology", rt.common.topology_path, "topology JSON file");
    roundtrip->add_option("--people", rt.people, "person count, N or MIN:MAX");
    roundtrip->add_option("--scale", rt.scale, "person scale in px, N or LO:HI");
    roundtrip->add_option("--min-sep", rt.min_sep, "min cross-person part distance (px)");
    roundtrip->add_option("--width", rt.width, "grid width");
    roundtrip->add_option("--height", rt.height, "grid height");
    roundtrip->add_option("--sigma", rt.sigma, "confidence peak width (px)");
    roundtrip->add_option("--sigma-limb", rt.sigma_limb, "limb band half-width (px)");
    roundtrip->add_option("--stride", rt.stride, "render stride");
    roundtrip->add_option("--matcher", rt.matcher, "per-limb matcher")
        ->check(CLI::IsMember({"greedy", "hungarian"}));
    roundtrip->add_option("--min-parts", rt.min_parts, "drop people with fewer parts");
    roundtrip->add_option("--samples", rt.samples, "line-integral sample count");
    roundtrip->add_option("--threshold", rt.threshold, "confidence threshold for peaks");
    roundtrip->add_option("--out", rt.common.out_path, "write the report here");
    roundtrip->add_option("--csv", rt.csv_path, "write per-threshold metrics CSV here");
    roundtrip->add_option("--min-pose-recall", rt.min_pose_recall,
                          "exit 3 when pose recall at OKS 0.5 falls below this");
    roundtrip->add_option("--max-loc-error", rt.max_loc_error,
                          "exit 3 when mean localization error (px) exceeds this");
    roundtrip->add_flag("--human", rt.common.human, "human-readable report instead of JSON");

    // --- compare -------------------------------------------------------------------
    auto* compare = app.add_subcommand(
        "compare", "compare greedy, optimal, and exhaustive association strategies");
    struct {
        CommonOptions common;
        int scenes = 10;
        std::string people = "2:3";
        std::string scale = "50:70";
        double min_sep = 40.0;
        int width = 368, height = 368;
        int samples = 10;
        std::string matcher = "greedy";
        bool no_assert = false;
    } cp;
    compare->add_option("--scenes", cp.scenes, "number of scenes");
    compare->add_option("--seed", cp.common.seed, "random seed");
    compare->add_option("--topology", cp.common.topology_path,
                        "topology JSON file (default: built-in 5-part star)");
    compare->add_option("--people", cp.people, "person count, N or MIN:MAX");
    compare->add_option("--scale", cp.scale, "person scale in px, N or LO:HI");
    compare->add_option("--min-sep", cp.min_sep, "min cross-person part distance (px)");
    compare->add_option("--width", cp.width, "grid width");
    compare->add_option("--height", cp.height, "grid height");
    compare->add_option("--samples", cp.samples, "line-integral sample count");
    compare->add_option("--out", cp.common.out_path, "write the report here");
    compare->add_flag("--no-assert", cp.no_assert,
                      "report only; do not exit 3 when greedy falls below 0.95x exhaustive");
    compare->add_flag("--human", cp.common.human, "human-readable report instead of JSON");

    // --- bench ------------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "parse-stage latency benchmark");
    struct {
        CommonOptions common;
        std::string people = "1,3,6,9,12";
        int reps = 100;
        std::string csv_path;
        double max_mean_ms = -1.0;
    } b;
    bench->add_option("--people", b.people, "comma-separated person counts");
    bench->add_option("--reps", b.reps, "repetitions per person count");
    bench->add_option("--seed", b.common.seed, "random seed");
    bench->add_option("--topology", b.common.topology_path, "topology JSON file");
    bench->add_option("--out", b.common.out_path, "write the report here");
    bench->add_option("--csv", b.csv_path, "write the latency CSV here");
    bench->add_option("--max-mean-ms", b.max_mean_ms,
                      "exit 3 when any mean latency exceeds this many ms");
    bench->add_flag("--human", b.common.human, "human-readable report instead of JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) {
            const paf::SkeletonTopology topo = resolve_topology(g.common.topology_path);
            paf::SceneSpec spec;
            spec.topology = topo;
            spec.seed = g.common.seed;
            const Range people = parse_range(g.people);
            spec.min_people = int(people.lo);
            spec.max_people = int(people.hi);
            const Range scale = parse_range(g.scale);
            spec.min_scale = scale.lo;
            spec.max_scale = scale.hi;
            spec.min_separation = g.min_sep;
            spec.width = g.width;
            spec.height = g.height;
            const paf::Scene scene = paf::random_scene(spec);
            paf::RenderParams render;
            render.sigma = g.sigma;
            render.sigma_limb = g.sigma_limb;
            render.stride = g.stride;
            const paf::FieldStack stack = paf::render_scene_fields(scene, topo, render);
            const std::string scene_path = g.base + ".scene.json";
            const std::string field_path = g.base + ".paff";
            paf::atomic_write(scene_path, paf::scene_to_json(scene, topo).dump(2) + "\n");
            paf::write_field_file(field_path, stack, topo, g.stride);
            if (g.common.human) {
                std::printf("wrote %s (%d people) and %s (%dx%d, stride %d)\n",
                            scene_path.c_str(), int(scene.people.size()), field_path.c_str(),
                            stack.width, stack.height, g.stride);
            } else {
                nlohmann::json doc;
                doc["kind"] = "gen";
                doc["scene_file"] = scene_path;
                doc["field_file"] = field_path;
                doc["people"] = int(scene.people.size());
                doc["width"] = stack.width;
                doc["height"] = stack.height;
                doc["stride"] = g.stride;
                doc["topology"] = {{"name", topo.name},
                                   {"hash", paf::detail::hash_hex(paf::topology_hash(topo))}};
                emit(doc, "");
            }
            return 0;
        }

        if (detect->parsed()) {
            const paf::SkeletonTopology topo = resolve_topology(d.common.topology_path);
            const paf::FieldFile file = paf::read_field_file(d.fields, topo);
            paf::DetectParams params;
            params.threshold = d.threshold;
            params.window_radius = d.window;
            params.refine = !d.no_refine;
            auto candidates = paf::detect_candidates(file.stack, topo, params);
            // Report in pixel coordinates; peaks stay in plane indices.
            for (auto& per_part : candidates)
                for (auto& c : per_part) c.pos = paf::plane_to_pixel(c.pos, file.stride);
            if (d.common.human) {
                std::string text;
                int total = 0;
                for (int j = 0; j < topo.part_count(); ++j) {
                    total += int(candidates[j].size());
                    text += topo.parts[j] + ": " + std::to_string(candidates[j].size()) + "\n";
                }
                text += "total: " + std::to_string(total) + " candidates\n";
                emit_text(text, d.common.out_path);
            } else {
                nlohmann::json doc = paf::candidates_to_json(candidates, topo);
                doc["kind"] = "detect";
                doc["stride"] = file.stride;
                emit(doc, d.common.out_path);
            }
            return 0;
        }

        if (parse->parsed()) {
            const paf::SkeletonTopology topo = resolve_topology(p.common.topology_path);
            const paf::FieldFile file = paf::read_field_file(p.fields, topo);
            paf::DetectParams dparams;
            dparams.threshold = p.threshold;
            dparams.window_radius = p.window;
            dparams.refine = !p.no_refine;
            const auto candidates = paf::detect_candidates(file.stack, topo, dparams);
            paf::ParseConfig config;
            config.matcher = p.matcher == "hungarian" ? paf::Matcher::hungarian : paf::Matcher::greedy;
            config.min_parts = p.min_parts;
            config.min_score_per_part = p.min_person_score;
            config.use_redundant = !p.no_redundant;
            config.assoc.n_samples = p.samples;
            config.assoc.min_score = p.min_score;
            config.assoc.min_aligned_fraction = p.min_aligned;
            config.assoc.mode = p.nearest ? paf::SampleMode::nearest : paf::SampleMode::bilinear;
            const paf::EdgeClassification edges = paf::classify_edges(topo);
            paf::ParseResult result = paf::parse_poses(candidates, file.stack, topo, edges, config);
            for (auto& person : result.people)
                for (auto& part : person.parts)
                    if (part) part->pos = paf::plane_to_pixel(part->pos, file.stride);
            if (p.common.human) {
                std::string text = std::to_string(result.people.size()) + " people\n";
                for (size_t i = 0; i < result.people.size(); ++i) {
                    const auto& person = result.people[i];
                    text += "  person " + std::to_string(i) + ": " +
                            std::to_string(person.part_count) + " parts, score " +
                            std::to_string(person.score) + "\n";
                }
                emit_text(text, p.common.out_path);
            } else {
                nlohmann::json doc = paf::poses_to_json(result, topo);
                doc["kind"] = "parse";
                doc["stride"] = file.stride;
                emit(doc, p.common.out_path);
            }
            return 0;
        }

        if (roundtrip->parsed()) {
            const paf::SkeletonTopology topo = resolve_topology(rt.common.topology_path);
            paf::SceneSpec spec;
            spec.topology = topo;
            spec.seed = rt.common.seed;
            spec.scenes = rt.scenes;
            const Range people = parse_range(rt.people);
            spec.min_people = int(people.lo);
            spec.max_people = int(people.hi);
            const Range scale = parse_range(rt.scale);
            spec.min_scale = scale.lo;
            spec.max_scale = scale.hi;
            spec.min_separation = rt.min_sep;
            spec.width = rt.width;
            spec.height = rt.height;
            paf::RenderParams render;
            render.sigma = rt.sigma;
            render.sigma_limb = rt.sigma_limb;
            render.stride = rt.stride;
            paf::ParseConfig config;
            config.matcher =
                rt.matcher == "hungarian" ? paf::Matcher::hungarian : paf::Matcher::greedy;
            config.min_parts = rt.min_parts;
            config.assoc.n_samples = rt.samples;
            paf::DetectParams dparams;
            dparams.threshold = rt.threshold;
            const paf::MatchReport report = paf::roundtrip_suite(spec, render, config, dparams);
            if (!rt.csv_path.empty()) {
                std::string csv = "oks_threshold,precision,recall,ap\n";
                for (size_t i = 0; i < report.oks_thresholds.size(); ++i) {
                    char row[128];
                    std::snprintf(row, sizeof row, "%.2f,%.6f,%.6f,%.6f\n",
                                  report.oks_thresholds[i], report.precision[i], report.recall[i],
                                  report.ap[i]);
                    csv += row;
                }
                paf::atomic_write(rt.csv_path, csv);
            }
            if (rt.common.human)
                emit_text(paf::roundtrip_report_to_text(report), rt.common.out_path);
            else
                emit(paf::roundtrip_report_to_json(report), rt.common.out_path);
            if (rt.min_pose_recall >= 0.0 &&
                report.pose_recall.value_or(0.0) < rt.min_pose_recall) {
                std::fprintf(stderr, "assertion failed: pose recall %.4f < %.4f\n",
                             report.pose_recall.value_or(0.0), rt.min_pose_recall);
                return 3;
            }
            if (rt.max_loc_error >= 0.0 && report.mean_localization_error > rt.max_loc_error) {
                std::fprintf(stderr, "assertion failed: localization error %.4f px > %.4f px\n",
                             report.mean_localization_error, rt.max_loc_error);
                return 3;
            }
            return 0;
        }

        if (compare->parsed()) {
            const paf::SkeletonTopology topo = cp.common.topology_path.empty()
                                                   ? mini5_topology()
                                                   : paf::load_topology(cp.common.topology_path);
            paf::SceneSpec spec;
            spec.topology = topo;
            spec.seed = cp.common.seed;
            spec.scenes = cp.scenes;
            const Range people = parse_range(cp.people);
            spec.min_people = int(people.lo);
            spec.max_people = int(people.hi);
            const Range scale = parse_range(cp.scale);
            spec.min_scale = scale.lo;
            spec.max_scale = scale.hi;
            spec.min_separation = cp.min_sep;
            spec.width = cp.width;
            spec.height = cp.height;
            paf::ParseConfig config;
            config.assoc.n_samples = cp.samples;
            const paf::MatchReport report =
                paf::compare_strategies(spec, paf::RenderParams{}, config);
            if (cp.common.human)
                emit_text(paf::compare_report_to_text(report), cp.common.out_path);
            else
                emit(paf::compare_report_to_json(report), cp.common.out_path);
            if (!cp.no_assert && !report.score_bound_ok) {
                std::fprintf(stderr,
                             "assertion failed: greedy total fell below 0.95x exhaustive "
                             "(ratio %.4f)\n",
                             report.greedy_exhaustive_ratio);
                return 3;
            }
            return 0;
        }

        if (bench->parsed()) {
            paf::BenchParams params;
            params.seed = b.common.seed;
            if (!b.common.topology_path.empty())
                params.topology = paf::load_topology(b.common.topology_path);
            std::vector<paf::LatencyStats> series;
            for (int n : parse_int_list(b.people))
                series.push_back(paf::bench_parse(n, b.reps, params));
            if (!b.csv_path.empty()) paf::atomic_write(b.csv_path, paf::bench_to_csv(series));
            if (b.common.human)
                emit_text(paf::bench_report_to_text(series), b.common.out_path);
            else
                emit(paf::bench_report_to_json(series), b.common.out_path);
            if (b.max_mean_ms >= 0.0)
                for (const auto& s : series)
                    if (s.mean_ms > b.max_mean_ms) {
                        std::fprintf(stderr,
                                     "assertion failed: %d-person mean latency %.3f ms > %.3f ms\n",
                                     s.n_people, s.mean_ms, b.max_mean_ms);
                        return 3;
                    }
            return 0;
        }
    } catch (const paf::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
