// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "paf/detect.hpp"
#include "paf/eval.hpp"
#include "paf/fieldgen.hpp"
#include "paf/parse.hpp"
#include "paf/scene.hpp"
#include "paf/topology.hpp"

namespace paf {

// --- Little-endian primitives ------------------------------------------------

namespace detail {

inline void put_u16(std::string& out, uint16_t v) {
    out.push_back(char(v & 0xff));
    out.push_back(char((v >> 8) & 0xff));
}

inline void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

inline void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<uint32_t>(v)); }

struct ByteReader {
    const unsigned char* data;
    size_t size;
    size_t pos = 0;

    void need(size_t n) const {
        if (pos + n > size) throw error(errc::io_error, "field file truncated");
    }
    uint16_t u16() {
        need(2);
        uint16_t v = uint16_t(data[pos]) | uint16_t(data[pos + 1]) << 8;
        pos += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(data[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(data[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
};

}  // namespace detail

// Writes bytes to `path` atomically: a temp file in the same directory is
// renamed over the target, so readers never observe a partial file.
inline void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw error(errc::io_error, "cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), std::streamsize(bytes.size()));
        if (!out) throw error(errc::io_error, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw error(errc::io_error, "cannot rename " + tmp.string() + " to " + path.string());
}

inline std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error(errc::io_error, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) throw error(errc::io_error, "read failure on " + path.string());
    return std::move(buf).str();
}

// --- Field stack codec --------------------------------------------------------
//
// Layout (all integers little-endian):
//   byte 0..3   magic "PAFF"
//   u16         format version (currently 1)
//   u32         height, width, part planes, limb count, stride
//   u64         topology hash
//   f32[]       planes, channel-major: part confidence planes in part order,
//               then limb planes as (x, y) pairs in limb order, each plane
//               row-major
//   u64         FNV-1a over the payload bytes

inline constexpr char kFieldMagic[4] = {'P', 'A', 'F', 'F'};
inline constexpr uint16_t kFieldVersion = 1;

inline std::string encode_field_stack(const FieldStack& stack, const SkeletonTopology& topo,
                                      int stride = 1) {
    if (int(stack.confidence.size()) != topo.part_count() ||
        int(stack.paf.size()) != 2 * topo.limb_count())
        throw error(errc::topology_field_mismatch,
                    "field stack has " + std::to_string(stack.confidence.size()) + "+" +
                        std::to_string(stack.paf.size()) + " planes, topology needs " +
                        std::to_string(topo.part_count()) + "+" +
                        std::to_string(2 * topo.limb_count()));
    std::string out;
    const size_t plane = size_t(stack.width) * size_t(stack.height);
    out.reserve(34 + 4 * plane * (stack.confidence.size() + stack.paf.size()) + 8);
    out.append(kFieldMagic, 4);
    detail::put_u16(out, kFieldVersion);
    detail::put_u32(out, uint32_t(stack.height));
    detail::put_u32(out, uint32_t(stack.width));
    detail::put_u32(out, uint32_t(topo.part_count()));
    detail::put_u32(out, uint32_t(topo.limb_count()));
    detail::put_u32(out, uint32_t(stride));
    detail::put_u64(out, topology_hash(topo));
    const size_t payload_begin = out.size();
    auto put_plane = [&](const Grid<float>& g) {
        if (g.width != stack.width || g.height != stack.height)
            throw error(errc::dim_mismatch, "plane dimensions disagree with the stack");
        for (float v : g.data) detail::put_f32(out, v);
    };
    for (const auto& g : stack.confidence) put_plane(g);
    for (const auto& g : stack.paf) put_plane(g);
    detail::put_u64(out,
                    detail::fnv1a(out.data() + payload_begin, out.size() - payload_begin));
    return out;
}

struct FieldFile {
    FieldStack stack;
    uint64_t topology_hash = 0;
    uint32_t parts = 0;
    uint32_t limbs = 0;
    int stride = 1;
};

inline FieldFile decode_field_stack(const std::string& bytes) {
    detail::ByteReader r{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()};
    r.need(4);
    if (std::memcmp(bytes.data(), kFieldMagic, 4) != 0)
        throw error(errc::bad_magic, "not a field file (bad magic)");
    r.pos = 4;
    const uint16_t version = r.u16();
    if (version != kFieldVersion)
        throw error(errc::version_unsupported,
                    "field file version " + std::to_string(version) + " is not supported");
    FieldFile file;
    const uint32_t height = r.u32();
    const uint32_t width = r.u32();
    file.parts = r.u32();
    file.limbs = r.u32();
    file.stride = int(r.u32());
    file.topology_hash = r.u64();
    const size_t plane = size_t(width) * size_t(height);
    const size_t payload_begin = r.pos;
    file.stack.width = int(width);
    file.stack.height = int(height);
    auto read_plane = [&] {
        Grid<float> g{int(width), int(height)};
        for (size_t i = 0; i < plane; ++i) g.data[i] = r.f32();
        return g;
    };
    for (uint32_t j = 0; j < file.parts; ++j) file.stack.confidence.push_back(read_plane());
    for (uint32_t c = 0; c < 2 * file.limbs; ++c) file.stack.paf.push_back(read_plane());
    const uint64_t stored = r.u64();
    const uint64_t actual = detail::fnv1a(bytes.data() + payload_begin, r.pos - 8 - payload_begin);
    if (stored != actual) throw error(errc::io_error, "field file payload hash mismatch");
    return file;
}

inline void write_field_file(const std::filesystem::path& path, const FieldStack& stack,
                             const SkeletonTopology& topo, int stride = 1) {
    atomic_write(path, encode_field_stack(stack, topo, stride));
}

// Loads a field file and verifies it was rendered for `topo`.
inline FieldFile read_field_file(const std::filesystem::path& path, const SkeletonTopology& topo) {
    FieldFile file = decode_field_stack(read_bytes(path));
    if (file.topology_hash != topology_hash(topo))
        throw error(errc::topology_hash_mismatch,
                    path.string() + " was rendered for a different topology");
    if (int(file.parts) != topo.part_count() || int(file.limbs) != topo.limb_count())
        throw error(errc::topology_field_mismatch, path.string() + ": plane counts disagree");
    return file;
}

// --- JSON documents -----------------------------------------------------------

namespace detail {

inline std::string hash_hex(uint64_t h) {
    std::ostringstream out;
    out << "0x" << std::hex << std::setfill('0') << std::setw(16) << h;
    return out.str();
}

inline uint64_t parse_hash_hex(const std::string& s) {
    return std::stoull(s, nullptr, 16);
}

inline nlohmann::json topology_stamp(const SkeletonTopology& topo) {
    return {{"name", topo.name}, {"hash", hash_hex(topology_hash(topo))}};
}

inline void check_topology_stamp(const nlohmann::json& doc, const SkeletonTopology& topo,
                                 const std::string& what) {
    if (!doc.contains("topology") || !doc["topology"].contains("hash"))
        throw error(errc::bad_argument, what + ": missing topology stamp");
    const uint64_t stored = parse_hash_hex(doc["topology"]["hash"].get<std::string>());
    if (stored != topology_hash(topo))
        throw error(errc::topology_hash_mismatch, what + " was written for a different topology");
}

}  // namespace detail

inline nlohmann::json scene_to_json(const Scene& scene, const SkeletonTopology& topo) {
    nlohmann::json doc;
    doc["width"] = scene.width;
    doc["height"] = scene.height;
    doc["topology"] = detail::topology_stamp(topo);
    doc["people"] = nlohmann::json::array();
    for (const auto& person : scene.people) {
        nlohmann::json kps = nlohmann::json::array();
        for (const auto& kp : person.parts) {
            if (kp)
                kps.push_back({kp->pos.x, kp->pos.y});
            else
                kps.push_back(nullptr);
        }
        doc["people"].push_back({{"keypoints", std::move(kps)}});
    }
    return doc;
}

inline Scene scene_from_json(const nlohmann::json& doc, const SkeletonTopology& topo) {
    detail::check_topology_stamp(doc, topo, "scene");
    Scene scene;
    scene.width = doc.at("width").get<int>();
    scene.height = doc.at("height").get<int>();
    for (const auto& pj : doc.at("people")) {
        PersonAnnotation person;
        const auto& kps = pj.at("keypoints");
        if (int(kps.size()) != topo.part_count())
            throw error(errc::dim_mismatch, "scene person has " + std::to_string(kps.size()) +
                                                " keypoints, topology has " +
                                                std::to_string(topo.part_count()) + " parts");
        for (const auto& kj : kps) {
            if (kj.is_null()) {
                person.parts.emplace_back(std::nullopt);
            } else {
                Keypoint kp;
                kp.pos = Vec2{kj.at(0).get<double>(), kj.at(1).get<double>()};
                kp.out_of_frame = !in_bounds(kp.pos, scene.width, scene.height);
                person.parts.emplace_back(kp);
            }
        }
        scene.people.push_back(std::move(person));
    }
    validate_scene(scene, topo);
    return scene;
}

inline nlohmann::json candidates_to_json(const std::vector<std::vector<PartCandidate>>& candidates,
                                         const SkeletonTopology& topo) {
    nlohmann::json doc;
    doc["topology"] = detail::topology_stamp(topo);
    doc["candidates"] = nlohmann::json::array();
    for (int j = 0; j < topo.part_count(); ++j) {
        nlohmann::json per_part = nlohmann::json::array();
        for (const auto& c : candidates[j])
            per_part.push_back({{"x", c.pos.x},
                                {"y", c.pos.y},
                                {"score", c.score},
                                {"peak", {c.peak_x, c.peak_y}}});
        doc["candidates"].push_back(std::move(per_part));
    }
    return doc;
}

inline nlohmann::json poses_to_json(const ParseResult& result, const SkeletonTopology& topo) {
    nlohmann::json doc;
    doc["topology"] = detail::topology_stamp(topo);
    doc["people"] = nlohmann::json::array();
    for (const auto& person : result.people) {
        nlohmann::json kps = nlohmann::json::array();
        for (const auto& part : person.parts) {
            if (part)
                kps.push_back({part->pos.x, part->pos.y, part->score});
            else
                kps.push_back(nullptr);
        }
        doc["people"].push_back({{"score", person.score},
                                 {"parts_found", person.part_count},
                                 {"keypoints", std::move(kps)}});
    }
    doc["unassigned_candidates"] = int(result.unassigned.size());
    return doc;
}

// Reads back the positional half of a pose document (scores and keypoints);
// connection structure is not serialized.
inline std::vector<PersonParse> poses_from_json(const nlohmann::json& doc,
                                                const SkeletonTopology& topo) {
    detail::check_topology_stamp(doc, topo, "pose file");
    std::vector<PersonParse> people;
    for (const auto& pj : doc.at("people")) {
        PersonParse person;
        person.score = pj.at("score").get<double>();
        person.part_count = pj.at("parts_found").get<int>();
        const auto& kps = pj.at("keypoints");
        if (int(kps.size()) != topo.part_count())
            throw error(errc::dim_mismatch, "pose person keypoint count disagrees with topology");
        for (const auto& kj : kps) {
            if (kj.is_null()) {
                person.parts.emplace_back(std::nullopt);
            } else {
                PersonPart part;
                part.candidate = -1;
                part.pos = Vec2{kj.at(0).get<double>(), kj.at(1).get<double>()};
                part.score = kj.at(2).get<double>();
                person.parts.emplace_back(part);
            }
        }
        people.push_back(std::move(person));
    }
    return people;
}

// --- Reports ------------------------------------------------------------------
//
// Every report document carries its nondeterministic measurements (wall time)
// under a single top-level "timings" key, so byte-level comparisons of two
// runs can strip that one key and expect identical bytes.

inline nlohmann::json strip_timings(nlohmann::json doc) {
    doc.erase("timings");
    return doc;
}

inline nlohmann::json roundtrip_report_to_json(const MatchReport& report) {
    nlohmann::json doc;
    doc["kind"] = "roundtrip";
    doc["scenes"] = report.scenes;
    doc["gt_people"] = report.gt_people;
    doc["predictions"] = report.predictions;
    doc["oks_thresholds"] = report.oks_thresholds;
    doc["precision"] = report.precision;
    doc["recall"] = report.recall;
    doc["ap"] = report.ap;
    doc["mean_ap"] = report.mean_ap;
    doc["pckh_at_half"] = report.pckh05;
    if (report.pose_recall)
        doc["pose_recall"] = *report.pose_recall;
    else
        doc["pose_recall"] = nullptr;
    doc["false_positives"] = report.false_positives;
    doc["mean_localization_error_px"] = report.mean_localization_error;
    doc["mean_localization_error_unrefined_px"] = report.mean_localization_error_unrefined;
    doc["timings"] = {{"wall_ms", report.wall_ms}};
    return doc;
}

inline nlohmann::json compare_report_to_json(const MatchReport& report) {
    nlohmann::json doc;
    doc["kind"] = "compare";
    doc["scenes"] = report.scenes;
    doc["gt_people"] = report.gt_people;
    doc["strategies"] = nlohmann::json::array();
    nlohmann::json walls;
    for (const auto& s : report.strategies) {
        doc["strategies"].push_back(
            {{"name", s.name}, {"total_score", s.total_score}, {"mean_ap", s.mean_ap}});
        walls[s.name] = s.wall_ms;
    }
    doc["greedy_exhaustive_ratio"] = report.greedy_exhaustive_ratio;
    doc["score_bound_ok"] = report.score_bound_ok;
    doc["timings"] = {{"wall_ms", report.wall_ms},
                      {"strategy_wall_ms", std::move(walls)},
                      {"speed_ratio", report.speed_ratio}};
    return doc;
}

inline nlohmann::json bench_report_to_json(const std::vector<LatencyStats>& series) {
    nlohmann::json doc;
    doc["kind"] = "bench";
    doc["series"] = nlohmann::json::array();
    nlohmann::json timed = nlohmann::json::array();
    for (const auto& s : series) {
        doc["series"].push_back({{"n_people", s.n_people},
                                 {"repetitions", s.repetitions},
                                 {"score_checksum", s.score_checksum}});
        timed.push_back({{"n_people", s.n_people},
                         {"mean_ms", s.mean_ms},
                         {"p50_ms", s.p50_ms},
                         {"p95_ms", s.p95_ms}});
    }
    doc["timings"] = {{"series", std::move(timed)}};
    return doc;
}

inline std::string bench_to_csv(const std::vector<LatencyStats>& series) {
    std::ostringstream out;
    out << "n_people,repetitions,mean_ms,p50_ms,p95_ms\n";
    for (const auto& s : series) {
        out << s.n_people << ',' << s.repetitions << ',' << std::fixed << std::setprecision(4)
            << s.mean_ms << ',' << s.p50_ms << ',' << s.p95_ms << '\n';
    }
    return out.str();
}

inline std::string roundtrip_report_to_text(const MatchReport& report) {
    std::ostringstream out;
    out << "round-trip over " << report.scenes << " scenes, " << report.gt_people
        << " people, " << report.predictions << " predictions\n";
    out << std::fixed << std::setprecision(4);
    out << "  OKS thr   precision  recall     AP\n";
    for (size_t i = 0; i < report.oks_thresholds.size(); ++i) {
        out << "  " << std::setw(7) << report.oks_thresholds[i] << "   " << std::setw(9)
            << report.precision[i] << "  " << std::setw(9) << report.recall[i] << "  "
            << std::setw(9) << report.ap[i] << '\n';
    }
    out << "  mean AP                : " << report.mean_ap << '\n';
    out << "  PCKh@0.5               : " << report.pckh05 << '\n';
    if (report.pose_recall) out << "  pose recall (OKS>=0.5) : " << *report.pose_recall << '\n';
    out << "  false positives        : " << report.false_positives << '\n';
    out << "  mean loc error (px)    : " << report.mean_localization_error << '\n';
    out << "  ... without refinement : " << report.mean_localization_error_unrefined << '\n';
    out << "  wall time (ms)         : " << report.wall_ms << '\n';
    return out.str();
}

inline std::string compare_report_to_text(const MatchReport& report) {
    std::ostringstream out;
    out << "strategy comparison over " << report.scenes << " scenes, " << report.gt_people
        << " people\n";
    out << std::fixed << std::setprecision(4);
    out << "  strategy     total score  mean AP    wall ms\n";
    for (const auto& s : report.strategies) {
        out << "  " << std::left << std::setw(12) << s.name << std::right << ' ' << std::setw(11)
            << s.total_score << "  " << std::setw(9) << s.mean_ap << "  " << std::setw(9)
            << s.wall_ms << '\n';
    }
    out << "  greedy / exhaustive score ratio : " << report.greedy_exhaustive_ratio
        << (report.score_bound_ok ? "  (>= 0.95)" : "  (BELOW 0.95)") << '\n';
    out << "  exhaustive / greedy wall ratio  : " << report.speed_ratio << '\n';
    return out.str();
}

inline std::string bench_report_to_text(const std::vector<LatencyStats>& series) {
    std::ostringstream out;
    out << "parse latency\n" << std::fixed << std::setprecision(4);
    out << "  people  reps    mean ms    p50 ms     p95 ms\n";
    for (const auto& s : series) {
        out << "  " << std::setw(6) << s.n_people << "  " << std::setw(4) << s.repetitions << "  "
            << std::setw(9) << s.mean_ms << "  " << std::setw(9) << s.p50_ms << "  " << std::setw(9)
            << s.p95_ms << '\n';
    }
    return out.str();
}

}  // namespace paf
