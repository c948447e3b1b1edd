// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "paf/error.hpp"

namespace paf {

// A named list of body parts plus the limbs (part pairs) connecting them.
// Part index j addresses one confidence channel; limb index c addresses the
// PAF channel pair (2c, 2c+1) carrying the x/y vector components.
struct SkeletonTopology {
    std::vector<std::string> parts;
    std::vector<std::pair<int, int>> limbs;  // (src part, dst part), order-significant
    int root = 0;                            // part the spanning tree grows from
    std::string name = "anonymous";

    int part_count() const { return int(parts.size()); }
    int limb_count() const { return int(limbs.size()); }
    int field_channels() const { return part_count() + 2 * limb_count(); }

    int paf_channel_x(int limb) const { return 2 * limb; }
    int paf_channel_y(int limb) const { return 2 * limb + 1; }

    int part_index(const std::string& part) const {
        auto it = std::find(parts.begin(), parts.end(), part);
        return it == parts.end() ? -1 : int(it - parts.begin());
    }
};

// Limbs split into a spanning tree plus the remaining (redundant) edges.
// Redundant edges still score and still veto merges during parsing; they are
// just not required for a person to be structurally connected.
struct EdgeClassification {
    std::vector<int> tree_edges;       // limb indices, ascending
    std::vector<int> redundant_edges;  // limb indices, ascending
};

// Pre-validation description, e.g. straight from a JSON file.
struct RawTopology {
    std::vector<std::string> parts;
    std::vector<std::pair<std::string, std::string>> limbs;
    std::optional<std::string> root;
    std::string name = "anonymous";
};

inline SkeletonTopology validate_topology(const RawTopology& raw) {
    SkeletonTopology topo;
    topo.name = raw.name;
    for (const auto& part : raw.parts) {
        if (std::find(topo.parts.begin(), topo.parts.end(), part) != topo.parts.end())
            throw error(errc::duplicate_part, "part '" + part + "' declared twice");
        topo.parts.push_back(part);
    }
    if (topo.parts.empty()) throw error(errc::bad_topology_file, "topology declares no parts");

    for (const auto& [a, b] : raw.limbs) {
        int ia = topo.part_index(a);
        int ib = topo.part_index(b);
        if (ia < 0) throw error(errc::unknown_part_in_limb, "limb references unknown part '" + a + "'");
        if (ib < 0) throw error(errc::unknown_part_in_limb, "limb references unknown part '" + b + "'");
        if (ia == ib) throw error(errc::self_loop, "limb connects '" + a + "' to itself");
        for (const auto& [pa, pb] : topo.limbs)
            if ((pa == ia && pb == ib) || (pa == ib && pb == ia))
                throw error(errc::duplicate_limb, "limb '" + a + "'-'" + b + "' declared twice");
        topo.limbs.emplace_back(ia, ib);
    }

    if (raw.root) {
        int r = topo.part_index(*raw.root);
        if (r < 0) throw error(errc::bad_topology_file, "root part '" + *raw.root + "' not declared");
        topo.root = r;
    } else {
        int neck = topo.part_index("neck");
        topo.root = neck >= 0 ? neck : (topo.part_count() > 1 ? 1 : 0);
    }
    return topo;
}

// Breadth-first spanning tree from the root, expanding limbs in declaration
// order. Deterministic: same topology, same classification, always. Parts the
// root cannot reach are an error — a silent partial tree would make every
// downstream consumer subtly wrong.
inline EdgeClassification classify_edges(const SkeletonTopology& topo, int root) {
    const int j = topo.part_count();
    if (root < 0 || root >= j) throw error(errc::bad_topology_file, "root part index out of range");

    std::vector<std::vector<std::pair<int, int>>> adj(j);  // part -> (limb, other part)
    for (int c = 0; c < topo.limb_count(); ++c) {
        auto [a, b] = topo.limbs[c];
        adj[a].emplace_back(c, b);
        adj[b].emplace_back(c, a);
    }

    std::vector<char> visited(j, 0);
    std::vector<char> in_tree(topo.limb_count(), 0);
    std::deque<int> queue{root};
    visited[root] = 1;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (auto [limb, v] : adj[u]) {
            if (visited[v]) continue;
            visited[v] = 1;
            in_tree[limb] = 1;
            queue.push_back(v);
        }
    }

    std::string unreachable;
    for (int p = 0; p < j; ++p)
        if (!visited[p]) unreachable += (unreachable.empty() ? "" : ", ") + topo.parts[p];
    if (!unreachable.empty())
        throw error(errc::disconnected_graph, "parts unreachable from root: " + unreachable);

    EdgeClassification cls;
    for (int c = 0; c < topo.limb_count(); ++c)
        (in_tree[c] ? cls.tree_edges : cls.redundant_edges).push_back(c);
    return cls;
}

inline EdgeClassification classify_edges(const SkeletonTopology& topo) {
    return classify_edges(topo, topo.root);
}

// Reference 18-part body description with 19 limbs. The final two limbs
// (shoulder-ear on each side) close cycles: with the tree rooted at the neck
// they are the only pair beyond the spanning tree.
inline SkeletonTopology coco18_topology() {
    RawTopology raw;
    raw.name = "coco18";
    raw.parts = {"nose",        "neck",       "right_shoulder", "right_elbow", "right_wrist",
                 "left_shoulder", "left_elbow", "left_wrist",     "right_hip",   "right_knee",
                 "right_ankle", "left_hip",   "left_knee",      "left_ankle",  "right_eye",
                 "left_eye",    "right_ear",  "left_ear"};
    const std::pair<int, int> pairs[] = {{1, 2},  {1, 5},   {2, 3},   {3, 4},  {5, 6},
                                         {6, 7},  {1, 8},   {8, 9},   {9, 10}, {1, 11},
                                         {11, 12}, {12, 13}, {1, 0},   {0, 14}, {14, 16},
                                         {0, 15}, {15, 17}, {2, 16},  {5, 17}};
    for (auto [a, b] : pairs) raw.limbs.emplace_back(raw.parts[a], raw.parts[b]);
    raw.root = "neck";
    return validate_topology(raw);
}

// --- JSON form -------------------------------------------------------------
//
// { "parts": ["nose", ...], "limbs": [[0, 1], ...], "root": "neck" }
// Part order and limb order are significant: they define channel indices.

inline SkeletonTopology topology_from_json(const nlohmann::json& doc, const std::string& name) {
    if (!doc.is_object() || !doc.contains("parts") || !doc.contains("limbs"))
        throw error(errc::bad_topology_file, "expected an object with 'parts' and 'limbs'");
    RawTopology raw;
    raw.name = name;
    try {
        raw.parts = doc.at("parts").get<std::vector<std::string>>();
        for (const auto& limb : doc.at("limbs")) {
            if (!limb.is_array() || limb.size() != 2)
                throw error(errc::bad_topology_file, "each limb must be a [src, dst] pair");
            int a = limb.at(0).get<int>();
            int b = limb.at(1).get<int>();
            if (a < 0 || b < 0 || a >= int(raw.parts.size()) || b >= int(raw.parts.size()))
                throw error(errc::unknown_part_in_limb,
                            "limb index out of range: [" + std::to_string(a) + ", " + std::to_string(b) + "]");
            raw.limbs.emplace_back(raw.parts[a], raw.parts[b]);
        }
        if (doc.contains("root") && !doc.at("root").is_null())
            raw.root = doc.at("root").get<std::string>();
    } catch (const error&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw error(errc::bad_topology_file, e.what());
    }
    return validate_topology(raw);
}

inline nlohmann::json topology_to_json(const SkeletonTopology& topo) {
    nlohmann::json doc;
    doc["parts"] = topo.parts;
    auto& limbs = doc["limbs"] = nlohmann::json::array();
    for (auto [a, b] : topo.limbs) limbs.push_back({a, b});
    doc["root"] = topo.parts[topo.root];
    return doc;
}

inline SkeletonTopology load_topology(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw error(errc::io_error, "cannot open topology file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw error(errc::bad_topology_file, path.string() + ": " + e.what());
    }
    return topology_from_json(doc, path.stem().string());
}

// Canonical serialization used for hashing: nlohmann orders object keys
// alphabetically, and dump() without indentation has a single byte encoding.
inline std::string canonical_topology_json(const SkeletonTopology& topo) {
    return topology_to_json(topo).dump();
}

namespace detail {

// 64-bit FNV-1a, usable incrementally by threading the returned state.
inline uint64_t fnv1a(const void* data, size_t size, uint64_t state = 14695981039346656037ULL) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < size; ++i) {
        state ^= bytes[i];
        state *= 1099511628211ULL;
    }
    return state;
}

}  // namespace detail

// 64-bit FNV-1a over the canonical JSON bytes. Stamped into field files so a
// stack can never be parsed against the wrong skeleton.
inline uint64_t topology_hash(const SkeletonTopology& topo) {
    const std::string bytes = canonical_topology_json(topo);
    return detail::fnv1a(bytes.data(), bytes.size());
}

}  // namespace paf
