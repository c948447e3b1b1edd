// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "paf/associate.hpp"
#include "paf/detect.hpp"
#include "paf/fieldgen.hpp"
#include "paf/topology.hpp"

namespace paf {

enum class Matcher {
    hungarian,
    greedy,
};

struct ParseConfig {
    Matcher matcher = Matcher::greedy;
    int min_parts = 3;                 // persons with fewer assigned parts are discarded
    double min_score_per_part = 0.2;   // person score must reach this times the part count
    bool use_redundant = true;         // score limbs beyond the spanning tree
    AssocParams assoc;
};

// One accepted limb connection inside a person.
struct Connection {
    int limb = 0;
    int src = 0;  // candidate index within the source part's list
    int dst = 0;
    double score = 0.0;
};

struct PersonPart {
    int candidate = 0;
    Vec2 pos;
    double score = 0.0;
};

struct PersonParse {
    std::vector<std::optional<PersonPart>> parts;  // one slot per topology part
    std::vector<Connection> connections;
    double score = 0.0;
    int part_count = 0;
};

// Score of an assembled person: accepted connection integrals plus the
// confidence scores of every assigned candidate.
inline double person_score(const PersonParse& person) {
    double s = 0.0;
    for (const auto& c : person.connections) s += c.score;
    for (const auto& p : person.parts)
        if (p) s += p->score;
    return s;
}

struct ParseResult {
    std::vector<PersonParse> people;
    std::vector<PartCandidate> unassigned;  // candidates not in any returned person
};

namespace detail {

inline void sort_people(std::vector<PersonParse>& people) {
    auto signature = [](const PersonParse& p) {
        std::vector<std::pair<int, int>> sig;
        for (int j = 0; j < int(p.parts.size()); ++j)
            if (p.parts[j]) sig.emplace_back(j, p.parts[j]->candidate);
        return sig;
    };
    std::sort(people.begin(), people.end(), [&](const PersonParse& a, const PersonParse& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.part_count != b.part_count) return a.part_count > b.part_count;
        return signature(a) < signature(b);
    });
}

// Union of assembled people and leftovers, with deterministic ordering.
inline ParseResult finalize(std::vector<PersonParse>&& people,
                            const std::vector<std::vector<PartCandidate>>& candidates,
                            const SkeletonTopology& topo, int min_parts,
                            double min_score_per_part) {
    std::vector<PersonParse> kept;
    for (auto& person : people) {
        person.part_count = 0;
        for (const auto& p : person.parts) person.part_count += p.has_value();
        person.score = person_score(person);
        if (person.part_count < min_parts) continue;
        if (person.score < min_score_per_part * person.part_count) continue;
        kept.push_back(std::move(person));
    }
    sort_people(kept);

    std::vector<std::vector<char>> assigned(topo.part_count());
    for (int j = 0; j < topo.part_count(); ++j) assigned[j].assign(candidates[j].size(), 0);
    for (const auto& person : kept)
        for (int j = 0; j < topo.part_count(); ++j)
            if (person.parts[j]) assigned[j][person.parts[j]->candidate] = 1;

    ParseResult result;
    result.people = std::move(kept);
    for (int j = 0; j < topo.part_count(); ++j)
        for (size_t m = 0; m < candidates[j].size(); ++m)
            if (!assigned[j][m]) result.unassigned.push_back(candidates[j][m]);
    return result;
}

}  // namespace detail

// Multi-person assembly from precomputed per-limb score matrices (one per
// topology limb, indexed by limb id). Per limb, candidate pairs are matched by
// the configured matcher; all accepted connections are then scanned once in
// order of descending score. A connection whose endpoints already belong to
// two people that share an occupied part type contradicts higher-scoring
// evidence and is ignored — this is what lets redundant limbs veto bad merges.
inline ParseResult parse_poses_from_matrices(
    const std::vector<std::vector<PartCandidate>>& candidates,
    const std::vector<ScoreMatrix>& score_matrices, const SkeletonTopology& topo,
    const EdgeClassification& edges, const ParseConfig& config = {}) {
    if (int(candidates.size()) != topo.part_count())
        throw error(errc::topology_field_mismatch, "candidate lists do not match the part count");
    if (int(score_matrices.size()) != topo.limb_count())
        throw error(errc::topology_field_mismatch, "need one score matrix per limb");

    std::vector<int> limbs = edges.tree_edges;
    if (config.use_redundant)
        limbs.insert(limbs.end(), edges.redundant_edges.begin(), edges.redundant_edges.end());
    std::sort(limbs.begin(), limbs.end());

    std::vector<Connection> accepted;
    for (int c : limbs) {
        const ScoreMatrix& m = score_matrices[c];
        const auto pairs = config.matcher == Matcher::hungarian ? hungarian_match(m, config.assoc)
                                                                : greedy_match(m, config.assoc);
        for (auto [a, b] : pairs) accepted.push_back({c, a, b, m.at(a, b).score});
    }
    std::sort(accepted.begin(), accepted.end(), [](const Connection& a, const Connection& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.limb != b.limb) return a.limb < b.limb;
        if (a.src != b.src) return a.src < b.src;
        return a.dst < b.dst;
    });

    std::vector<PersonParse> people;
    std::vector<char> alive;
    // owner[j][m] = index into people, or -1
    std::vector<std::vector<int>> owner(topo.part_count());
    for (int j = 0; j < topo.part_count(); ++j) owner[j].assign(candidates[j].size(), -1);

    auto assign = [&](int person, int part, int cand) {
        people[person].parts[part] = PersonPart{cand, candidates[part][cand].pos,
                                                candidates[part][cand].score};
        owner[part][cand] = person;
    };

    for (const auto& conn : accepted) {
        const auto [j1, j2] = topo.limbs[conn.limb];
        const int o1 = owner[j1][conn.src];
        const int o2 = owner[j2][conn.dst];
        if (o1 < 0 && o2 < 0) {
            people.push_back(PersonParse{std::vector<std::optional<PersonPart>>(topo.part_count()),
                                         {}, 0.0, 0});
            alive.push_back(1);
            const int id = int(people.size()) - 1;
            assign(id, j1, conn.src);
            assign(id, j2, conn.dst);
            people[id].connections.push_back(conn);
        } else if (o1 >= 0 && o2 < 0) {
            if (people[o1].parts[j2]) continue;  // slot taken by stronger evidence
            assign(o1, j2, conn.dst);
            people[o1].connections.push_back(conn);
        } else if (o1 < 0 && o2 >= 0) {
            if (people[o2].parts[j1]) continue;
            assign(o2, j1, conn.src);
            people[o2].connections.push_back(conn);
        } else if (o1 == o2) {
            // Cycle-closing connection (typically a redundant limb agreeing
            // with the assembly so far): keep the evidence.
            people[o1].connections.push_back(conn);
        } else {
            // Two different people. Merging is only legal when no part type is
            // claimed by both; otherwise this connection contradicts
            // higher-scoring connections and is dropped.
            const int keep = std::min(o1, o2);
            const int drop = std::max(o1, o2);
            bool conflict = false;
            for (int j = 0; j < topo.part_count() && !conflict; ++j)
                conflict = people[keep].parts[j] && people[drop].parts[j];
            if (conflict) continue;
            for (int j = 0; j < topo.part_count(); ++j) {
                if (people[drop].parts[j]) {
                    people[keep].parts[j] = people[drop].parts[j];
                    owner[j][people[drop].parts[j]->candidate] = keep;
                    people[drop].parts[j].reset();
                }
            }
            auto& kc = people[keep].connections;
            kc.insert(kc.end(), people[drop].connections.begin(), people[drop].connections.end());
            people[drop].connections.clear();
            people[keep].connections.push_back(conn);
            alive[drop] = 0;
        }
    }

    std::vector<PersonParse> assembled;
    for (size_t i = 0; i < people.size(); ++i)
        if (alive[i]) assembled.push_back(std::move(people[i]));
    return detail::finalize(std::move(assembled), candidates, topo, config.min_parts,
                            config.min_score_per_part);
}

// Multi-person assembly straight from a field stack: scores every used limb's
// candidate pairs against the PAF planes, then assembles as above.
inline ParseResult parse_poses(const std::vector<std::vector<PartCandidate>>& candidates,
                               const FieldStack& stack, const SkeletonTopology& topo,
                               const EdgeClassification& edges, const ParseConfig& config = {}) {
    if (int(candidates.size()) != topo.part_count())
        throw error(errc::topology_field_mismatch, "candidate lists do not match the part count");
    if (int(stack.paf.size()) != 2 * topo.limb_count())
        throw error(errc::topology_field_mismatch,
                    "stack has " + std::to_string(stack.paf.size()) +
                        " PAF planes, topology needs " + std::to_string(2 * topo.limb_count()));
    std::vector<ScoreMatrix> matrices(topo.limb_count());
    std::vector<char> needed(topo.limb_count(), config.use_redundant ? 1 : 0);
    for (int c : edges.tree_edges) needed[c] = 1;
    for (int c = 0; c < topo.limb_count(); ++c) {
        if (!needed[c]) continue;
        const auto [j1, j2] = topo.limbs[c];
        matrices[c] = score_matrix(stack.paf[topo.paf_channel_x(c)],
                                   stack.paf[topo.paf_channel_y(c)], candidates[j1],
                                   candidates[j2], config.assoc);
    }
    return parse_poses_from_matrices(candidates, matrices, topo, edges, config);
}

namespace detail {

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace detail

// Brute-force joint optimum over all limbs simultaneously, for tiny instances.
// Tree limbs bind people together (their matchings are enumerated jointly);
// redundant limbs contribute their eligible score whenever both endpoints land
// in the same person but never force or forbid a merge on their own. Ties
// resolve to the first assignment in enumeration order (skip-before-match,
// columns ascending), which is deterministic.
inline ParseResult exhaustive_parse(const std::vector<std::vector<PartCandidate>>& candidates,
                                    const std::vector<ScoreMatrix>& score_matrices,
                                    const SkeletonTopology& topo, const AssocParams& params = {}) {
    if (int(candidates.size()) != topo.part_count())
        throw error(errc::topology_field_mismatch, "candidate lists do not match the part count");
    if (int(score_matrices.size()) != topo.limb_count())
        throw error(errc::topology_field_mismatch, "need one score matrix per limb");

    double states = 1.0;
    for (const auto& list : candidates) states *= double(list.size()) + 1.0;
    if (states > 1e6)
        throw error(errc::instance_too_large,
                    "joint assignment space exceeds the exhaustive guard (1e6 states)");

    const EdgeClassification edges = classify_edges(topo);

    // Global node ids for DSU: candidates flattened part by part.
    std::vector<int> offset(topo.part_count() + 1, 0);
    for (int j = 0; j < topo.part_count(); ++j) offset[j + 1] = offset[j] + int(candidates[j].size());
    const int n_nodes = offset.back();

    // Eligible pairs per limb, in (row, col) order.
    std::vector<std::vector<std::pair<int, int>>> eligible_pairs(topo.limb_count());
    for (int c = 0; c < topo.limb_count(); ++c)
        for (int m = 0; m < score_matrices[c].rows; ++m)
            for (int n = 0; n < score_matrices[c].cols; ++n)
                if (eligible(score_matrices[c].at(m, n), params)) eligible_pairs[c].emplace_back(m, n);

    std::vector<Connection> selection;
    std::vector<Connection> best_selection;
    double best_total = -std::numeric_limits<double>::infinity();

    auto leaf_total = [&](const std::vector<Connection>& sel) {
        detail::Dsu dsu(n_nodes);
        double total = 0.0;
        for (const auto& conn : sel) {
            const auto [j1, j2] = topo.limbs[conn.limb];
            dsu.unite(offset[j1] + conn.src, offset[j2] + conn.dst);
            total += conn.score;
        }
        for (int c : edges.redundant_edges) {
            const auto [j1, j2] = topo.limbs[c];
            for (auto [m, n] : eligible_pairs[c])
                if (dsu.find(offset[j1] + m) == dsu.find(offset[j2] + n))
                    total += score_matrices[c].at(m, n).score;
        }
        return total;
    };

    // Enumerate partial matchings limb by limb (tree limbs only bind).
    std::vector<char> col_used;
    auto recurse_limb = [&](auto&& self, size_t limb_idx) -> void {
        if (limb_idx == edges.tree_edges.size()) {
            const double total = leaf_total(selection);
            if (total > best_total) {
                best_total = total;
                best_selection = selection;
            }
            return;
        }
        const int c = edges.tree_edges[limb_idx];
        const ScoreMatrix& m = score_matrices[c];
        std::vector<char> used(m.cols, 0);
        auto recurse_row = [&](auto&& rself, int row) -> void {
            if (row == m.rows) {
                self(self, limb_idx + 1);
                return;
            }
            rself(rself, row + 1);  // leave this candidate unmatched
            for (int col = 0; col < m.cols; ++col) {
                if (used[col] || !eligible(m.at(row, col), params)) continue;
                used[col] = 1;
                selection.push_back({c, row, col, m.at(row, col).score});
                rself(rself, row + 1);
                selection.pop_back();
                used[col] = 0;
            }
        };
        recurse_row(recurse_row, 0);
    };
    recurse_limb(recurse_limb, 0);

    // Rebuild people from the winning selection.
    detail::Dsu dsu(n_nodes);
    for (const auto& conn : best_selection) {
        const auto [j1, j2] = topo.limbs[conn.limb];
        dsu.unite(offset[j1] + conn.src, offset[j2] + conn.dst);
    }
    std::vector<int> person_of(n_nodes, -1);
    std::vector<PersonParse> people;
    auto person_for = [&](int node) {
        const int root = dsu.find(node);
        if (person_of[root] < 0) {
            person_of[root] = int(people.size());
            people.push_back(PersonParse{std::vector<std::optional<PersonPart>>(topo.part_count()),
                                         {}, 0.0, 0});
        }
        return person_of[root];
    };
    for (const auto& conn : best_selection) {
        const auto [j1, j2] = topo.limbs[conn.limb];
        const int id = person_for(offset[j1] + conn.src);
        people[id].parts[j1] = PersonPart{conn.src, candidates[j1][conn.src].pos,
                                          candidates[j1][conn.src].score};
        people[id].parts[j2] = PersonPart{conn.dst, candidates[j2][conn.dst].pos,
                                          candidates[j2][conn.dst].score};
        people[id].connections.push_back(conn);
    }
    for (int c : edges.redundant_edges) {
        const auto [j1, j2] = topo.limbs[c];
        for (auto [m, n] : eligible_pairs[c]) {
            if (dsu.find(offset[j1] + m) != dsu.find(offset[j2] + n)) continue;
            const int id = person_of[dsu.find(offset[j1] + m)];
            if (id < 0) continue;  // eligible pair between unassembled candidates
            people[id].connections.push_back({c, m, n, score_matrices[c].at(m, n).score});
        }
    }
    // The oracle reports the raw optimum: no person-level pruning.
    return detail::finalize(std::move(people), candidates, topo, 0, 0.0);
}

inline double total_score(const ParseResult& result) {
    double total = 0.0;
    for (const auto& person : result.people) total += person.score;
    return total;
}

}  // namespace paf
