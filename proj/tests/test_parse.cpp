// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "paf/detect.hpp"
#include "paf/fieldgen.hpp"
#include "paf/parse.hpp"

using namespace paf;

namespace {

SkeletonTopology chain3() {
    RawTopology raw;
    raw.name = "chain3";
    raw.parts = {"a", "b", "c"};
    raw.limbs = {{"a", "b"}, {"b", "c"}};
    raw.root = "a";
    return validate_topology(raw);
}

SkeletonTopology triangle() {
    RawTopology raw;
    raw.name = "triangle";
    raw.parts = {"a", "b", "c"};
    raw.limbs = {{"a", "b"}, {"b", "c"}, {"a", "c"}};
    raw.root = "a";
    return validate_topology(raw);
}

// n candidates for one part at throwaway positions, each with confidence 0.5.
std::vector<PartCandidate> cands(int part, int n, double score = 0.5) {
    std::vector<PartCandidate> out;
    for (int i = 0; i < n; ++i) {
        PartCandidate c;
        c.part = part;
        c.index = i;
        c.pos = {10.0 * part + 100.0, 10.0 * i + 50.0};
        c.score = float(score);
        c.peak_x = int(c.pos.x);
        c.peak_y = int(c.pos.y);
        out.push_back(c);
    }
    return out;
}

}  // namespace

TEST_CASE("two disjoint people assemble from per-limb matchings") {
    const SkeletonTopology topo = chain3();
    const EdgeClassification edges = classify_edges(topo);
    const std::vector<std::vector<PartCandidate>> candidates{cands(0, 2), cands(1, 2), cands(2, 2)};
    const std::vector<ScoreMatrix> matrices{
        ScoreMatrix::from_values({{0.9, 0.1}, {0.1, 0.8}}),
        ScoreMatrix::from_values({{0.7, 0.2}, {0.15, 0.6}}),
    };
    const ParseResult result = parse_poses_from_matrices(candidates, matrices, topo, edges);

    REQUIRE(result.people.size() == 2);
    const PersonParse& first = result.people[0];
    const PersonParse& second = result.people[1];
    CHECK(first.part_count == 3);
    CHECK(second.part_count == 3);
    // Diagonal matchings: person 0 takes candidate 0 of every part.
    for (int j = 0; j < 3; ++j) {
        REQUIRE(first.parts[j].has_value());
        CHECK(first.parts[j]->candidate == 0);
        CHECK(second.parts[j]->candidate == 1);
    }
    // Score = connections + three 0.5 candidate confidences.
    CHECK(first.score == Catch::Approx(0.9 + 0.7 + 1.5).margin(1e-12));
    CHECK(second.score == Catch::Approx(0.8 + 0.6 + 1.5).margin(1e-12));
    CHECK(first.score >= second.score);  // sorted by descending score
    CHECK(result.unassigned.empty());
}

TEST_CASE("person-level pruning") {
    const SkeletonTopology topo = chain3();
    const EdgeClassification edges = classify_edges(topo);
    const std::vector<std::vector<PartCandidate>> candidates{cands(0, 2), cands(1, 2), cands(2, 2)};
    const std::vector<ScoreMatrix> matrices{
        ScoreMatrix::from_values({{0.9, 0.1}, {0.1, 0.8}}),
        ScoreMatrix::from_values({{0.7, 0.2}, {0.15, 0.6}}),
    };

    SECTION("min_parts discards small assemblies and frees their candidates") {
        ParseConfig config;
        config.min_parts = 4;  // unattainable on a 3-part topology
        const ParseResult result =
            parse_poses_from_matrices(candidates, matrices, topo, edges, config);
        CHECK(result.people.empty());
        CHECK(result.unassigned.size() == 6);
        // Unassigned listing is part-major, candidate-ascending.
        CHECK(result.unassigned[0].part == 0);
        CHECK(result.unassigned[0].index == 0);
        CHECK(result.unassigned[5].part == 2);
        CHECK(result.unassigned[5].index == 1);
    }
    SECTION("min_score_per_part prunes the weaker person only") {
        ParseConfig config;
        config.min_score_per_part = 1.0;  // P0 scores 3.1/3 parts, P1 2.9/3
        const ParseResult result =
            parse_poses_from_matrices(candidates, matrices, topo, edges, config);
        REQUIRE(result.people.size() == 1);
        CHECK(result.people[0].parts[0]->candidate == 0);
        CHECK(result.unassigned.size() == 3);
        for (const auto& c : result.unassigned) CHECK(c.index == 1);
    }
}

TEST_CASE("later connections merge previously separate fragments") {
    RawTopology raw;
    raw.name = "chain4";
    raw.parts = {"a", "b", "c", "d"};
    raw.limbs = {{"a", "b"}, {"b", "c"}, {"c", "d"}};
    raw.root = "a";
    const SkeletonTopology topo = validate_topology(raw);
    const EdgeClassification edges = classify_edges(topo);
    const std::vector<std::vector<PartCandidate>> candidates{cands(0, 1), cands(1, 1), cands(2, 1),
                                                             cands(3, 1)};
    // The middle limb is weakest: the two ends assemble first as separate
    // fragments, then the middle connection merges them.
    const std::vector<ScoreMatrix> matrices{
        ScoreMatrix::from_values({{0.9}}),
        ScoreMatrix::from_values({{0.3}}),
        ScoreMatrix::from_values({{0.8}}),
    };
    const ParseResult result = parse_poses_from_matrices(candidates, matrices, topo, edges);
    REQUIRE(result.people.size() == 1);
    CHECK(result.people[0].part_count == 4);
    CHECK(result.people[0].connections.size() == 3);
    CHECK(result.people[0].score == Catch::Approx(0.9 + 0.3 + 0.8 + 4 * 0.5).margin(1e-12));
}

TEST_CASE("redundant limbs close cycles and veto contradictory merges") {
    const SkeletonTopology topo = triangle();
    const EdgeClassification edges = classify_edges(topo);
    REQUIRE(edges.tree_edges == std::vector<int>{0, 2});
    REQUIRE(edges.redundant_edges == std::vector<int>{1});
    const std::vector<std::vector<PartCandidate>> candidates{cands(0, 2), cands(1, 2), cands(2, 2)};

    SECTION("cycle-closing connection adds its score to the same person") {
        const std::vector<ScoreMatrix> matrices{
            ScoreMatrix::from_values({{0.9, 0.0}, {0.0, 0.85}}),   // a-b
            ScoreMatrix::from_values({{0.7, 0.0}, {0.0, 0.65}}),   // b-c (redundant)
            ScoreMatrix::from_values({{0.8, 0.0}, {0.0, 0.75}}),   // a-c
        };
        const ParseResult result = parse_poses_from_matrices(candidates, matrices, topo, edges);
        REQUIRE(result.people.size() == 2);
        CHECK(result.people[0].connections.size() == 3);
        CHECK(result.people[0].score == Catch::Approx(0.9 + 0.8 + 0.7 + 1.5).margin(1e-12));
        CHECK(result.people[1].score == Catch::Approx(0.85 + 0.75 + 0.65 + 1.5).margin(1e-12));

        SECTION("disabling redundant limbs removes exactly that evidence") {
            ParseConfig config;
            config.use_redundant = false;
            const ParseResult plain =
                parse_poses_from_matrices(candidates, matrices, topo, edges, config);
            REQUIRE(plain.people.size() == 2);
            CHECK(plain.people[0].connections.size() == 2);
            CHECK(plain.people[0].score == Catch::Approx(0.9 + 0.8 + 1.5).margin(1e-12));
        }
    }
    SECTION("a cross-person connection with conflicting parts is ignored") {
        const std::vector<ScoreMatrix> matrices{
            ScoreMatrix::from_values({{0.9, 0.0}, {0.0, 0.85}}),
            // Redundant b-c prefers the crossing pair (b0, c1).
            ScoreMatrix::from_values({{0.3, 0.6}, {0.0, 0.55}}),
            ScoreMatrix::from_values({{0.8, 0.0}, {0.0, 0.75}}),
        };
        const ParseResult result = parse_poses_from_matrices(candidates, matrices, topo, edges);
        REQUIRE(result.people.size() == 2);
        for (const auto& person : result.people) {
            CHECK(person.part_count == 3);
            for (const auto& conn : person.connections) CHECK(conn.limb != 1);
        }
        CHECK(result.people[0].score == Catch::Approx(0.9 + 0.8 + 1.5).margin(1e-12));
    }
}

TEST_CASE("a connection into an already-occupied slot is ignored") {
    const SkeletonTopology topo = triangle();
    const EdgeClassification edges = classify_edges(topo);
    // P0 assembles as {a0, b0, c0} through the two tree limbs. The redundant
    // b-c limb then proposes (b1, c0): c0 is owned by P0, whose b slot is
    // already filled by stronger evidence, so the connection must be dropped
    // rather than overwrite or duplicate the slot.
    const std::vector<std::vector<PartCandidate>> candidates{cands(0, 1), cands(1, 2), cands(2, 1)};
    const std::vector<ScoreMatrix> matrices{
        ScoreMatrix::from_values({{0.9, 0.0}}),         // a-b: only (a0, b0)
        ScoreMatrix::from_values({{0.0}, {0.7}}),       // b-c: only (b1, c0)
        ScoreMatrix::from_values({{0.8}}),              // a-c: (a0, c0)
    };
    const ParseResult result = parse_poses_from_matrices(candidates, matrices, topo, edges);
    REQUIRE(result.people.size() == 1);
    const PersonParse& person = result.people[0];
    CHECK(person.part_count == 3);
    CHECK(person.parts[1]->candidate == 0);
    CHECK(person.connections.size() == 2);
    for (const auto& conn : person.connections) CHECK(conn.limb != 1);
    REQUIRE(result.unassigned.size() == 1);
    CHECK(result.unassigned[0].part == 1);
    CHECK(result.unassigned[0].index == 1);
}

TEST_CASE("field-stack parsing matches matrix parsing") {
    const SkeletonTopology topo = chain3();
    const EdgeClassification edges = classify_edges(topo);
    Scene scene;
    scene.width = 128;
    scene.height = 128;
    PersonAnnotation p1, p2;
    p1.parts = {Keypoint{{30.0, 20.0}}, Keypoint{{30.0, 60.0}}, Keypoint{{30.0, 100.0}}};
    p2.parts = {Keypoint{{90.0, 25.0}}, Keypoint{{90.0, 65.0}}, Keypoint{{90.0, 105.0}}};
    scene.people = {p1, p2};
    const FieldStack stack = render_scene_fields(scene, topo, RenderParams{});
    const auto candidates = detect_candidates(stack, topo, DetectParams{});

    const ParseConfig config;
    const ParseResult from_stack = parse_poses(candidates, stack, topo, edges, config);

    std::vector<ScoreMatrix> matrices(topo.limb_count());
    for (int c = 0; c < topo.limb_count(); ++c) {
        const auto [j1, j2] = topo.limbs[c];
        matrices[c] = score_matrix(stack.paf[topo.paf_channel_x(c)], stack.paf[topo.paf_channel_y(c)],
                                   candidates[j1], candidates[j2], config.assoc);
    }
    const ParseResult from_matrices =
        parse_poses_from_matrices(candidates, matrices, topo, edges, config);

    REQUIRE(from_stack.people.size() == 2);
    REQUIRE(from_stack.people.size() == from_matrices.people.size());
    for (size_t i = 0; i < from_stack.people.size(); ++i) {
        CHECK(from_stack.people[i].score == from_matrices.people[i].score);
        REQUIRE(from_stack.people[i].parts.size() == from_matrices.people[i].parts.size());
        for (size_t j = 0; j < from_stack.people[i].parts.size(); ++j) {
            REQUIRE(from_stack.people[i].parts[j].has_value() ==
                    from_matrices.people[i].parts[j].has_value());
            if (from_stack.people[i].parts[j])
                CHECK(from_stack.people[i].parts[j]->candidate ==
                      from_matrices.people[i].parts[j]->candidate);
        }
    }
    // Each recovered person hugs one ground-truth column of keypoints.
    for (const auto& person : from_stack.people) {
        REQUIRE(person.part_count == 3);
        const double x = person.parts[0]->pos.x;
        for (int j = 0; j < 3; ++j) CHECK(std::abs(person.parts[j]->pos.x - x) < 0.1);
    }
}

TEST_CASE("exhaustive parse finds the joint optimum") {
    const SkeletonTopology topo = chain3();
    const EdgeClassification edges = classify_edges(topo);
    const std::vector<std::vector<PartCandidate>> candidates{cands(0, 2, 0.0), cands(1, 2, 0.0),
                                                             cands(2, 1, 0.0)};
    // Greedy's trap: taking (a0,b0)=0.9 forces (a1,b1)=0.1; jointly (a0,b1) and
    // (a1,b0) are worth 1.6.
    const std::vector<ScoreMatrix> matrices{
        ScoreMatrix::from_values({{0.9, 0.8}, {0.8, 0.1}}),
        ScoreMatrix::from_values({{0.5}, {0.4}}),
    };
    const ParseResult best = exhaustive_parse(candidates, matrices, topo);
    CHECK(total_score(best) == Catch::Approx(0.8 + 0.8 + 0.5).margin(1e-12));
    REQUIRE(best.people.size() == 2);
    CHECK(best.people[0].part_count == 3);  // {a1, b0, c0}
    CHECK(best.people[1].part_count == 2);  // {a0, b1}

    SECTION("greedy parsing is never better") {
        ParseConfig config;
        config.min_parts = 0;
        config.min_score_per_part = 0.0;
        const ParseResult greedy =
            parse_poses_from_matrices(candidates, matrices, topo, edges, config);
        CHECK(total_score(greedy) <= total_score(best) + 1e-12);
        CHECK(total_score(greedy) == Catch::Approx(0.9 + 0.5 + 0.1).margin(1e-12));

        ParseConfig hung = config;
        hung.matcher = Matcher::hungarian;
        const ParseResult optimal =
            parse_poses_from_matrices(candidates, matrices, topo, edges, hung);
        CHECK(total_score(optimal) == Catch::Approx(total_score(best)).margin(1e-12));
    }
}

TEST_CASE("exhaustive parse credits redundant limbs within a person") {
    const SkeletonTopology topo = triangle();
    const std::vector<std::vector<PartCandidate>> candidates{cands(0, 2, 0.0), cands(1, 2, 0.0),
                                                             cands(2, 2, 0.0)};
    const std::vector<ScoreMatrix> matrices{
        ScoreMatrix::from_values({{0.9, 0.0}, {0.0, 0.85}}),
        ScoreMatrix::from_values({{0.7, 0.0}, {0.0, 0.65}}),
        ScoreMatrix::from_values({{0.8, 0.0}, {0.0, 0.75}}),
    };
    const ParseResult best = exhaustive_parse(candidates, matrices, topo);
    CHECK(total_score(best) == Catch::Approx(0.9 + 0.85 + 0.8 + 0.75 + 0.7 + 0.65).margin(1e-12));
    REQUIRE(best.people.size() == 2);
    CHECK(best.people[0].connections.size() == 3);
    CHECK(best.people[1].connections.size() == 3);
}

TEST_CASE("exhaustive guard rejects oversized instances") {
    RawTopology raw;
    raw.name = "long_chain";
    for (int i = 0; i < 20; ++i) raw.parts.push_back("p" + std::to_string(i));
    for (int i = 0; i + 1 < 20; ++i) raw.limbs.emplace_back(raw.parts[i], raw.parts[i + 1]);
    const SkeletonTopology topo = validate_topology(raw);
    std::vector<std::vector<PartCandidate>> candidates;
    for (int j = 0; j < 20; ++j) candidates.push_back(cands(j, 2));
    std::vector<ScoreMatrix> matrices(19, ScoreMatrix(2, 2));
    CHECK_THROWS_MATCHES(exhaustive_parse(candidates, matrices, topo), error,
                         Catch::Matchers::Predicate<error>([](const error& e) {
                             return e.code() == errc::instance_too_large;
                         }));
}

TEST_CASE("parse input validation") {
    const SkeletonTopology topo = chain3();
    const EdgeClassification edges = classify_edges(topo);
    const std::vector<std::vector<PartCandidate>> candidates{cands(0, 1), cands(1, 1), cands(2, 1)};

    SECTION("wrong candidate list count") {
        const std::vector<std::vector<PartCandidate>> short_list{cands(0, 1)};
        const std::vector<ScoreMatrix> matrices(2, ScoreMatrix(1, 1));
        CHECK_THROWS_AS(parse_poses_from_matrices(short_list, matrices, topo, edges), error);
    }
    SECTION("wrong matrix count") {
        const std::vector<ScoreMatrix> matrices(1, ScoreMatrix(1, 1));
        CHECK_THROWS_AS(parse_poses_from_matrices(candidates, matrices, topo, edges), error);
        CHECK_THROWS_AS(exhaustive_parse(candidates, matrices, topo), error);
    }
    SECTION("wrong PAF plane count") {
        Scene scene;
        scene.width = 64;
        scene.height = 64;
        FieldStack stack = render_scene_fields(scene, topo, RenderParams{});
        stack.paf.pop_back();
        CHECK_THROWS_AS(parse_poses(candidates, stack, topo, edges), error);
    }
}
