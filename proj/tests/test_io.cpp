// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "paf/io.hpp"

using namespace paf;

namespace {

SkeletonTopology pair_topology() {
    RawTopology raw;
    raw.name = "pair";
    raw.parts = {"a", "b"};
    raw.limbs = {{"a", "b"}};
    raw.root = "a";
    return validate_topology(raw);
}

SkeletonTopology chain3() {
    RawTopology raw;
    raw.name = "chain3";
    raw.parts = {"a", "b", "c"};
    raw.limbs = {{"a", "b"}, {"b", "c"}};
    raw.root = "a";
    return validate_topology(raw);
}

std::filesystem::path test_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "paf_io_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

// A small stack with distinctive values in every plane.
FieldStack sample_stack(const SkeletonTopology& topo, int w = 8, int h = 8) {
    FieldStack stack;
    stack.width = w;
    stack.height = h;
    int plane_id = 0;
    auto fill = [&] {
        Grid<float> g(w, h, 0.0f);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) g(x, y) = float(plane_id * 1000 + y * w + x) * 0.125f;
        ++plane_id;
        return g;
    };
    for (int j = 0; j < topo.part_count(); ++j) stack.confidence.push_back(fill());
    for (int c = 0; c < 2 * topo.limb_count(); ++c) stack.paf.push_back(fill());
    return stack;
}

}  // namespace

TEST_CASE("field files round-trip bit-exactly") {
    const SkeletonTopology topo = chain3();
    const FieldStack stack = sample_stack(topo);
    const auto path = test_dir() / "roundtrip.paff";
    write_field_file(path, stack, topo, 4);

    const FieldFile file = read_field_file(path, topo);
    CHECK(bitwise_equal(file.stack, stack));
    CHECK(file.stride == 4);
    CHECK(file.parts == 3);
    CHECK(file.limbs == 2);
    CHECK(file.topology_hash == topology_hash(topo));

    SECTION("no temp file remains after the atomic write") {
        CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    }
    SECTION("negative zero and NaN payloads survive") {
        FieldStack odd = stack;
        odd.confidence[0](0, 0) = -0.0f;
        odd.confidence[0](1, 0) = std::numeric_limits<float>::quiet_NaN();
        const auto odd_path = test_dir() / "odd.paff";
        write_field_file(odd_path, odd, topo);
        CHECK(bitwise_equal(read_field_file(odd_path, topo).stack, odd));
    }
}

TEST_CASE("field file corruption is detected") {
    const SkeletonTopology topo = pair_topology();
    const FieldStack stack = sample_stack(topo);
    const std::string bytes = encode_field_stack(stack, topo);

    auto code_of = [](const std::string& data) {
        try {
            decode_field_stack(data);
            return errc{-1};
        } catch (const error& e) {
            return e.code();
        }
    };

    SECTION("bad magic") {
        std::string broken = bytes;
        broken[0] = 'Q';
        CHECK(code_of(broken) == errc::bad_magic);
    }
    SECTION("unsupported version") {
        std::string broken = bytes;
        broken[4] = 2;  // little-endian u16 version at offset 4
        CHECK(code_of(broken) == errc::version_unsupported);
    }
    SECTION("flipped payload byte fails the trailing hash") {
        std::string broken = bytes;
        broken[40] = char(broken[40] ^ 0x01);
        CHECK(code_of(broken) == errc::io_error);
    }
    SECTION("flipped trailing-hash byte also fails") {
        std::string broken = bytes;
        broken.back() = char(broken.back() ^ 0xff);
        CHECK(code_of(broken) == errc::io_error);
    }
    SECTION("truncation at any point reads as io_error") {
        for (size_t cut : {size_t(2), size_t(20), size_t(40), bytes.size() - 3}) {
            CHECK(code_of(bytes.substr(0, cut)) == errc::io_error);
        }
    }
    SECTION("intact bytes decode cleanly") {
        const FieldFile file = decode_field_stack(bytes);
        CHECK(bitwise_equal(file.stack, stack));
    }
}

TEST_CASE("field files are bound to their topology") {
    const SkeletonTopology topo = pair_topology();
    const FieldStack stack = sample_stack(topo);
    const auto path = test_dir() / "bound.paff";
    write_field_file(path, stack, topo);

    CHECK_THROWS_MATCHES(read_field_file(path, chain3()), error,
                         Catch::Matchers::Predicate<error>([](const error& e) {
                             return e.code() == errc::topology_hash_mismatch;
                         }));

    SECTION("encoding rejects a stack that does not fit the topology") {
        FieldStack broken = stack;
        broken.paf.pop_back();
        CHECK_THROWS_MATCHES(encode_field_stack(broken, topo), error,
                             Catch::Matchers::Predicate<error>([](const error& e) {
                                 return e.code() == errc::topology_field_mismatch;
                             }));
    }
    SECTION("encoding rejects a plane of the wrong shape") {
        FieldStack broken = stack;
        broken.paf[1] = Grid<float>(4, 4, 0.0f);
        CHECK_THROWS_MATCHES(encode_field_stack(broken, topo), error,
                             Catch::Matchers::Predicate<error>([](const error& e) {
                                 return e.code() == errc::dim_mismatch;
                             }));
    }
}

TEST_CASE("scene JSON round-trips exact coordinates") {
    const SkeletonTopology topo = chain3();
    Scene scene;
    scene.width = 96;
    scene.height = 96;
    PersonAnnotation p1;
    p1.parts = {Keypoint{{0.1 + 0.2, 20.0}}, std::nullopt, Keypoint{{95.9999, 1.0 / 3.0}}};
    scene.people = {p1};

    const nlohmann::json doc = nlohmann::json::parse(scene_to_json(scene, topo).dump());
    const Scene back = scene_from_json(doc, topo);
    REQUIRE(back.people.size() == 1);
    REQUIRE(back.people[0].parts.size() == 3);
    CHECK(back.people[0].parts[0]->pos.x == 0.1 + 0.2);
    CHECK_FALSE(back.people[0].parts[1].has_value());
    CHECK(back.people[0].parts[2]->pos.y == 1.0 / 3.0);

    SECTION("out-of-frame keypoints are flagged on load") {
        nlohmann::json moved = doc;
        moved["people"][0]["keypoints"][0] = {-5.0, 20.0};
        const Scene flagged = scene_from_json(moved, topo);
        CHECK(flagged.people[0].parts[0]->out_of_frame);
        CHECK_FALSE(flagged.people[0].parts[2]->out_of_frame);
    }
    SECTION("keypoint count must match the topology") {
        nlohmann::json broken = doc;
        broken["people"][0]["keypoints"].erase(2);
        CHECK_THROWS_AS(scene_from_json(broken, topo), error);
    }
    SECTION("a missing topology stamp is rejected") {
        nlohmann::json broken = doc;
        broken.erase("topology");
        CHECK_THROWS_AS(scene_from_json(broken, topo), error);
    }
    SECTION("a foreign topology stamp is rejected") {
        CHECK_THROWS_MATCHES(scene_from_json(doc, pair_topology()), error,
                             Catch::Matchers::Predicate<error>([](const error& e) {
                                 return e.code() == errc::topology_hash_mismatch;
                             }));
    }
}

TEST_CASE("pose JSON preserves the positional half") {
    const SkeletonTopology topo = chain3();
    ParseResult result;
    PersonParse person;
    person.parts.resize(3);
    person.parts[0] = PersonPart{0, {12.25, 30.5}, 0.875};
    person.parts[2] = PersonPart{1, {14.0, 60.0}, 0.75};
    person.connections.push_back({0, 0, 0, 0.9});
    person.score = 2.525;
    person.part_count = 2;
    result.people.push_back(person);
    PartCandidate stray;
    stray.part = 1;
    stray.index = 0;
    result.unassigned.push_back(stray);

    const nlohmann::json doc = nlohmann::json::parse(poses_to_json(result, topo).dump());
    CHECK(doc["unassigned_candidates"] == 1);
    const auto people = poses_from_json(doc, topo);
    REQUIRE(people.size() == 1);
    CHECK(people[0].score == 2.525);
    CHECK(people[0].part_count == 2);
    REQUIRE(people[0].parts[0].has_value());
    CHECK_FALSE(people[0].parts[1].has_value());
    CHECK(people[0].parts[0]->pos.x == 12.25);
    CHECK(people[0].parts[0]->score == 0.875);
    CHECK(people[0].parts[0]->candidate == -1);  // identity is not serialized
    CHECK(people[0].connections.empty());
}

TEST_CASE("candidate JSON lists every part") {
    const SkeletonTopology topo = pair_topology();
    std::vector<std::vector<PartCandidate>> candidates(2);
    PartCandidate c;
    c.part = 1;
    c.index = 0;
    c.pos = {3.5, 4.25};
    c.score = 0.5f;
    c.peak_x = 4;
    c.peak_y = 4;
    candidates[1].push_back(c);

    const nlohmann::json doc = candidates_to_json(candidates, topo);
    REQUIRE(doc["candidates"].size() == 2);
    CHECK(doc["candidates"][0].empty());
    REQUIRE(doc["candidates"][1].size() == 1);
    CHECK(doc["candidates"][1][0]["x"] == 3.5);
    CHECK(doc["candidates"][1][0]["peak"][0] == 4);
}

TEST_CASE("reports serialize with timings quarantined") {
    MatchReport report;
    report.scenes = 3;
    report.gt_people = 5;
    report.predictions = 5;
    report.oks_thresholds = {0.5, 0.55};
    report.precision = {1.0, 1.0};
    report.recall = {1.0, 0.8};
    report.ap = {1.0, 0.8};
    report.mean_ap = 0.9;
    report.pckh05 = 1.0;
    report.pose_recall = 1.0;
    report.mean_localization_error = 0.01;
    report.wall_ms = 123.0;

    SECTION("round-trip report") {
        const nlohmann::json doc = roundtrip_report_to_json(report);
        CHECK(doc["kind"] == "roundtrip");
        CHECK(doc["pose_recall"] == 1.0);
        CHECK(doc["timings"]["wall_ms"] == 123.0);
        const nlohmann::json stripped = strip_timings(doc);
        CHECK_FALSE(stripped.contains("timings"));
        CHECK(stripped["mean_ap"] == 0.9);

        // Two runs differing only in wall time strip to identical bytes.
        MatchReport slower = report;
        slower.wall_ms = 9999.0;
        CHECK(strip_timings(roundtrip_report_to_json(slower)).dump() == stripped.dump());
    }
    SECTION("absent pose recall serializes as null") {
        report.pose_recall.reset();
        CHECK(roundtrip_report_to_json(report)["pose_recall"].is_null());
    }
    SECTION("compare report quarantines per-strategy wall times") {
        report.strategies = {{"greedy", 10.0, 1.0, 3.0},
                             {"hungarian", 10.0, 1.0, 4.0},
                             {"exhaustive", 10.0, 1.0, 50.0}};
        report.speed_ratio = 16.7;
        const nlohmann::json doc = compare_report_to_json(report);
        CHECK(doc["kind"] == "compare");
        REQUIRE(doc["strategies"].size() == 3);
        CHECK_FALSE(doc["strategies"][0].contains("wall_ms"));
        CHECK(doc["timings"]["strategy_wall_ms"]["exhaustive"] == 50.0);
        CHECK(doc["timings"]["speed_ratio"] == 16.7);
        CHECK_FALSE(strip_timings(doc).dump().find("speed_ratio") != std::string::npos);
    }
    SECTION("bench report keeps latencies out of the deterministic half") {
        std::vector<LatencyStats> series{{3, 10, 1.5, 1.4, 2.0, 42.0}};
        const nlohmann::json doc = bench_report_to_json(series);
        CHECK(doc["kind"] == "bench");
        CHECK(doc["series"][0]["score_checksum"] == 42.0);
        CHECK_FALSE(doc["series"][0].contains("mean_ms"));
        CHECK(doc["timings"]["series"][0]["mean_ms"] == 1.5);

        const std::string csv = bench_to_csv(series);
        CHECK(csv.find("n_people,repetitions,mean_ms,p50_ms,p95_ms\n") == 0);
        CHECK(csv.find("3,10,1.5000") != std::string::npos);
    }
    SECTION("text renderings mention their key numbers") {
        CHECK(roundtrip_report_to_text(report).find("false positives") != std::string::npos);
        report.strategies = {{"greedy", 10.0, 1.0, 3.0}};
        CHECK(compare_report_to_text(report).find("greedy") != std::string::npos);
        std::vector<LatencyStats> series{{3, 10, 1.5, 1.4, 2.0, 42.0}};
        CHECK(bench_report_to_text(series).find("p95") != std::string::npos);
    }
}

TEST_CASE("byte-level file helpers") {
    const auto path = test_dir() / "blob.bin";
    std::string payload = "abc";
    payload.push_back('\0');
    payload += "def\x01\xff";
    atomic_write(path, payload);
    CHECK(read_bytes(path) == payload);

    CHECK_THROWS_MATCHES(read_bytes(test_dir() / "does_not_exist.bin"), error,
                         Catch::Matchers::Predicate<error>(
                             [](const error& e) { return e.code() == errc::io_error; }));
}

TEST_CASE("hash hex encoding round-trips") {
    const uint64_t h = 0xdeadbeefcafe1234ULL;
    CHECK(detail::parse_hash_hex(detail::hash_hex(h)) == h);
    CHECK(detail::hash_hex(h) == "0xdeadbeefcafe1234");
    CHECK(detail::hash_hex(0x1ULL) == "0x0000000000000001");
}
