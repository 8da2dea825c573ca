#include <doctest.h>

#include "helpers.hpp"

using namespace skeltrop;
using namespace testutil;

TEST_CASE("identity correspondence is valid and skeletal") {
    auto c = identity_correspondence(gallery::example_genus_one());
    auto rep = validate_correspondence(c);
    CHECK(rep.ok());
    CHECK(rep.is_skeletal);
}

TEST_CASE("endpoint-mismatched edge image invalidates the correspondence") {
    auto c = identity_correspondence(banana(2));
    c.pi2.edge_images["e0"] = EdgeImage{"e0", {PathStep{"e0", true}}, 1};
    auto rep = validate_correspondence(c);
    CHECK_FALSE(rep.ok());
}

TEST_CASE("hecke_Tl_default is skeletal and stabilizes instantly") {
    auto c = gallery::hecke_Tl_default();
    auto rep = validate_correspondence(c);
    CHECK(rep.ok());
    CHECK(rep.is_skeletal);
    CHECK(rep.identification_isometric);
    auto outcome = stabilize(c, 5);
    CHECK(outcome.status == StabilizationStatus::Stabilized);
    CHECK(outcome.iterations == 1);
    CHECK(outcome.added_points_per_iteration == std::vector<Int>{0});
    CHECK(outcome.result == c); // fixed point materializes to itself
}

TEST_CASE("stabilize rejects a zero iteration cap") {
    CHECK_THROWS_AS(stabilize(gallery::hecke_Tl_default(), 0), ParameterError);
}

TEST_CASE("one-interior-point fixture stabilizes in two iterations") {
    auto c = one_interior_point_fixture();
    auto rep = validate_correspondence(c);
    CHECK(rep.ok());
    CHECK_FALSE(rep.is_skeletal);

    auto outcome = stabilize(c, 10);
    REQUIRE(outcome.status == StabilizationStatus::Stabilized);
    CHECK(outcome.iterations == 2);
    CHECK(outcome.added_points_per_iteration == std::vector<Int>{2, 0});
    // exactly one source vertex and one target vertex were added
    CHECK(outcome.result.x.vertices().size() == c.x.vertices().size() + 1);
    CHECK(outcome.result.y1.vertices().size() == c.y1.vertices().size());
    CHECK(outcome.result.y2.vertices().size() == c.y2.vertices().size() + 1);
    // the result is skeletal and a fixed point
    auto rep2 = validate_correspondence(outcome.result);
    CHECK(rep2.ok());
    CHECK(rep2.is_skeletal);
    auto again = stabilize(outcome.result, 10);
    CHECK(again.iterations == 1);
    CHECK(again.added_points_per_iteration == std::vector<Int>{0});

    SUBCASE("dropping the added source vertex breaks the skeletal condition") {
        // same data, but only the target-side vertex present: the source
        // cut is then forced again by the closure.
        Correspondence minus = c;
        minus.y2 = AugmentedMetricGraph();
        minus.y2.add_vertex(Vertex{"z", 0, ""});
        minus.y2.add_vertex(Vertex{"w", 0, ""});
        minus.y2.add_edge(Edge{"a", "z", "w", rat(1, 2)});
        minus.y2.add_edge(Edge{"b", "w", "z", rat(1, 2)});
        minus.pi2.edge_images["e"] = EdgeImage{"e", {PathStep{"a", false}, PathStep{"b", false}}, 1};
        auto rep3 = validate_correspondence(minus);
        CHECK(rep3.ok());
        CHECK_FALSE(rep3.is_skeletal);
        // re-closing adds exactly the deleted source vertex back
        auto reclosed = stabilize(minus, 5);
        CHECK(reclosed.status == StabilizationStatus::Stabilized);
        CHECK(reclosed.result.x.vertices().size() == 2);
    }
}

TEST_CASE("stabilization preserves genus and Euler characteristic") {
    auto check_preserved = [](const Correspondence& before, const Correspondence& after) {
        CHECK(invariants(after.x).genus == invariants(before.x).genus);
        CHECK(invariants(after.y1).genus == invariants(before.y1).genus);
        CHECK(invariants(after.y2).genus == invariants(before.y2).genus);
        CHECK(invariants(after.x).euler_char == invariants(before.x).euler_char);
        CHECK(invariants(after.y1).euler_char == invariants(before.y1).euler_char);
        CHECK(invariants(after.y2).euler_char == invariants(before.y2).euler_char);
        // vertex sets only grow
        CHECK(after.x.vertices().size() >= before.x.vertices().size());
        CHECK(after.y1.vertices().size() >= before.y1.vertices().size());
        CHECK(after.y2.vertices().size() >= before.y2.vertices().size());
    };
    auto fixture = one_interior_point_fixture();
    check_preserved(fixture, stabilize(fixture, 10).result);
    auto pair = gallery::tate_pair();
    check_preserved(pair, stabilize(pair, 10).result);
    auto divergent = gallery::divergent_demo(2);
    check_preserved(divergent, stabilize(divergent, 8).result);
}

TEST_CASE("stabilize is deterministic across runs") {
    auto a = stabilize(gallery::divergent_demo(3), 12);
    auto b = stabilize(gallery::divergent_demo(3), 12);
    CHECK(bundle_to_json(bundle_of_correspondence(a.result)) ==
          bundle_to_json(bundle_of_correspondence(b.result)));
    CHECK(a.min_spacing_per_iteration == b.min_spacing_per_iteration);
}

TEST_CASE("divergent_demo diverges with exact geometric spacing decay") {
    for (unsigned p : {2u, 3u, 5u}) {
        auto c = gallery::divergent_demo(p);
        auto rep = validate_correspondence(c);
        CHECK(rep.ok());
        CHECK_FALSE(rep.is_skeletal);
        CHECK_FALSE(rep.identification_isometric);

        auto outcome = stabilize(c, 20);
        REQUIRE(outcome.status == StabilizationStatus::Diverged);
        CHECK(outcome.iterations == 20);
        REQUIRE(outcome.min_spacing_per_iteration.size() == 20);
        // min spacing is exactly p^-k after iteration k
        Rational expected = rat(1, p);
        for (std::size_t k = 0; k < 20; ++k) {
            CHECK(outcome.min_spacing_per_iteration[k] == expected);
            expected = expected / rat(p);
        }
        // ratio between consecutive spacings is exactly 1/p from iteration 1
        for (std::size_t k = 0; k + 1 < 20; ++k)
            CHECK(outcome.min_spacing_per_iteration[k + 1] / outcome.min_spacing_per_iteration[k] ==
                  rat(1, p));
    }
}

TEST_CASE("divergent_demo without identified targets stabilizes") {
    for (unsigned p : {2u, 3u}) {
        auto c = gallery::divergent_demo(p, /*identify=*/false);
        auto outcome = stabilize(c, 20);
        CHECK(outcome.status == StabilizationStatus::Stabilized);
        // the pullback chain breaks: only the finite refinement closure runs
        CHECK(outcome.iterations <= 3);
    }
}

TEST_CASE("skeletal_hull is idempotent on stabilized results") {
    auto outcome = skeletal_hull(one_interior_point_fixture());
    REQUIRE(outcome.status == StabilizationStatus::Stabilized);
    auto again = skeletal_hull(outcome.result);
    CHECK(again.status == StabilizationStatus::Stabilized);
    CHECK(again.result == outcome.result);

    SUBCASE("divergent outcomes pass through") {
        auto diverged = skeletal_hull(gallery::divergent_demo(2), 6);
        CHECK(diverged.status == StabilizationStatus::Diverged);
        CHECK(diverged.iterations == 6);
    }
}

TEST_CASE("every added vertex is forced: minimality on the small fixture") {
    auto outcome = stabilize(one_interior_point_fixture(), 10);
    REQUIRE(outcome.status == StabilizationStatus::Stabilized);
    // the two added vertices are the pullback of tau and its image; the
    // closure added nothing else
    Int total_added = 0;
    for (const auto& a : outcome.added_points_per_iteration) total_added += a;
    CHECK(total_added == 2);
}

TEST_CASE("mismatched graph references are a validation error") {
    auto c = gallery::hecke_Tl_default();
    c.pi1.edge_images["e0"] = EdgeImage{"e0", {PathStep{"nonexistent", false}}, 1};
    auto rep = validate_correspondence(c);
    CHECK_FALSE(rep.ok());
}
