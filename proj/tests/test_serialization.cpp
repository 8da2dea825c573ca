#include <doctest.h>

#include "helpers.hpp"

using namespace skeltrop;
using namespace testutil;

TEST_CASE("graph JSON round trip") {
    auto g = gallery::example_genus_one();
    CHECK(graph_from_json(graph_to_json(g)) == g);

    Rng rng(8675309);
    for (int trial = 0; trial < 50; ++trial) {
        auto r = random_graph(rng);
        CHECK(graph_from_json(graph_to_json(r)) == r);
    }
}

TEST_CASE("rationals are serialized as exact fraction strings") {
    AugmentedMetricGraph g;
    g.add_vertex(Vertex{"v", 0, ""});
    g.add_edge(Edge{"e", "v", "v", rat(1, 3)});
    auto text = graph_to_json(g);
    CHECK(text.find("\"1/3\"") != std::string::npos);
    CHECK(graph_from_json(text).edge("e").length == rat(1, 3));
}

TEST_CASE("morphism JSON round trip, including path-form images") {
    auto f = gallery::tate_isogeny(3);
    CHECK(morphism_from_json(morphism_to_json(f.data())) == f.data());

    auto c = gallery::divergent_demo(3);
    CHECK(morphism_from_json(morphism_to_json(c.pi2)) == c.pi2);
    auto text = morphism_to_json(c.pi2);
    CHECK(text.find("[\"A1\",\"A2\"]") != std::string::npos);

    SUBCASE("reversed path steps carry a tilde") {
        MorphismData d = c.pi2;
        d.edge_images["e"].path[1].reversed = true;
        auto round = morphism_from_json(morphism_to_json(d));
        CHECK(round == d);
    }
}

TEST_CASE("bundle round trip for all gallery fixtures") {
    std::vector<Bundle> bundles;
    bundles.push_back(bundle_of_graph("genus_one", gallery::example_genus_one()));
    auto f = gallery::tate_isogeny(2);
    bundles.push_back(bundle_of_morphism("tate_isogeny", f.source(), f.target(), f.data()));
    bundles.push_back(bundle_of_correspondence(gallery::tate_pair()));
    bundles.push_back(bundle_of_correspondence(gallery::hecke_Tl_default()));
    bundles.push_back(bundle_of_correspondence(gallery::hecke_Up(5, 1)));
    bundles.push_back(bundle_of_correspondence(gallery::divergent_demo(2)));
    for (const auto& b : bundles) {
        auto round = bundle_from_json(bundle_to_json(b));
        CHECK(round == b);
        // byte-identical re-serialization
        CHECK(bundle_to_json(round) == bundle_to_json(b));
    }
}

TEST_CASE("assemble_correspondence resolves bundle references") {
    auto c = gallery::hecke_Tl_default();
    auto bundle = bundle_from_json(bundle_to_json(bundle_of_correspondence(c)));
    auto back = assemble_correspondence(bundle);
    CHECK(back.x == c.x);
    CHECK(back.pi2.edge_images == c.pi2.edge_images);
    CHECK(back.identify_targets);
    REQUIRE(back.identification.has_value());
    CHECK(back.identification->vertex_map == c.identification->vertex_map);
}

TEST_CASE("malformed documents raise ParseError") {
    CHECK_THROWS_AS(bundle_from_json("{"), ParseError);
    CHECK_THROWS_AS(bundle_from_json("{}"), ParseError);
    CHECK_THROWS_AS(bundle_from_json("{\"graphs\":{}}"), ParseError);
    CHECK_THROWS_AS(graph_from_json("[1,2]"), ParseError);
    CHECK_THROWS_AS(morphism_from_json("{\"edge_images\":[]}"), ParseError);
    CHECK_THROWS_AS(matrix_from_json("{\"a\":1}"), ParseError);
}

TEST_CASE("matrix and operator bundle round trips") {
    IntMat m{{1, -2}, {3, 4}};
    CHECK(matrix_from_json(matrix_to_json(m)) == m);
    auto text = matrix_to_json(m);
    CHECK(text.find("\"-2\"") != std::string::npos); // decimal string entries

    auto bundle = correspondence_operator(gallery::hecke_Tl_default());
    auto round = operator_bundle_from_json(operator_bundle_to_json(bundle));
    CHECK(round.op == bundle.op);
    CHECK(round.adjoint == bundle.adjoint);
    CHECK(round.phi_map == bundle.phi_map);
    CHECK(round.phi1_factors == bundle.phi1_factors);
    CHECK(round.weight_dims == bundle.weight_dims);
}

TEST_CASE("DOT export") {
    auto dot = graph_to_dot("genus_one", gallery::example_genus_one());
    CHECK(dot.find("len=3") != std::string::npos);
    CHECK(dot.find("\"A\" -- \"A\"") != std::string::npos); // the self-loop
    CHECK(dot.find("leg:puncture") != std::string::npos);

    SUBCASE("graphs without legs emit no leg nodes") {
        auto plain = graph_to_dot("banana", banana(2));
        CHECK(plain.find("leg:") == std::string::npos);
    }
    SUBCASE("correspondence bundles are clustered with expansion annotations") {
        auto dot2 = bundle_to_dot(bundle_of_correspondence(gallery::hecke_Up(5, 1)));
        CHECK(dot2.find("cluster_x") != std::string::npos);
        CHECK(dot2.find("cluster_y1") != std::string::npos);
        CHECK(dot2.find("cluster_y2") != std::string::npos);
        CHECK(dot2.find("d=1") != std::string::npos);
        CHECK(dot2.find("d=5") != std::string::npos);
        CHECK(dot2.find("d=2") != std::string::npos);
    }
}

TEST_CASE("invariants and outcome rendering") {
    auto text = invariants_to_json(invariants(gallery::example_genus_one()));
    CHECK(text.find("\"genus\":1") != std::string::npos);
    CHECK(text.find("\"euler_char\":-1") != std::string::npos);

    auto outcome = stabilize(gallery::divergent_demo(2), 3);
    auto otext = outcome_to_json(outcome);
    CHECK(otext.find("\"diverged\"") != std::string::npos);
    CHECK(otext.find("\"1/2\"") != std::string::npos);
}
