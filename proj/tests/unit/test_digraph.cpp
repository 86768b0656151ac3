#include <doctest.h>

#include "rigid/digraph.hpp"
#include "rigid/endosearch.hpp"
#include "rigid/gadgets.hpp"
#include "rigid/interchange.hpp"
#include "test_support.hpp"

using namespace rigid;

namespace {

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

Digraph cycle3() { return make_graph(3, Pairs{{0, 1}, {1, 2}, {2, 0}}); }

Digraph complete(std::size_t n)
{
    Pairs a;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
            if (u != v)
                a.emplace_back(u, v);
    return make_graph(n, a);
}

VertexMap rotation() { return testing::to_map({1, 2, 0}); }

}  // namespace

TEST_CASE("outdegree")
{
    auto iso = make_graph(2, Pairs{{0, 1}});
    CHECK(outdegree(iso, vertex(1)) == 0);
    CHECK(indegree(iso, vertex(1)) == 1);

    auto ray = gadgets::build_ray(6);
    CHECK(outdegree(ray.graph, vertex(0)) == 2);

    auto k4 = complete(4);
    for (std::size_t v = 0; v < 4; ++v)
        CHECK(outdegree(k4, vertex(v)) == 3);

    CHECK_THROWS_AS(outdegree(k4, vertex(4)), GraphError);
}

TEST_CASE("has_loop")
{
    CHECK(has_loop(make_graph(1, Pairs{{0, 0}})));
    for (std::size_t n = 3; n <= 12; ++n) {
        auto g = gadgets::build_ray(n).graph;
        bool scan = false;
        for (const auto& a : g.arrows())
            scan |= a.from == a.to;
        CHECK(!scan);
        CHECK(!has_loop(g));
    }
    std::vector<gadgets::LexPoint> pts{{"00", 0}, {"01", 0}, {"00", 1}, {"11", 2}};
    CHECK(!has_loop(gadgets::build_lex_order(pts).graph));
}

TEST_CASE("find_cycles")
{
    auto chain = make_graph(4, Pairs{{0, 1}, {1, 2}, {2, 3}});
    CHECK(find_cycles(chain, kUnbounded).empty());
    CHECK(is_acyclic(chain));

    auto c = find_cycles(make_graph(3, Pairs{{1, 2}, {2, 0}, {0, 1}}), 10);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == std::vector<VertexId>{vertex(0), vertex(1), vertex(2), vertex(0)});

    // Bounded search misses longer cycles.
    CHECK(find_cycles(cycle3(), 2).empty());

    // Two 2-cycles and a 3-cycle sharing vertex 0.
    auto g = make_graph(3, Pairs{{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}});
    auto all = find_cycles(g, kUnbounded);
    CHECK(all.size() == 3);
    for (const auto& cyc : all)
        CHECK(cyc.front() == cyc.back());

    CHECK(find_cycles(make_graph(1, Pairs{{0, 0}}), 1).size() == 1);
}

TEST_CASE("induced_subgraph")
{
    auto ray = gadgets::build_ray(9).graph;
    std::vector<VertexId> all;
    for (std::size_t v = 0; v < ray.size(); ++v)
        all.push_back(vertex(v));
    CHECK(testing::arrow_set(induced_subgraph(ray, all)) == testing::arrow_set(ray));
    CHECK(induced_subgraph(ray, {}).size() == 0);

    std::vector<VertexId> first6(all.begin(), all.begin() + 6);
    CHECK(io::content_hash(induced_subgraph(ray, first6)) == io::content_hash(gadgets::build_ray(6).graph));

    std::vector<VertexId> bad{vertex(42)};
    CHECK_THROWS_AS(induced_subgraph(ray, bad), GraphError);
}

TEST_CASE("is_homomorphism")
{
    auto c = cycle3();
    CHECK(is_homomorphism(VertexMap::identity(3), c, c));
    CHECK(!is_homomorphism(testing::to_map({0, 0, 0}), c, c));
    CHECK(is_homomorphism(rotation(), c, c));
    CHECK_THROWS_AS(is_homomorphism(testing::to_map({0, 1}), c, c), GraphError);
    CHECK_THROWS_AS(is_homomorphism(testing::to_map({0, 1, 5}), c, c), GraphError);

    // Into another graph: a path into a loop.
    auto loop = make_graph(1, Pairs{{0, 0}});
    CHECK(is_homomorphism(testing::to_map({0, 0, 0}), c, loop));
}

TEST_CASE("compose")
{
    auto r = rotation();
    CHECK(compose(VertexMap::identity(3), r) == r);
    CHECK(compose(r, VertexMap::identity(3)) == r);
    CHECK(compose(r, r) == testing::to_map({2, 0, 1}));
    CHECK_THROWS_AS(compose(r, VertexMap::identity(2)), GraphError);
}

TEST_CASE("property: endomorphisms are closed under composition; idempotent injective ones are the identity")
{
    std::mt19937_64 rng(7);
    for (int round = 0; round < 30; ++round) {
        auto g = testing::random_graph(rng, 1 + round % 5, 0.4, round % 3 == 0);
        auto endos = testing::brute_endos(g);
        std::set<std::vector<std::size_t>> set(endos.begin(), endos.end());
        for (const auto& a : endos)
            for (const auto& b : endos) {
                auto ab = compose(testing::to_map(a), testing::to_map(b));
                CHECK(is_homomorphism(ab, g, g));
                CHECK(set.count(testing::images({ab})[0]));
            }
        for (const auto& a : endos) {
            auto h = testing::to_map(a);
            const bool injective = std::set<std::size_t>(a.begin(), a.end()).size() == a.size();
            if (compose(h, h) == h && injective)
                CHECK(h.is_identity());
        }
    }
}

TEST_CASE("is_isomorphism")
{
    auto c = cycle3();
    CHECK(is_isomorphism(rotation(), c, c));
    auto path = make_graph(3, Pairs{{0, 1}, {1, 2}});
    // Bijective homomorphism whose inverse is not one.
    auto two = make_graph(2, Pairs{});
    auto arrow = make_graph(2, Pairs{{0, 1}});
    CHECK(is_homomorphism(VertexMap::identity(2), two, arrow));
    CHECK(!is_isomorphism(VertexMap::identity(2), two, arrow));
    CHECK(!is_isomorphism(testing::to_map({0, 0, 1}), path, path));
}

TEST_CASE("builder rejects duplicate roles and collapses duplicate arrows")
{
    DigraphBuilder b;
    auto x = b.add_vertex(VertexRole::n("{}"));
    auto y = b.add_vertex(VertexRole::nc("{}", 1));
    CHECK_THROWS_AS(b.add_vertex(VertexRole::n("{}")), GraphError);
    b.add_arrow(x, y);
    b.add_arrow(x, y);
    CHECK_THROWS_AS(b.add_arrow(x, vertex(9)), GraphError);
    auto g = std::move(b).build();
    CHECK(g.arrow_count() == 1);
    CHECK(g.find(VertexRole::nc("{}", 1)) == y);
    CHECK(!g.find(VertexRole::nc("{}", 2)));
    CHECK(g.out(x).size() == 1);
    CHECK(g.in(y).size() == 1);
}

TEST_CASE("role strings round trip through the tag table")
{
    for (auto tag : {RoleTag::Anchor, RoleTag::PathB, RoleTag::P, RoleTag::Q, RoleTag::W, RoleTag::E, RoleTag::N,
                     RoleTag::NC, RoleTag::Chain, RoleTag::ClassMember, RoleTag::Plain})
        CHECK(role_tag_from_string(to_string(tag)) == tag);
    CHECK(!role_tag_from_string("Bogus"));
    CHECK(VertexRole::nc("{}", 2).to_string() == "NC:2:{}");
}

TEST_CASE("adjacency lists agree with the arrow set")
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        auto g = testing::random_graph(rng, 6, 0.3, true);
        std::size_t outs = 0, ins = 0;
        for (std::size_t v = 0; v < g.size(); ++v) {
            for (auto w : g.out(vertex(v)))
                CHECK(g.has_arrow(vertex(v), w));
            for (auto w : g.in(vertex(v)))
                CHECK(g.has_arrow(w, vertex(v)));
            outs += g.out(vertex(v)).size();
            ins += g.in(vertex(v)).size();
        }
        CHECK(outs == g.arrow_count());
        CHECK(ins == g.arrow_count());
    }
}
