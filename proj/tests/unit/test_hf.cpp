#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "rigid/hf.hpp"

using namespace rigid::hf;

namespace {

/// Ackermann decoding: bit i of c set means the set with code i is a member.
HFSet decode(unsigned c)
{
    std::vector<HFSet> members;
    for (unsigned i = 0; i < 32; ++i)
        if ((c >> i) & 1U)
            members.push_back(decode(i));
    return HFSet::of(members);
}

const HFSet E;                         // {}
const HFSet one = HFSet::of({E});      // {{}}
const HFSet sing1 = HFSet::of({one});  // {{{}}}
const HFSet two = HFSet::of({E, one}); // {{},{{}}}

}  // namespace

TEST_CASE("codes agree with the decoding oracle")
{
    for (unsigned c = 0; c < 4096; ++c) {
        auto x = decode(c);
        CHECK(x.code() == Natural(c));
    }
    CHECK(E.code() == 0);
    CHECK(one.code() == 1);
    CHECK(sing1.code() == 2);
    CHECK(two.code() == 3);
}

TEST_CASE("canonical order is the code order")
{
    std::mt19937 rng(11);
    for (int i = 0; i < 2000; ++i) {
        unsigned a = rng() % 65536, b = rng() % 65536;
        auto x = decode(a), y = decode(b);
        CHECK(canonical_less(x, y) == (a < b));
        CHECK((x == y) == (a == b));
    }
    CHECK(canonical_less(E, one));
    CHECK(canonical_less(sing1, two));
    for (unsigned c = 0; c < 100; ++c)
        CHECK(!canonical_less(decode(c * 37 % 65536), decode(c * 37 % 65536)));
}

TEST_CASE("rank, cardinality, membership")
{
    CHECK(E.rank() == 0);
    CHECK(two.rank() == 2);
    CHECK(two.cardinality() == 2);
    CHECK(two.contains(one));
    CHECK(!one.contains(one));
    // Duplicates collapse.
    CHECK(HFSet::of({E, E, one}) == two);
}

TEST_CASE("codes above the materialization bound are refused but still ordered")
{
    HFSet x = E;
    for (int i = 0; i < 7; ++i)
        x = HFSet::of({x});
    CHECK(x.rank() == 7);
    CHECK_THROWS_AS(x.code(), std::domain_error);
    HFSet y = HFSet::of({x});
    CHECK(canonical_less(x, y));
    CHECK(canonical_less(decode(65535), x));
}

TEST_CASE("build_universe")
{
    CHECK(build_universe(0).elements.empty());
    auto v2 = build_universe(2);
    CHECK(v2.elements == std::vector<HFSet>{E, one});
    CHECK(build_universe(3).elements.size() == 4);
    auto v4 = build_universe(4);
    REQUIRE(v4.elements.size() == 16);
    for (unsigned c = 0; c < 16; ++c)
        CHECK(v4.elements[c] == decode(c));
    CHECK(v4.contains(decode(15)));
    CHECK(!v4.contains(decode(16)));
    CHECK_THROWS_AS(build_universe(6), std::out_of_range);
    CHECK_THROWS_AS(build_universe(3, 2), std::out_of_range);
}

TEST_CASE("property: universe levels double exponentially and are transitive")
{
    for (std::size_t n = 0; n < 5; ++n) {
        auto u = build_universe(n);
        auto next = build_universe(n + 1);
        CHECK(next.elements.size() == (std::size_t{1} << u.elements.size()));
        for (const auto& x : next.elements)
            for (const auto& y : x.members())
                CHECK(next.contains(y));
    }
}

TEST_CASE("rank_less and notin_rk")
{
    CHECK(rank_less(E, one));
    CHECK(!notin_rk(E, one));
    CHECK(!notin_rk(one, sing1));
    CHECK(notin_rk(E, sing1));
}

TEST_CASE("pairs and tuples")
{
    CHECK(pair(E, E) == HFSet::of({one}));
    CHECK(pair(E, one) == HFSet::of({one, two}));
    std::vector<HFSet> a{E}, b{E, E};
    CHECK(tuple(a) != tuple(b));
    CHECK(tuple(a).code() != tuple(b).code());
    CHECK_THROWS_AS(tuple(std::span<const HFSet>{}), std::invalid_argument);

    auto p = as_pair(pair(one, E));
    REQUIRE(p);
    CHECK(p->first == one);
    CHECK(p->second == E);
    CHECK(!as_pair(two));

    std::vector<HFSet> xs{one, E, two};
    CHECK(as_tuple(tuple(xs)) == xs);
    CHECK(ordinal(2) == two);
    CHECK(as_ordinal(ordinal(4)) == 4u);
    CHECK(!as_ordinal(sing1));
}

TEST_CASE("property: rank of a pair is two above its larger coordinate")
{
    auto v3 = build_universe(3);
    for (const auto& x : v3.elements)
        for (const auto& y : v3.elements)
            CHECK(pair(x, y).rank() == std::max(x.rank(), y.rank()) + 2);
}

TEST_CASE("brace notation round trip")
{
    for (unsigned c = 0; c < 300; ++c) {
        auto x = decode(c);
        CHECK(parse_set(x.to_string()) == x);
    }
    CHECK(parse_set(" { {} , { { } } } ") == two);
    CHECK_THROWS_AS(parse_set("{{}"), ParseError);
    CHECK_THROWS_AS(parse_set("{} {}"), ParseError);
}

TEST_CASE("build_closure_N examples")
{
    auto c0 = build_closure_N(build_universe(0), 1);
    CHECK(c0.elements == std::vector<HFSet>{E});

    auto u2 = build_universe(2);
    auto c2 = build_closure_N(u2, 2);
    CHECK(c2.contains(pair(E, one)));
    for (const auto& x : u2.elements)
        for (const auto& y : u2.elements)
            CHECK(c2.contains(pair(x, y)));
    CHECK(c2.contains(u2.as_set()));
    for (const auto& x : u2.elements)
        for (const auto& y : u2.elements) {
            std::vector<HFSet> t{x, y};
            CHECK(c2.contains(tuple(t)));
        }

    CHECK_THROWS_AS(build_closure_N(u2, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_closure_N(build_universe(3), 3, 10), std::length_error);
}

TEST_CASE("property: closures are transitive, well-founded, injectively coded and totally ordered")
{
    for (std::size_t level = 1; level <= 3; ++level) {
        auto c = build_closure_N(build_universe(level), 2);
        std::set<std::string> codes;
        for (const auto& x : c.elements) {
            for (const auto& y : x.members()) {
                CHECK(c.contains(y));
                // Membership strictly lowers rank, so the membership digraph has no cycles.
                CHECK(y.rank() < x.rank());
            }
            if (x.rank() <= kMaxCodeRank)
                codes.insert(x.code().str());
        }
        CHECK(codes.size() == c.elements.size());
        for (std::size_t i = 0; i < c.elements.size(); ++i) {
            CHECK(c.index_of(c.elements[i]) == i);
            for (std::size_t j = 0; j < c.elements.size(); ++j) {
                const auto& x = c.elements[i];
                const auto& y = c.elements[j];
                int rel = int(canonical_less(x, y)) + int(canonical_less(y, x)) + int(x == y);
                CHECK(rel == 1);
                if (notin_rk(x, y))
                    CHECK(!y.contains(x));
                if (rank_less(x, y))
                    CHECK((notin_rk(x, y) || y.contains(x)));
            }
        }
    }
}

TEST_CASE("hash is structural")
{
    CHECK(HFSet::of({one, E}).hash() == two.hash());
    CHECK(one.hash() != E.hash());
}
