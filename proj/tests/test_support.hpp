#pragma once

// Independent helpers for tests. Nothing here calls the code under test
// except to read graphs.

#include <cstddef>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "rigid/digraph.hpp"

namespace testing {

using Arrows = std::set<std::pair<std::size_t, std::size_t>>;

inline Arrows arrow_set(const rigid::Digraph& g)
{
    Arrows s;
    for (const auto& a : g.arrows())
        s.emplace(rigid::index(a.from), rigid::index(a.to));
    return s;
}

inline bool preserves(const Arrows& arrows, const std::vector<std::size_t>& h)
{
    for (auto [u, v] : arrows)
        if (!arrows.count({h[u], h[v]}))
            return false;
    return true;
}

/// All endomorphisms by brute force over n^n maps, as image vectors in lexicographic order.
inline std::vector<std::vector<std::size_t>> brute_endos(const rigid::Digraph& g, bool bijective_only = false)
{
    const std::size_t n = g.size();
    const auto arrows = arrow_set(g);
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> h(n, 0);
    if (n == 0)
        return {{}};
    for (;;) {
        bool ok = preserves(arrows, h);
        // A bijective endomorphism of a finite graph maps the arrow set onto
        // itself, so bijectivity is all an automorphism needs on top.
        if (ok && bijective_only)
            ok = std::set<std::size_t>(h.begin(), h.end()).size() == n;
        if (ok)
            out.push_back(h);
        std::size_t pos = n;
        while (pos > 0 && ++h[pos - 1] == n)
            h[--pos] = 0;
        if (pos == 0)
            break;
    }
    return out;
}

inline std::vector<std::vector<std::size_t>> images(const std::vector<rigid::VertexMap>& maps)
{
    std::vector<std::vector<std::size_t>> out;
    for (const auto& m : maps) {
        std::vector<std::size_t> v;
        for (auto x : m.images())
            v.push_back(rigid::index(x));
        out.push_back(std::move(v));
    }
    return out;
}

inline rigid::Digraph random_graph(std::mt19937_64& rng, std::size_t n, double p, bool loops)
{
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<std::size_t, std::size_t>> arrows;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
            if ((u != v || loops) && coin(rng))
                arrows.emplace_back(u, v);
    return rigid::make_graph(n, arrows);
}

inline rigid::VertexMap to_map(const std::vector<std::size_t>& h)
{
    std::vector<rigid::VertexId> v;
    for (auto x : h)
        v.push_back(rigid::vertex(x));
    return rigid::VertexMap(v);
}

}  // namespace testing
