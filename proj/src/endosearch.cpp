#include "rigid/endosearch.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <mutex>
#include <thread>

namespace rigid::endo {

namespace {

using Word = std::uint64_t;
using Clock = std::chrono::steady_clock;

/// Flat n x words bitset matrix: row v is the candidate set of v.
class Domains {
public:
    Domains(std::size_t n, std::size_t words) : words_(words), bits_(n * words, 0) {}

    Word* row(std::size_t v) { return bits_.data() + v * words_; }
    const Word* row(std::size_t v) const { return bits_.data() + v * words_; }

    std::size_t count(std::size_t v) const
    {
        std::size_t c = 0;
        for (std::size_t w = 0; w < words_; ++w)
            c += static_cast<std::size_t>(std::popcount(row(v)[w]));
        return c;
    }

    bool test(std::size_t v, std::size_t a) const { return (row(v)[a / 64] >> (a % 64)) & 1U; }
    void reset(std::size_t v, std::size_t a) { row(v)[a / 64] &= ~(Word{1} << (a % 64)); }

    void assign(std::size_t v, std::size_t a)
    {
        std::fill(row(v), row(v) + words_, 0);
        row(v)[a / 64] |= Word{1} << (a % 64);
    }

    std::size_t first(std::size_t v) const
    {
        for (std::size_t w = 0; w < words_; ++w)
            if (row(v)[w])
                return w * 64 + static_cast<std::size_t>(std::countr_zero(row(v)[w]));
        return static_cast<std::size_t>(-1);
    }

    template <class F>
    void for_each(std::size_t v, F&& f) const
    {
        for (std::size_t w = 0; w < words_; ++w) {
            Word x = row(v)[w];
            while (x) {
                f(w * 64 + static_cast<std::size_t>(std::countr_zero(x)));
                x &= x - 1;
            }
        }
    }

    std::size_t words() const { return words_; }

private:
    std::size_t words_;
    std::vector<Word> bits_;
};

/// Immutable data shared by all workers.
struct Problem {
    const Digraph* g = nullptr;
    std::size_t n = 0;
    std::size_t words = 0;
    std::vector<Word> out_bits, in_bits;
    std::vector<char> adj;  // n x n arrow matrix
    std::vector<std::size_t> moving;  // vertices of which at least one must move
    std::vector<std::vector<std::size_t>> cliques;
    bool injective = false;
    bool propagate = true;
    Mode mode = Mode::EnumerateAll;
    const SearchConstraints* c = nullptr;

    const Word* out_row(std::size_t a) const { return out_bits.data() + a * words; }
    const Word* in_row(std::size_t a) const { return in_bits.data() + a * words; }
    bool arrow(std::size_t a, std::size_t b) const { return adj[a * n + b] != 0; }
};

/// Greedy cliques of the underlying undirected graph. In a loopless graph the
/// members of a clique need pairwise distinct images, so the union of their
/// domains must be at least as large as the clique.
std::vector<std::vector<std::size_t>> greedy_cliques(const Problem& p)
{
    const std::size_t n = p.n;
    std::vector<std::vector<Word>> nb(n, std::vector<Word>(p.words, 0));
    std::vector<std::size_t> deg(n, 0);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t w = 0; w < n; ++w)
            if (v != w && (p.arrow(v, w) || p.arrow(w, v))) {
                nb[v][w / 64] |= Word{1} << (w % 64);
                ++deg[v];
            }
    std::vector<std::vector<std::size_t>> found;
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> clique{s};
        std::vector<Word> cand = nb[s];
        for (;;) {
            std::size_t best = n;
            for (std::size_t w = 0; w < p.words; ++w) {
                Word x = cand[w];
                while (x) {
                    std::size_t v = w * 64 + static_cast<std::size_t>(std::countr_zero(x));
                    x &= x - 1;
                    if (best == n || deg[v] > deg[best])
                        best = v;
                }
            }
            if (best == n)
                break;
            clique.push_back(best);
            for (std::size_t w = 0; w < p.words; ++w)
                cand[w] &= nb[best][w];
        }
        if (clique.size() >= 3) {
            std::sort(clique.begin(), clique.end());
            found.push_back(std::move(clique));
        }
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() > b.size() : a < b;
    });
    found.erase(std::unique(found.begin(), found.end()), found.end());
    if (found.size() > 32)
        found.resize(32);
    return found;
}

struct Shared {
    std::atomic<std::uint64_t> nodes{0};
    std::atomic<bool> stop{false};
    std::atomic<bool> aborted{false};
    std::uint64_t max_nodes = 0;
    double max_seconds = 0;
    Clock::time_point start = Clock::now();

    bool over_budget()
    {
        if (aborted.load(std::memory_order_relaxed))
            return true;
        std::uint64_t k = nodes.fetch_add(1, std::memory_order_relaxed) + 1;
        bool over = max_nodes != 0 && k > max_nodes;
        if (!over && max_seconds > 0 && (k & 255U) == 0)
            over = std::chrono::duration<double>(Clock::now() - start).count() > max_seconds;
        if (over)
            aborted = true;
        return over;
    }
};

class Worker {
public:
    Worker(const Problem& p, Shared& s) : p_(p), s_(s) {}

    std::vector<VertexMap> solutions;
    std::uint64_t count = 0;
    std::uint64_t prunes = 0;

    /// Arc consistency from the queued vertices, then the global checks.
    bool propagate(Domains& d, std::vector<std::size_t> queue) const
    {
        if (!p_.propagate)
            return true;
        const std::size_t words = p_.words;
        std::vector<char> queued(p_.n, 0);
        for (auto v : queue)
            queued[v] = 1;
        std::vector<Word> u(words);
        auto narrow = [&](std::size_t v) -> bool {
            Word* r = d.row(v);
            bool changed = false, empty = true;
            for (std::size_t w = 0; w < words; ++w) {
                Word nv = r[w] & u[w];
                changed |= nv != r[w];
                r[w] = nv;
                empty &= nv == 0;
            }
            if (empty)
                return false;
            if (changed && !queued[v]) {
                queued[v] = 1;
                queue.push_back(v);
            }
            return true;
        };
        for (;;) {
            while (!queue.empty()) {
                const std::size_t x = queue.back();
                queue.pop_back();
                queued[x] = 0;
                const auto outs = p_.g->out(vertex(x));
                const auto ins = p_.g->in(vertex(x));
                if (!outs.empty()) {
                    std::fill(u.begin(), u.end(), 0);
                    d.for_each(x, [&](std::size_t a) {
                        const Word* o = p_.out_row(a);
                        for (std::size_t w = 0; w < words; ++w)
                            u[w] |= o[w];
                    });
                    for (auto v : outs)
                        if (!narrow(index(v)))
                            return false;
                }
                if (!ins.empty()) {
                    std::fill(u.begin(), u.end(), 0);
                    d.for_each(x, [&](std::size_t a) {
                        const Word* i = p_.in_row(a);
                        for (std::size_t w = 0; w < words; ++w)
                            u[w] |= i[w];
                    });
                    for (auto y : ins)
                        if (!narrow(index(y)))
                            return false;
                }
                if (p_.injective && d.count(x) == 1) {
                    const std::size_t a = d.first(x);
                    for (std::size_t v = 0; v < p_.n; ++v)
                        if (v != x && d.test(v, a)) {
                            d.reset(v, a);
                            if (d.count(v) == 0)
                                return false;
                            if (!queued[v]) {
                                queued[v] = 1;
                                queue.push_back(v);
                            }
                        }
                }
            }
            for (const auto& cl : p_.cliques) {
                std::fill(u.begin(), u.end(), 0);
                for (auto v : cl)
                    for (std::size_t w = 0; w < words; ++w)
                        u[w] |= d.row(v)[w];
                std::size_t total = 0;
                for (auto x : u)
                    total += static_cast<std::size_t>(std::popcount(x));
                if (total < cl.size())
                    return false;
            }
            // Difference constraint: some vertex of `moving` maps off itself.
            if (p_.moving.empty())
                return true;
            std::size_t open = 0, last = 0;
            bool satisfied = false;
            for (auto v : p_.moving) {
                if (!d.test(v, v)) {
                    satisfied = true;
                    break;
                }
                if (d.count(v) > 1) {
                    ++open;
                    last = v;
                }
            }
            if (satisfied)
                return true;
            if (open == 0)
                return false;
            if (open > 1)
                return true;
            d.reset(last, last);
            queued[last] = 1;
            queue.push_back(last);
        }
    }

    /// Without propagation: the new assignment x -> a must agree with assigned neighbours.
    bool consistent(const Domains& d, std::size_t x, std::size_t a) const
    {
        if (p_.arrow(x, x) && !p_.arrow(a, a))
            return false;
        for (auto v : p_.g->out(vertex(x))) {
            std::size_t vi = index(v);
            if (vi != x && d.count(vi) == 1 && !p_.arrow(a, d.first(vi)))
                return false;
        }
        for (auto y : p_.g->in(vertex(x))) {
            std::size_t yi = index(y);
            if (yi != x && d.count(yi) == 1 && !p_.arrow(d.first(yi), a))
                return false;
        }
        if (p_.injective)
            for (std::size_t v = 0; v < p_.n; ++v)
                if (v != x && d.count(v) == 1 && d.first(v) == a)
                    return false;
        return true;
    }

    std::optional<std::size_t> choose(const Domains& d) const
    {
        std::optional<std::size_t> best;
        std::size_t best_count = 0;
        for (std::size_t v = 0; v < p_.n; ++v) {
            std::size_t c = d.count(v);
            if (c > 1 && (!best || c < best_count)) {
                best = v;
                best_count = c;
            }
        }
        return best;
    }

    std::vector<std::size_t> values(const Domains& d, std::size_t x) const
    {
        std::vector<std::size_t> vals;
        d.for_each(x, [&](std::size_t a) { vals.push_back(a); });
        if (p_.mode == Mode::FindOne) {
            auto it = std::find(vals.begin(), vals.end(), x);
            if (it != vals.end())
                std::rotate(vals.begin(), it, it + 1);
        }
        return vals;
    }

    void leaf(const Domains& d)
    {
        std::vector<VertexId> images(p_.n);
        for (std::size_t v = 0; v < p_.n; ++v)
            images[v] = vertex(d.first(v));
        VertexMap h(std::move(images));
        // Re-check every solution against the definition.
        if (!satisfies_constraints(h, *p_.g, *p_.c))
            return;
        ++count;
        if (p_.mode != Mode::Count)
            solutions.push_back(std::move(h));
        if (p_.mode == Mode::FindOne)
            s_.stop = true;
    }

    void search(Domains& d)
    {
        if (s_.stop.load(std::memory_order_relaxed) || s_.over_budget())
            return;
        auto x = choose(d);
        if (!x) {
            leaf(d);
            return;
        }
        for (auto a : values(d, *x)) {
            if (s_.stop.load(std::memory_order_relaxed) || s_.aborted.load(std::memory_order_relaxed))
                return;
            branch(d, *x, a);
        }
    }

    void branch(const Domains& d, std::size_t x, std::size_t a)
    {
        if (!p_.propagate && !consistent(d, x, a)) {
            ++prunes;
            return;
        }
        Domains next = d;
        next.assign(x, a);
        if (!propagate(next, {x})) {
            ++prunes;
            return;
        }
        search(next);
    }

private:
    const Problem& p_;
    Shared& s_;
};

void validate(const Digraph& g, const SearchConstraints& c)
{
    auto check = [&](VertexId v) {
        if (!g.contains(v))
            throw ConstraintError("constraint names unknown vertex " + std::to_string(index(v)));
    };
    for (auto v : c.must_fix)
        check(v);
    for (auto v : c.must_move) {
        check(v);
        if (std::find(c.must_fix.begin(), c.must_fix.end(), v) != c.must_fix.end())
            throw ConstraintError("vertex " + std::to_string(index(v)) + " is both fixed and required to move");
    }
    for (auto [v, a] : c.forced) {
        check(v);
        check(a);
        if (a != v && std::find(c.must_fix.begin(), c.must_fix.end(), v) != c.must_fix.end())
            throw ConstraintError("forced image of fixed vertex " + std::to_string(index(v)));
    }
    for (const auto& part : c.closed_parts)
        for (auto v : part)
            check(v);
}

}  // namespace

bool satisfies_constraints(const VertexMap& h, const Digraph& g, const SearchConstraints& c)
{
    if (!is_homomorphism(h, g, g))
        return false;
    for (auto v : c.must_fix)
        if (h(v) != v)
            return false;
    for (auto [v, a] : c.forced)
        if (h(v) != a)
            return false;
    if (!c.must_move.empty() &&
        std::none_of(c.must_move.begin(), c.must_move.end(), [&](VertexId v) { return h(v) != v; }))
        return false;
    if (c.nontrivial_only && h.is_identity())
        return false;
    for (const auto& part : c.closed_parts) {
        std::vector<VertexId> sorted(part.begin(), part.end());
        std::sort(sorted.begin(), sorted.end());
        for (auto v : part)
            if (!std::binary_search(sorted.begin(), sorted.end(), h(v)))
                return false;
    }
    if (c.injective && !is_isomorphism(h, g, g))
        return false;
    return true;
}

SearchResult enumerate_endomorphisms(const Digraph& g, const SearchConstraints& c, const Budget& b)
{
    validate(g, c);
    Shared shared;
    shared.max_nodes = b.max_nodes;
    shared.max_seconds = b.max_seconds;

    Problem p;
    p.g = &g;
    p.n = g.size();
    p.words = (p.n + 63) / 64;
    p.injective = c.injective;
    p.propagate = b.propagate;
    p.mode = c.mode;
    p.c = &c;
    p.out_bits.assign(p.n * p.words, 0);
    p.in_bits.assign(p.n * p.words, 0);
    p.adj.assign(p.n * p.n, 0);
    for (const auto& a : g.arrows()) {
        std::size_t u = index(a.from), v = index(a.to);
        p.out_bits[u * p.words + v / 64] |= Word{1} << (v % 64);
        p.in_bits[v * p.words + u / 64] |= Word{1} << (u % 64);
        p.adj[u * p.n + v] = 1;
    }
    if (!c.must_move.empty()) {
        for (auto v : c.must_move)
            p.moving.push_back(index(v));
    } else if (c.nontrivial_only) {
        for (std::size_t v = 0; v < p.n; ++v)
            p.moving.push_back(v);
    }
    if (p.propagate && !has_loop(g))
        p.cliques = greedy_cliques(p);

    SearchResult result;
    auto finish = [&](std::vector<Worker>& workers) {
        for (auto& w : workers) {
            result.stats.solutions += w.count;
            result.stats.prunes += w.prunes;
            for (auto& h : w.solutions)
                result.maps.push_back(std::move(h));
        }
        std::sort(result.maps.begin(), result.maps.end());
        if (c.mode == Mode::FindOne && result.maps.size() > 1)
            result.maps.resize(1);
        result.stats.nodes = shared.nodes.load();
        result.stats.seconds = std::chrono::duration<double>(Clock::now() - shared.start).count();
        result.stats.exhausted = !shared.aborted.load() || (c.mode == Mode::FindOne && !result.maps.empty());
        return result;
    };

    if (p.n == 0) {
        std::vector<Worker> ws{Worker(p, shared)};
        Domains d(0, 0);
        ws[0].leaf(d);
        return finish(ws);
    }

    Domains root(p.n, p.words);
    std::vector<std::size_t> outdeg(p.n), indeg(p.n);
    for (std::size_t v = 0; v < p.n; ++v) {
        outdeg[v] = g.out(vertex(v)).size();
        indeg[v] = g.in(vertex(v)).size();
    }
    for (std::size_t v = 0; v < p.n; ++v)
        for (std::size_t a = 0; a < p.n; ++a) {
            if (p.arrow(v, v) && !p.arrow(a, a))
                continue;
            if (c.injective && (outdeg[a] != outdeg[v] || indeg[a] != indeg[v]))
                continue;
            root.row(v)[a / 64] |= Word{1} << (a % 64);
        }
    for (auto v : c.must_fix)
        root.assign(index(v), index(v));
    for (auto [v, a] : c.forced) {
        if (!root.test(index(v), index(a))) {
            std::vector<Worker> ws;
            result.stats.exhausted = true;
            return finish(ws);
        }
        root.assign(index(v), index(a));
    }
    for (const auto& part : c.closed_parts) {
        std::vector<Word> mask(p.words, 0);
        for (auto v : part)
            mask[index(v) / 64] |= Word{1} << (index(v) % 64);
        for (auto v : part)
            for (std::size_t w = 0; w < p.words; ++w)
                root.row(index(v))[w] &= mask[w];
    }

    std::vector<Worker> workers;
    workers.emplace_back(p, shared);
    bool empty_domain = false;
    for (std::size_t v = 0; v < p.n; ++v)
        empty_domain |= root.count(v) == 0;
    std::vector<std::size_t> all(p.n);
    for (std::size_t v = 0; v < p.n; ++v)
        all[v] = v;
    if (empty_domain || !workers[0].propagate(root, all)) {
        workers[0].prunes++;
        return finish(workers);
    }

    auto x = workers[0].choose(root);
    const unsigned threads = std::max(1U, b.threads);
    if (threads == 1 || !x) {
        workers[0].search(root);
        return finish(workers);
    }

    // Parallel split of the first branching variable; each worker owns its domains.
    shared.over_budget();
    const auto vals = workers[0].values(root, *x);
    std::atomic<std::size_t> next{0};
    for (unsigned t = 1; t < threads; ++t)
        workers.emplace_back(p, shared);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= vals.size() || shared.stop.load() || shared.aborted.load())
                    return;
                workers[t].branch(root, *x, vals[i]);
            }
        });
    for (auto& th : pool)
        th.join();
    return finish(workers);
}

FindResult find_nontrivial_endomorphism(const Digraph& g, const Budget& b)
{
    SearchConstraints c;
    c.mode = Mode::FindOne;
    c.nontrivial_only = true;
    auto r = enumerate_endomorphisms(g, c, b);
    FindResult out;
    out.stats = r.stats;
    if (!r.maps.empty()) {
        out.verdict = Verdict::Found;
        out.witness = std::move(r.maps.front());
    } else {
        out.verdict = r.stats.exhausted ? Verdict::None : Verdict::Inconclusive;
    }
    return out;
}

SearchResult enumerate_automorphisms(const Digraph& g, const Budget& b)
{
    SearchConstraints c;
    c.injective = true;
    return enumerate_endomorphisms(g, c, b);
}

std::vector<VertexMap> naive_oracle(const Digraph& g, const SearchConstraints& c, std::size_t cap)
{
    const std::size_t n = g.size();
    if (n > cap)
        throw std::length_error("oracle refuses " + std::to_string(n) + " vertices (cap " + std::to_string(cap) + ")");
    validate(g, c);
    std::vector<VertexMap> out;
    std::vector<std::size_t> digits(n, 0);
    std::vector<VertexId> images(n);
    const auto arrows = g.arrows();
    for (;;) {
        bool hom = true;
        for (const auto& a : arrows)
            if (!g.has_arrow(vertex(digits[index(a.from)]), vertex(digits[index(a.to)]))) {
                hom = false;
                break;
            }
        if (hom) {
            for (std::size_t v = 0; v < n; ++v)
                images[v] = vertex(digits[v]);
            VertexMap h(images);
            if (satisfies_constraints(h, g, c))
                out.push_back(std::move(h));
        }
        // Odometer with the last vertex as the fastest digit: lexicographic order.
        std::size_t pos = n;
        while (pos > 0 && ++digits[pos - 1] == n)
            digits[--pos] = 0;
        if (pos == 0)
            break;
    }
    if (c.mode == Mode::FindOne && out.size() > 1)
        out.resize(1);
    return out;
}

}  // namespace rigid::endo

namespace rigid::endo {

Digraph random_digraph(std::size_t n, double density, std::mt19937_64& rng, bool loops)
{
    // Plain 53-bit fractions keep the stream identical across standard libraries.
    auto coin = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 < density; };
    std::vector<std::pair<std::size_t, std::size_t>> arrows;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
            if ((u != v || loops) && coin())
                arrows.emplace_back(u, v);
    return make_graph(n, arrows);
}

DiffReport oracle_differential(const DiffConfig& cfg)
{
    if (cfg.max_vertices > kOracleCap)
        throw std::length_error("oracle differential is capped at " + std::to_string(kOracleCap) + " vertices");
    if (cfg.max_vertices == 0 || cfg.densities.empty())
        throw std::invalid_argument("oracle differential needs vertices and densities");
    std::mt19937_64 rng(cfg.seed);
    DiffReport rep;
    for (std::size_t i = 0; i < cfg.graphs; ++i) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng() % cfg.max_vertices);
        const double density = cfg.densities[i % cfg.densities.size()];
        const Digraph g = random_digraph(n, density, rng, (rng() & 3U) == 0);
        ++rep.graphs;

        SearchConstraints endo_c, auto_c;
        auto_c.injective = true;
        const auto want_endo = naive_oracle(g, endo_c);
        const auto want_auto = naive_oracle(g, auto_c);
        rep.endomorphisms += want_endo.size();
        rep.automorphisms += want_auto.size();

        Budget plain, unpropagated, parallel;
        unpropagated.propagate = false;
        parallel.threads = 2;
        bool endo_bad = false, auto_bad = false;
        for (const auto& b : {plain, unpropagated, parallel}) {
            endo_bad |= enumerate_endomorphisms(g, endo_c, b).maps != want_endo;
            auto_bad |= enumerate_endomorphisms(g, auto_c, b).maps != want_auto;
        }
        if (endo_bad || auto_bad) {
            rep.endo_mismatches += endo_bad;
            rep.auto_mismatches += auto_bad;
            rep.details.push_back("graph " + std::to_string(i) + " (n=" + std::to_string(n) + ", density " +
                                  std::to_string(density) + ")" + (endo_bad ? " endomorphisms" : "") +
                                  (auto_bad ? " automorphisms" : ""));
        }
    }
    return rep;
}

}  // namespace rigid::endo
