#include "rigid/digraph.hpp"

#include <algorithm>
#include <array>
#include <functional>

namespace rigid {

namespace {

constexpr std::array<std::string_view, 11> kTagNames = {
    "Anchor", "PathB", "P", "Q", "W", "E", "N", "NC", "Chain", "ClassMember", "Plain",
};

std::string role_key(const VertexRole& r)
{
    return std::string(to_string(r.tag)) + ":" + r.payload;
}

}  // namespace

std::string_view to_string(RoleTag tag) { return kTagNames.at(static_cast<std::size_t>(tag)); }

std::optional<RoleTag> role_tag_from_string(std::string_view s)
{
    for (std::size_t i = 0; i < kTagNames.size(); ++i)
        if (kTagNames[i] == s)
            return static_cast<RoleTag>(i);
    return std::nullopt;
}

std::string VertexRole::to_string() const { return role_key(*this); }

void Digraph::check(VertexId v) const
{
    if (!contains(v))
        throw GraphError("unknown vertex id " + std::to_string(index(v)));
}

const VertexRole& Digraph::role(VertexId v) const
{
    check(v);
    return roles_[index(v)];
}

std::optional<VertexId> Digraph::find(const VertexRole& role) const
{
    auto it = by_role_.find(role_key(role));
    if (it == by_role_.end())
        return std::nullopt;
    return it->second;
}

std::span<const VertexId> Digraph::out(VertexId v) const
{
    check(v);
    return {out_.data() + out_offsets_[index(v)], out_offsets_[index(v) + 1] - out_offsets_[index(v)]};
}

std::span<const VertexId> Digraph::in(VertexId v) const
{
    check(v);
    return {in_.data() + in_offsets_[index(v)], in_offsets_[index(v) + 1] - in_offsets_[index(v)]};
}

bool Digraph::has_arrow(VertexId from, VertexId to) const
{
    auto o = out(from);
    return std::binary_search(o.begin(), o.end(), to);
}

VertexId DigraphBuilder::add_vertex(VertexRole role)
{
    auto key = role_key(role);
    VertexId id = vertex(roles_.size());
    if (!by_role_.emplace(std::move(key), id).second)
        throw GraphError("duplicate vertex role " + role.to_string());
    roles_.push_back(std::move(role));
    return id;
}

void DigraphBuilder::add_arrow(VertexId from, VertexId to)
{
    if (index(from) >= roles_.size() || index(to) >= roles_.size())
        throw GraphError("arrow endpoint out of range");
    arrows_.push_back({from, to});
}

std::optional<VertexId> DigraphBuilder::find(const VertexRole& role) const
{
    auto it = by_role_.find(role_key(role));
    if (it == by_role_.end())
        return std::nullopt;
    return it->second;
}

Digraph DigraphBuilder::build() &&
{
    Digraph g;
    const std::size_t n = roles_.size();
    std::sort(arrows_.begin(), arrows_.end());
    arrows_.erase(std::unique(arrows_.begin(), arrows_.end()), arrows_.end());

    g.out_offsets_.assign(n + 1, 0);
    g.in_offsets_.assign(n + 1, 0);
    for (const auto& a : arrows_) {
        ++g.out_offsets_[index(a.from) + 1];
        ++g.in_offsets_[index(a.to) + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
        g.out_offsets_[i + 1] += g.out_offsets_[i];
        g.in_offsets_[i + 1] += g.in_offsets_[i];
    }
    g.out_.resize(arrows_.size());
    g.in_.resize(arrows_.size());
    auto out_fill = g.out_offsets_;
    auto in_fill = g.in_offsets_;
    // arrows_ is sorted by (from, to), so out-lists come out sorted; in-lists are sorted by from as well.
    for (const auto& a : arrows_) {
        g.out_[out_fill[index(a.from)]++] = a.to;
        g.in_[in_fill[index(a.to)]++] = a.from;
    }
    g.roles_ = std::move(roles_);
    g.arrows_ = std::move(arrows_);
    g.by_role_ = std::move(by_role_);
    return g;
}

Digraph make_graph(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> arrows)
{
    DigraphBuilder b;
    for (std::size_t i = 0; i < n; ++i)
        b.add_vertex(VertexRole::plain(std::to_string(i)));
    for (auto [u, v] : arrows)
        b.add_arrow(vertex(u), vertex(v));
    return std::move(b).build();
}

VertexMap VertexMap::identity(std::size_t n)
{
    std::vector<VertexId> images(n);
    for (std::size_t i = 0; i < n; ++i)
        images[i] = vertex(i);
    return VertexMap(std::move(images));
}

bool VertexMap::is_identity() const
{
    for (std::size_t i = 0; i < images_.size(); ++i)
        if (index(images_[i]) != i)
            return false;
    return true;
}

std::string to_string(const VertexMap& h)
{
    std::string out = "[";
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (i)
            out += ',';
        out += std::to_string(index(h.images()[i]));
    }
    return out + "]";
}

std::size_t outdegree(const Digraph& g, VertexId v) { return g.out(v).size(); }
std::size_t indegree(const Digraph& g, VertexId v) { return g.in(v).size(); }

bool has_loop(const Digraph& g)
{
    return std::any_of(g.arrows().begin(), g.arrows().end(), [](const Arrow& a) { return a.from == a.to; });
}

namespace {

/// Tarjan SCC, iterative. Returns component index per vertex.
std::vector<std::size_t> strongly_connected_components(const Digraph& g)
{
    const std::size_t n = g.size();
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> idx(n, kNone), low(n, 0), comp(n, kNone);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0, components = 0;

    struct Frame {
        std::size_t v;
        std::size_t next;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (idx[root] != kNone)
            continue;
        std::vector<Frame> call{{root, 0}};
        idx[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& f = call.back();
            auto outs = g.out(vertex(f.v));
            if (f.next < outs.size()) {
                std::size_t w = index(outs[f.next++]);
                if (idx[w] == kNone) {
                    idx[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], idx[w]);
                }
                continue;
            }
            std::size_t v = f.v;
            call.pop_back();
            if (!call.empty())
                low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == idx[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = components;
                } while (w != v);
                ++components;
            }
        }
    }
    return comp;
}

}  // namespace

std::vector<std::vector<VertexId>> find_cycles(const Digraph& g, std::size_t max_len)
{
    if (max_len == 0)
        throw GraphError("max_len must be at least 1");
    std::vector<std::vector<VertexId>> cycles;
    const auto comp = strongly_connected_components(g);

    // Loops are 1-cycles and sit in singleton components.
    for (const auto& a : g.arrows())
        if (a.from == a.to)
            cycles.push_back({a.from, a.from});

    std::vector<std::size_t> comp_size(g.size() + 1, 0);
    for (auto c : comp)
        ++comp_size[c];

    std::vector<bool> on_path(g.size(), false);
    std::vector<VertexId> path;
    // Cycles are reported once, from their smallest vertex s; only vertices > s in s's component are visited.
    std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t s, std::size_t v) {
        for (auto w_id : g.out(vertex(v))) {
            std::size_t w = index(w_id);
            if (comp[w] != comp[s])
                continue;
            if (w == s) {
                if (path.size() >= 2) {
                    auto cyc = path;
                    cyc.push_back(vertex(s));
                    cycles.push_back(std::move(cyc));
                }
                continue;
            }
            if (w < s || on_path[w] || path.size() >= max_len)
                continue;
            on_path[w] = true;
            path.push_back(w_id);
            dfs(s, w);
            path.pop_back();
            on_path[w] = false;
        }
    };
    for (std::size_t s = 0; s < g.size(); ++s) {
        if (comp_size[comp[s]] < 2)
            continue;
        path.assign(1, vertex(s));
        on_path[s] = true;
        dfs(s, s);
        on_path[s] = false;
    }
    std::sort(cycles.begin(), cycles.end());
    return cycles;
}

bool is_acyclic(const Digraph& g)
{
    // Kahn's algorithm.
    std::vector<std::size_t> indeg(g.size());
    for (std::size_t v = 0; v < g.size(); ++v)
        indeg[v] = g.in(vertex(v)).size();
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < g.size(); ++v)
        if (indeg[v] == 0)
            ready.push_back(v);
    std::size_t seen = 0;
    while (!ready.empty()) {
        auto v = ready.back();
        ready.pop_back();
        ++seen;
        for (auto w : g.out(vertex(v)))
            if (--indeg[index(w)] == 0)
                ready.push_back(index(w));
    }
    return seen == g.size();
}

Digraph induced_subgraph(const Digraph& g, std::span<const VertexId> keep)
{
    constexpr std::size_t kDropped = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> renumber(g.size(), kDropped);
    std::vector<VertexId> sorted(keep.begin(), keep.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    DigraphBuilder b;
    for (auto v : sorted) {
        const auto& role = g.role(v);  // validates the id
        renumber[index(v)] = index(b.add_vertex(role));
    }
    for (const auto& a : g.arrows()) {
        auto f = renumber[index(a.from)];
        auto t = renumber[index(a.to)];
        if (f != kDropped && t != kDropped)
            b.add_arrow(vertex(f), vertex(t));
    }
    return std::move(b).build();
}

Digraph without_arrows(const Digraph& g, std::span<const Arrow> removed)
{
    std::vector<Arrow> drop(removed.begin(), removed.end());
    std::sort(drop.begin(), drop.end());
    DigraphBuilder b;
    for (const auto& r : g.roles())
        b.add_vertex(r);
    for (const auto& a : g.arrows())
        if (!std::binary_search(drop.begin(), drop.end(), a))
            b.add_arrow(a.from, a.to);
    return std::move(b).build();
}

bool is_homomorphism(const VertexMap& h, const Digraph& g1, const Digraph& g2)
{
    if (h.size() != g1.size())
        throw GraphError("map is not total on the source graph (" + std::to_string(h.size()) + " of " +
                         std::to_string(g1.size()) + " vertices)");
    for (auto img : h.images())
        if (!g2.contains(img))
            throw GraphError("map image " + std::to_string(index(img)) + " outside the target graph");
    for (const auto& a : g1.arrows())
        if (!g2.has_arrow(h(a.from), h(a.to)))
            return false;
    return true;
}

VertexMap compose(const VertexMap& first, const VertexMap& second)
{
    if (first.size() != second.size())
        throw GraphError("cannot compose maps on domains of different size");
    std::vector<VertexId> images(first.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        auto mid = first.images()[i];
        if (index(mid) >= second.size())
            throw GraphError("composition leaves the domain of the second map");
        images[i] = second(mid);
    }
    return VertexMap(std::move(images));
}

bool is_isomorphism(const VertexMap& h, const Digraph& g1, const Digraph& g2)
{
    if (g1.size() != g2.size() || !is_homomorphism(h, g1, g2))
        return false;
    std::vector<VertexId> inverse(g2.size(), vertex(g2.size()));
    for (std::size_t i = 0; i < h.size(); ++i) {
        auto img = index(h.images()[i]);
        if (index(inverse[img]) != g2.size())
            return false;
        inverse[img] = vertex(i);
    }
    return is_homomorphism(VertexMap(std::move(inverse)), g2, g1);
}

}  // namespace rigid
