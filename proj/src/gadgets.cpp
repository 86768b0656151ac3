#include "rigid/gadgets.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "rigid/interchange.hpp"

namespace rigid::gadgets {

std::span<const VertexId> GadgetGraph::part(const std::string& name) const
{
    auto it = parts.find(name);
    if (it == parts.end())
        return {};
    return it->second;
}

bool GadgetGraph::in_base(const hf::HFSet& x) const
{
    // V_n is exactly the sets of rank < n.
    return x.rank() < level;
}

namespace {

class Assembler {
public:
    VertexId add(VertexRole role, std::initializer_list<std::string> part_names)
    {
        VertexId v = b_.add_vertex(std::move(role));
        for (const auto& p : part_names)
            parts_[p].push_back(v);
        return v;
    }

    void add_to_part(const std::string& name, VertexId v) { parts_[name].push_back(v); }

    void arrow(VertexId from, VertexId to) { b_.add_arrow(from, to); }

    /// Path root -> name/1 -> ... -> terminal with `length` arrows.
    VertexId tag(VertexId root, const std::string& name, VertexRole terminal, std::size_t length,
                 const std::string& family)
    {
        VertexId prev = root;
        for (std::size_t d = 1; d < length; ++d) {
            VertexId v = add(VertexRole::path(name, d), {"B", d == 1 ? "B-C" : "C"});
            arrow(prev, v);
            prev = v;
        }
        VertexId t = add(std::move(terminal), {"B", length == 1 ? "B-C" : "C", family});
        arrow(prev, t);
        tag_lengths_[name] = length;
        terminals_.push_back(t);
        return t;
    }

    void mark_terminals(VertexId marker)
    {
        for (auto t : terminals_)
            arrow(marker, t);
    }

    std::size_t size() const { return b_.size(); }

    GadgetGraph finish(std::string kind)
    {
        GadgetGraph g;
        g.kind = std::move(kind);
        g.graph = std::move(b_).build();
        for (auto& [name, vs] : parts_) {
            std::sort(vs.begin(), vs.end());
            vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        }
        g.parts = std::move(parts_);
        g.tag_lengths = std::move(tag_lengths_);
        return g;
    }

private:
    DigraphBuilder b_;
    std::map<std::string, std::vector<VertexId>> parts_;
    std::map<std::string, std::size_t> tag_lengths_;
    std::vector<VertexId> terminals_;
};

std::array<VertexId, 4> add_anchor(Assembler& a)
{
    std::array<VertexId, 4> u{};
    for (std::size_t i = 0; i < 4; ++i)
        u[i] = a.add(VertexRole::anchor(i), {"A"});
    a.arrow(u[0], u[1]);
    a.arrow(u[1], u[2]);
    a.arrow(u[2], u[0]);
    a.arrow(u[1], u[3]);
    a.arrow(u[2], u[3]);
    return u;
}

std::size_t p_length(std::size_t n) { return 2 * n + 2; }
std::size_t q_length(std::size_t k) { return 2 * k + 3; }

/// First free length after the p/q families.
std::size_t extras_start(std::size_t p_count, std::size_t q_count)
{
    std::size_t m = 1;
    if (p_count > 0)
        m = std::max(m, p_length(p_count - 1));
    if (q_count > 0)
        m = std::max(m, q_length(q_count - 1));
    return m + 1;
}

bool is_binary(std::string_view s)
{
    return std::all_of(s.begin(), s.end(), [](char c) { return c == '0' || c == '1'; });
}

/// Shared data of the satisfaction gadgets (ordinal case and Berkeley).
struct SatisfactionPlan {
    hf::ClosureN n;
    std::size_t max_card = 0;
    /// (catalog index, N index) for every G5 arrow q_k -> x^c.
    std::vector<std::pair<std::size_t, std::size_t>> q_arrows;
    std::size_t tag_vertices = 0;
};

SatisfactionPlan plan_satisfaction(const hf::Universe& u, const folog::Catalog& catalog, std::size_t arity_bound,
                                   const SatisfactionOptions& opt)
{
    SatisfactionPlan plan;
    plan.n = hf::build_closure_N(u, arity_bound, opt.closure_budget);
    for (const auto& x : plan.n.elements)
        plan.max_card = std::max(plan.max_card, x.cardinality());
    for (const auto& e : catalog)
        if (e.formula.arity() > arity_bound)
            throw std::invalid_argument("catalog entry " + e.name + " exceeds the arity bound");

    const auto m = folog::FOStructure::membership(u.elements);
    auto base_index = [&](const hf::HFSet& x) -> std::optional<std::size_t> {
        auto it = std::lower_bound(u.elements.begin(), u.elements.end(), x);
        if (it == u.elements.end() || *it != x)
            return std::nullopt;
        return static_cast<std::size_t>(it - u.elements.begin());
    };
    for (const auto& e : catalog) {
        folog::Evaluator ev(m, e.formula);
        const std::size_t arity = e.formula.arity();
        for (std::size_t i = 0; i < plan.n.elements.size(); ++i) {
            const auto& x = plan.n.elements[i];
            std::vector<std::size_t> args;
            if (arity == 1) {
                auto k = base_index(x);
                if (!k)
                    continue;
                args.push_back(*k);
            } else {
                auto t = hf::as_tuple(x);
                if (!t || t->size() != arity)
                    continue;
                for (const auto& c : *t) {
                    auto k = base_index(c);
                    if (!k)
                        break;
                    args.push_back(*k);
                }
                if (args.size() != arity)
                    continue;
            }
            if (ev(args))
                plan.q_arrows.emplace_back(e.index, i);
        }
    }

    std::size_t tags = 0;
    for (std::size_t p = 0; p <= plan.max_card; ++p)
        tags += p_length(p);
    for (std::size_t k = 0; k < catalog.size(); ++k)
        tags += q_length(k);
    const std::size_t start = extras_start(plan.max_card + 1, catalog.size());
    tags += start + (start + 1);  // w0, w1
    plan.tag_vertices = tags;
    return plan;
}

/// Tags p, q, w0, w1 from root, then N and N^c with G1, G2, G4, G5. G3 is left to the caller.
void add_satisfaction_body(Assembler& a, VertexId root, const SatisfactionPlan& plan, const folog::Catalog& catalog,
                           std::vector<VertexId>& nv, std::vector<VertexId>& ncv)
{
    std::vector<VertexId> p, q;
    for (std::size_t n = 0; n <= plan.max_card; ++n)
        p.push_back(a.tag(root, "p" + std::to_string(n), VertexRole::p(n), p_length(n), "P"));
    for (std::size_t k = 0; k < catalog.size(); ++k)
        q.push_back(a.tag(root, "q" + std::to_string(k), VertexRole::q(k), q_length(k), "Q"));
    const std::size_t start = extras_start(plan.max_card + 1, catalog.size());
    VertexId w0 = a.tag(root, "w0", VertexRole::w(0), start, "W");
    VertexId w1 = a.tag(root, "w1", VertexRole::w(1), start + 1, "W");

    const auto& elems = plan.n.elements;
    for (const auto& x : elems)
        nv.push_back(a.add(VertexRole::n(x.to_string()), {"N"}));
    for (const auto& x : elems)
        ncv.push_back(a.add(VertexRole::nc(x.to_string(), 1), {"NC"}));

    for (std::size_t i = 0; i < elems.size(); ++i) {
        a.arrow(w0, nv[i]);
        a.arrow(nv[i], ncv[i]);
        a.arrow(w1, ncv[i]);
        for (const auto& m : elems[i].members())
            a.arrow(nv[*plan.n.index_of(m)], nv[i]);
        a.arrow(p[elems[i].cardinality()], ncv[i]);
    }
    for (auto [k, i] : plan.q_arrows)
        a.arrow(q[k], ncv[i]);
}

void fill_satisfaction_meta(GadgetGraph& g, const hf::Universe& u, const folog::Catalog& catalog,
                            std::size_t arity_bound, const SatisfactionPlan& plan, const std::vector<VertexId>& nv,
                            const std::vector<VertexId>& ncv)
{
    g.level = u.level;
    g.arity = arity_bound;
    g.catalog = catalog;
    for (std::size_t i = 0; i < plan.n.elements.size(); ++i) {
        Cell c;
        c.set = plan.n.elements[i];
        c.copies[0] = {nv[i]};
        c.copies[1] = {ncv[i]};
        g.cells.push_back(std::move(c));
    }
}

}  // namespace

GadgetGraph build_ray(std::size_t n)
{
    if (n < 3)
        throw std::invalid_argument("ray gadget needs at least 3 vertices");
    Assembler a;
    std::vector<VertexId> u;
    for (std::size_t i = 0; i < n; ++i)
        u.push_back(a.add(VertexRole::anchor(i), {"A"}));
    a.arrow(u[0], u[1]);
    a.arrow(u[0], u[2]);
    a.arrow(u[1], u[2]);
    for (std::size_t i = 2; i + 1 < n; ++i)
        a.arrow(u[i], u[i + 1]);
    return a.finish("ray");
}

GadgetGraph build_lex_order(std::span<const LexPoint> points)
{
    std::vector<LexPoint> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](const LexPoint& x, const LexPoint& y) {
        return std::tie(x.ordinal, x.real) < std::tie(y.ordinal, y.real);
    });
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i] == pts[i - 1])
            throw std::invalid_argument("duplicate point (" + pts[i].real + "," + std::to_string(pts[i].ordinal) + ")");
    Assembler a;
    std::vector<VertexId> v;
    for (const auto& p : pts)
        v.push_back(a.add(VertexRole::plain("(" + p.real + "," + std::to_string(p.ordinal) + ")"), {"K"}));
    // Sorted order is the lexicographic relation itself.
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            a.arrow(v[i], v[j]);
    return a.finish("lex");
}

PrefixFamily build_prefix_family(std::size_t depth)
{
    if (depth == 0)
        throw std::invalid_argument("prefix depth must be at least 1");
    if (depth > 16)
        throw std::out_of_range("prefix depth above 16");
    PrefixFamily f;
    f.depth = depth;
    f.strings.push_back("");
    std::size_t level_begin = 0;
    for (std::size_t len = 1; len <= depth; ++len) {
        const std::size_t level_end = f.strings.size();
        for (std::size_t i = level_begin; i < level_end; ++i)
            for (char b : {'0', '1'}) {
                f.tree.emplace_back(i, f.strings.size());
                f.strings.push_back(f.strings[i] + b);
            }
        level_begin = level_end;
    }
    return f;
}

namespace {

/// e_s tags from root at lengths start, start+step, ...; tree arrows among them.
std::vector<VertexId> add_prefix_tags(Assembler& a, VertexId root, const PrefixFamily& f, std::size_t& next,
                                      std::size_t step)
{
    std::vector<VertexId> e;
    for (const auto& s : f.strings) {
        e.push_back(a.tag(root, "e" + s, VertexRole::e(s), next, "E"));
        next += step;
    }
    for (auto [parent, child] : f.tree)
        a.arrow(e[parent], e[child]);
    return e;
}

}  // namespace

GadgetGraph build_finite_kappa(const std::vector<std::vector<std::string>>& k_parts, std::size_t label_length,
                               const FiniteKappaOptions& opt)
{
    if (k_parts.empty())
        throw std::invalid_argument("finite-kappa gadget needs at least one part");
    for (std::size_t i = 0; i < k_parts.size(); ++i) {
        if (k_parts[i].empty())
            throw std::invalid_argument("part K" + std::to_string(i) + " is empty");
        std::set<std::string> seen;
        for (const auto& r : k_parts[i]) {
            if (r.size() != label_length || !is_binary(r))
                throw std::invalid_argument("label '" + r + "' is not a binary string of length " +
                                            std::to_string(label_length));
            if (!seen.insert(r).second)
                throw std::invalid_argument("duplicate label '" + r + "' in part K" + std::to_string(i));
        }
    }

    Assembler a;
    auto u = add_anchor(a);
    std::optional<PrefixFamily> fam;
    if (opt.with_prefix)
        fam = build_prefix_family(label_length);
    // Descending the e-tree from a terminal adds at most `depth` to a walk, so
    // spacing the extra tags by depth+1 keeps every terminal at a unique distance.
    const std::size_t step = fam ? fam->depth + 1 : 1;
    std::size_t next = extras_start(0, 0);
    // The pad holds exactly h_size vertices and sits below every other tag length.
    if (opt.h_size > 0) {
        a.tag(u[3], "h", VertexRole::path("h", opt.h_size), opt.h_size, "H");
        next = std::max(next, opt.h_size + 1);
    }

    std::vector<VertexId> w;
    for (std::size_t i = 0; i < k_parts.size(); ++i) {
        w.push_back(a.tag(u[3], "w" + std::to_string(i), VertexRole::w(i), next, "W"));
        next += step;
    }
    std::vector<VertexId> e;
    if (fam)
        e = add_prefix_tags(a, u[3], *fam, next, step);
    a.mark_terminals(u[0]);

    for (std::size_t i = 0; i < k_parts.size(); ++i) {
        auto labels = k_parts[i];
        std::sort(labels.begin(), labels.end());
        const std::string part = "K" + std::to_string(i);
        for (const auto& r : labels) {
            VertexId k = a.add(VertexRole::member(part, r), {"K", part});
            a.arrow(w[i], k);
            if (fam)
                for (std::size_t s = 0; s < fam->strings.size(); ++s)
                    if (PrefixFamily::tags(fam->strings[s], r))
                        a.arrow(e[s], k);
        }
    }
    auto g = a.finish("finite-kappa");
    // H is everything outside K: anchor, tags and the pad.
    std::vector<VertexId> h;
    for (std::size_t i = 0; i < g.graph.size(); ++i)
        if (g.graph.role(vertex(i)).tag != RoleTag::ClassMember)
            h.push_back(vertex(i));
    g.parts["H"] = std::move(h);
    g.tag_root = u[3];
    g.marker = u[0];
    return g;
}

GadgetGraph build_anchor()
{
    Assembler a;
    add_anchor(a);
    return a.finish("anchor");
}

GadgetGraph build_B_tags(std::size_t p_count, std::size_t q_count)
{
    Assembler a;
    auto u = add_anchor(a);
    for (std::size_t n = 0; n < p_count; ++n)
        a.tag(u[3], "p" + std::to_string(n), VertexRole::p(n), p_length(n), "P");
    for (std::size_t k = 0; k < q_count; ++k)
        a.tag(u[3], "q" + std::to_string(k), VertexRole::q(k), q_length(k), "Q");
    a.mark_terminals(u[0]);
    auto g = a.finish("anchor-tags");
    g.tag_root = u[3];
    g.marker = u[0];
    return g;
}

GadgetGraph build_ordinal_case(const hf::Universe& u, const folog::Catalog& catalog, std::size_t arity_bound,
                               const SatisfactionOptions& opt)
{
    auto plan = plan_satisfaction(u, catalog, arity_bound, opt);
    const std::size_t total = 4 + plan.tag_vertices + 2 * plan.n.elements.size();
    if (total > opt.vertex_budget)
        throw BudgetError("ordinal-case gadget needs " + std::to_string(total) + " vertices, budget is " +
                          std::to_string(opt.vertex_budget));

    Assembler a;
    auto anchor = add_anchor(a);
    std::vector<VertexId> nv, ncv;
    add_satisfaction_body(a, anchor[3], plan, catalog, nv, ncv);
    a.mark_terminals(anchor[0]);
    const auto& elems = plan.n.elements;
    // G3: elements are stored in code order, so i < j is the canonical order.
    for (std::size_t i = 0; i < elems.size(); ++i)
        for (std::size_t j = i + 1; j < elems.size(); ++j)
            a.arrow(ncv[i], ncv[j]);

    auto g = a.finish("ordinal-case");
    fill_satisfaction_meta(g, u, catalog, arity_bound, plan, nv, ncv);
    g.tag_root = anchor[3];
    g.marker = anchor[0];
    return g;
}

BlowupSpec singleton_spec(const GadgetGraph& base, std::size_t depth)
{
    BlowupSpec spec;
    spec.depth = depth;
    spec.labels.resize(base.graph.size());
    for (std::size_t i = 0; i < base.graph.size(); ++i) {
        auto tag = base.graph.role(vertex(i)).tag;
        if (tag == RoleTag::N || tag == RoleTag::NC)
            spec.labels[i] = {std::string(depth, '0')};
    }
    return spec;
}

GadgetGraph blow_up(const GadgetGraph& base, const BlowupSpec& spec)
{
    if (!base.tag_root || !base.marker)
        throw std::invalid_argument("blow-up base has no tag root");
    if (spec.labels.size() != base.graph.size())
        throw std::invalid_argument("blow-up spec must list labels for every base vertex");
    auto fam = build_prefix_family(spec.depth);

    std::vector<std::vector<std::string>> labels(base.graph.size());
    for (std::size_t i = 0; i < base.graph.size(); ++i) {
        const auto& role = base.graph.role(vertex(i));
        const bool is_class = role.tag == RoleTag::N || role.tag == RoleTag::NC;
        const auto& ls = spec.labels[i];
        if (is_class && ls.empty())
            throw std::invalid_argument("missing labels for " + role.to_string());
        if (!is_class && !ls.empty())
            throw std::invalid_argument("labels given for non-class vertex " + role.to_string());
        labels[i] = ls;
        std::sort(labels[i].begin(), labels[i].end());
        if (std::adjacent_find(labels[i].begin(), labels[i].end()) != labels[i].end())
            throw std::invalid_argument("duplicate label in class " + role.to_string());
        for (const auto& r : labels[i])
            if (r.size() != spec.depth || !is_binary(r))
                throw std::invalid_argument("label '" + r + "' is not a binary string of length " +
                                            std::to_string(spec.depth));
    }

    std::map<VertexId, std::vector<std::string>> part_names;
    for (const auto& [name, vs] : base.parts)
        for (auto v : vs)
            part_names[v].push_back(name);

    Assembler a;
    std::vector<std::vector<VertexId>> expand(base.graph.size());
    for (std::size_t i = 0; i < base.graph.size(); ++i) {
        const auto& role = base.graph.role(vertex(i));
        auto names = part_names[vertex(i)];
        auto add_with_parts = [&](VertexRole r) {
            VertexId v = a.add(std::move(r), {});
            for (const auto& n : names)
                a.add_to_part(n, v);
            return v;
        };
        if (labels[i].empty())
            expand[i].push_back(add_with_parts(role));
        else
            for (const auto& r : labels[i])
                expand[i].push_back(add_with_parts(VertexRole::member(role.to_string(), r)));
    }
    for (const auto& arr : base.graph.arrows())
        for (auto x : expand[index(arr.from)])
            for (auto y : expand[index(arr.to)])
                a.arrow(x, y);

    std::size_t next = 1;
    for (const auto& [name, len] : base.tag_lengths)
        next = std::max(next, len + 1);
    const VertexId root = expand[index(*base.tag_root)].front();
    const VertexId marker = expand[index(*base.marker)].front();
    auto e = add_prefix_tags(a, root, fam, next, fam.depth + 1);
    for (auto v : e)
        a.arrow(marker, v);
    for (std::size_t i = 0; i < base.graph.size(); ++i)
        for (std::size_t k = 0; k < labels[i].size(); ++k)
            for (std::size_t s = 0; s < fam.strings.size(); ++s)
                if (PrefixFamily::tags(fam.strings[s], labels[i][k]))
                    a.arrow(e[s], expand[i][k]);

    auto g = a.finish("blowup");
    for (const auto& [name, len] : base.tag_lengths)
        g.tag_lengths[name] = len;
    g.level = base.level;
    g.arity = base.arity;
    g.catalog = base.catalog;
    g.tag_root = root;
    g.marker = marker;
    for (const auto& c : base.cells) {
        Cell nc;
        nc.set = c.set;
        for (std::size_t k = 0; k < 3; ++k)
            for (auto v : c.copies[k])
                for (auto x : expand[index(v)])
                    nc.copies[k].push_back(x);
        g.cells.push_back(std::move(nc));
    }
    return g;
}

GadgetGraph strip_prefix_arrows(const GadgetGraph& g)
{
    std::vector<Arrow> removed;
    for (const auto& a : g.graph.arrows())
        if (g.graph.role(a.from).tag == RoleTag::E && g.graph.role(a.to).tag == RoleTag::ClassMember)
            removed.push_back(a);
    GadgetGraph out = g;
    out.graph = without_arrows(g.graph, removed);
    out.kind = g.kind + "-stripped";
    return out;
}

std::size_t berkeley_non_chain_count(const hf::Universe& u, const folog::Catalog& catalog, std::size_t arity_bound,
                                     const SatisfactionOptions& opt)
{
    auto plan = plan_satisfaction(u, catalog, arity_bound, opt);
    return plan.tag_vertices + 2 * plan.n.elements.size();
}

GadgetGraph build_berkeley(const hf::Universe& u, const folog::Catalog& catalog, std::size_t arity_bound,
                           std::size_t chain_len, const BerkeleyOptions& opt)
{
    auto plan = plan_satisfaction(u, catalog, arity_bound, opt.sat);
    const std::size_t rest = plan.tag_vertices + 2 * plan.n.elements.size();
    if (chain_len == 0)
        chain_len = rest + 1;
    if (chain_len <= rest)
        throw std::invalid_argument("chain length " + std::to_string(chain_len) +
                                    " does not exceed the " + std::to_string(rest) + " vertices outside the chain");
    if (chain_len + rest > opt.sat.vertex_budget)
        throw BudgetError("berkeley gadget needs " + std::to_string(chain_len + rest) + " vertices, budget is " +
                          std::to_string(opt.sat.vertex_budget));

    Assembler a;
    std::vector<VertexId> chain;
    for (std::size_t i = 0; i < chain_len; ++i)
        chain.push_back(a.add(VertexRole::chain(i), {"A", "chain"}));
    for (std::size_t i = 0; i < chain_len; ++i)
        for (std::size_t j = i + 1; j < chain_len; ++j)
            a.arrow(chain[i], chain[j]);
    const VertexId top = chain.back();

    std::vector<VertexId> nv, ncv;
    add_satisfaction_body(a, top, plan, catalog, nv, ncv);
    a.mark_terminals(top);
    for (std::size_t i = 0; i < ncv.size(); ++i)
        for (std::size_t j = 0; j < ncv.size(); ++j)
            if (i != j)
                a.arrow(ncv[i], ncv[j]);

    auto g = a.finish("berkeley");
    fill_satisfaction_meta(g, u, catalog, arity_bound, plan, nv, ncv);
    g.tag_root = top;
    g.marker = top;
    return g;
}

GadgetGraph build_rank_copies(const hf::ClosureN& nset, const RankCopiesOptions& opt)
{
    const auto& elems = nset.elements;
    Assembler a;
    std::vector<VertexId> n, c1, c2;
    for (const auto& x : elems)
        n.push_back(a.add(VertexRole::n(x.to_string()), {"N"}));
    for (const auto& x : elems)
        c1.push_back(a.add(VertexRole::nc(x.to_string(), 1), {"NC1"}));
    for (const auto& x : elems)
        c2.push_back(a.add(VertexRole::nc(x.to_string(), 2), {"NC2"}));
    for (std::size_t i = 0; i < elems.size(); ++i) {
        a.arrow(n[i], c1[i]);
        a.arrow(c1[i], c2[i]);
        for (std::size_t j = 0; j < elems.size(); ++j) {
            if (elems[j].contains(elems[i]))
                a.arrow(n[i], n[j]);
            if (!opt.drop_notin_rk && hf::notin_rk(elems[i], elems[j]))
                a.arrow(c1[i], c1[j]);
            if (hf::rank_less(elems[i], elems[j]))
                a.arrow(c2[i], c2[j]);
        }
    }
    auto g = a.finish(opt.drop_notin_rk ? "rank-copies-no-G3" : "rank-copies");
    g.level = nset.base.level;
    g.arity = nset.arity_bound;
    for (std::size_t i = 0; i < elems.size(); ++i) {
        Cell c;
        c.set = elems[i];
        c.copies = {std::vector{n[i]}, std::vector{c1[i]}, std::vector{c2[i]}};
        g.cells.push_back(std::move(c));
    }
    return g;
}

std::vector<VertexId> chain_order(const GadgetGraph& g)
{
    auto vs = g.part("chain");
    std::vector<std::pair<std::size_t, VertexId>> keyed;
    for (auto v : vs)
        keyed.emplace_back(std::stoul(g.graph.role(v).payload), v);
    std::sort(keyed.begin(), keyed.end());
    std::vector<VertexId> out;
    for (auto& [k, v] : keyed)
        out.push_back(v);
    return out;
}

namespace {

nlohmann::json ids(std::span<const VertexId> vs)
{
    nlohmann::json a = nlohmann::json::array();
    for (auto v : vs)
        a.push_back(index(v));
    return a;
}

std::vector<VertexId> ids_from(const nlohmann::json& a, std::size_t n)
{
    std::vector<VertexId> out;
    for (const auto& x : a) {
        auto i = x.get<std::size_t>();
        if (i >= n)
            throw GraphError("vertex id " + std::to_string(i) + " out of range");
        out.push_back(vertex(i));
    }
    return out;
}

}  // namespace

nlohmann::json gadget_to_json(const GadgetGraph& g)
{
    nlohmann::json j = io::graph_to_json(g.graph);
    j["hash"] = io::content_hash(g.graph);
    nlohmann::json parts = nlohmann::json::object();
    for (const auto& [name, vs] : g.parts)
        parts[name] = ids(vs);
    j["parts"] = std::move(parts);
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : g.cells)
        cells.push_back({{"set", c.set.to_string()},
                         {"copies", {ids(c.copies[0]), ids(c.copies[1]), ids(c.copies[2])}}});
    j["cells"] = std::move(cells);
    nlohmann::json cat = nlohmann::json::array();
    for (const auto& e : g.catalog)
        cat.push_back({{"index", e.index},
                       {"name", e.name},
                       {"formula", e.formula.to_string()},
                       {"godel", e.godel.to_string()}});
    nlohmann::json meta = {{"kind", g.kind},
                           {"level", g.level},
                           {"arity", g.arity},
                           {"catalog", std::move(cat)},
                           {"tag_lengths", g.tag_lengths},
                           {"tag_root", g.tag_root ? nlohmann::json(index(*g.tag_root)) : nlohmann::json()},
                           {"marker", g.marker ? nlohmann::json(index(*g.marker)) : nlohmann::json()}};
    j["meta"] = std::move(meta);
    return j;
}

GadgetGraph gadget_from_json(const nlohmann::json& j)
{
    GadgetGraph g;
    g.graph = io::graph_from_json(j);
    const std::size_t n = g.graph.size();
    try {
        if (j.contains("hash") && j.at("hash").get<std::string>() != io::content_hash(g.graph))
            throw GraphError("content hash does not match the graph");
        if (j.contains("parts"))
            for (const auto& [name, vs] : j.at("parts").items()) {
                auto v = ids_from(vs, n);
                std::sort(v.begin(), v.end());
                g.parts[name] = std::move(v);
            }
        if (j.contains("cells"))
            for (const auto& c : j.at("cells")) {
                Cell cell;
                cell.set = hf::parse_set(c.at("set").get<std::string>());
                const auto& copies = c.at("copies");
                for (std::size_t k = 0; k < 3 && k < copies.size(); ++k)
                    cell.copies[k] = ids_from(copies[k], n);
                g.cells.push_back(std::move(cell));
            }
        if (j.contains("meta")) {
            const auto& m = j.at("meta");
            g.kind = m.value("kind", "");
            g.level = m.value("level", std::size_t{0});
            g.arity = m.value("arity", std::size_t{0});
            if (m.contains("tag_lengths"))
                g.tag_lengths = m.at("tag_lengths").get<std::map<std::string, std::size_t>>();
            if (m.contains("tag_root") && !m.at("tag_root").is_null())
                g.tag_root = ids_from(nlohmann::json::array({m.at("tag_root")}), n).front();
            if (m.contains("marker") && !m.at("marker").is_null())
                g.marker = ids_from(nlohmann::json::array({m.at("marker")}), n).front();
            if (m.contains("catalog"))
                for (const auto& e : m.at("catalog")) {
                    auto f = folog::parse(e.at("formula").get<std::string>());
                    auto godel = folog::godel_number(f);
                    folog::CatalogEntry entry{e.at("index").get<std::size_t>(), e.at("name").get<std::string>(),
                                              std::move(f), std::move(godel)};
                    if (entry.godel.to_string() != e.at("godel").get<std::string>())
                        throw GraphError("catalog entry " + entry.name + " does not match its Goedel number");
                    g.catalog.push_back(std::move(entry));
                }
        }
    } catch (const nlohmann::json::exception& e) {
        throw GraphError(std::string("malformed gadget document: ") + e.what());
    } catch (const hf::ParseError& e) {
        throw GraphError(std::string("malformed gadget document: ") + e.what());
    }
    return g;
}

}  // namespace rigid::gadgets
