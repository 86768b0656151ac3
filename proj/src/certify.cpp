#include "rigid/certify.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "rigid/interchange.hpp"

namespace rigid::certify {

using gadgets::GadgetGraph;

std::string_view to_string(Claim c)
{
    switch (c) {
    case Claim::StronglyRigid: return "strongly-rigid";
    case Claim::Rigid: return "rigid";
    case Claim::NotStronglyRigid: return "not-strongly-rigid";
    case Claim::NotRigid: return "not-rigid";
    case Claim::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::optional<Claim> claim_from_string(std::string_view s)
{
    for (auto c : {Claim::StronglyRigid, Claim::Rigid, Claim::NotStronglyRigid, Claim::NotRigid, Claim::Inconclusive})
        if (to_string(c) == s)
            return c;
    return std::nullopt;
}

std::string_view to_string(Outcome o)
{
    switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Skipped: return "skipped";
    }
    return "?";
}

const LemmaResult* find_lemma(const LemmaTable& t, std::string_view name)
{
    for (const auto& r : t)
        if (r.name == name)
            return &r;
    return nullptr;
}

bool no_failures(const LemmaTable& t)
{
    return std::none_of(t.begin(), t.end(), [](const LemmaResult& r) { return r.outcome == Outcome::Fail; });
}

nlohmann::json to_json(const LemmaTable& t)
{
    nlohmann::json a = nlohmann::json::array();
    for (const auto& r : t)
        a.push_back({{"name", r.name}, {"outcome", to_string(r.outcome)}, {"detail", r.detail}});
    return a;
}

namespace {

std::string role_of(const GadgetGraph& g, VertexId v) { return g.graph.role(v).to_string(); }

/// Class name of a blown-up vertex ("N:{}" for "N:{}|01"), or nothing.
std::optional<std::string> class_of(const GadgetGraph& g, VertexId v)
{
    const auto& r = g.graph.role(v);
    if (r.tag != RoleTag::ClassMember)
        return std::nullopt;
    return r.payload.substr(0, r.payload.rfind('|'));
}

bool has_class_members(const GadgetGraph& g)
{
    for (const auto& r : g.graph.roles())
        if (r.tag == RoleTag::ClassMember)
            return true;
    return false;
}

/// Vertex -> cell index for copies[k].
std::map<VertexId, std::size_t> copy_index(const GadgetGraph& g, std::size_t k)
{
    std::map<VertexId, std::size_t> m;
    for (std::size_t i = 0; i < g.cells.size(); ++i)
        for (auto v : g.cells[i].copies[k])
            m[v] = i;
    return m;
}

std::optional<std::size_t> cell_of_set(const GadgetGraph& g, const hf::HFSet& x)
{
    for (std::size_t i = 0; i < g.cells.size(); ++i)
        if (g.cells[i].set == x)
            return i;
    return std::nullopt;
}

std::string set_of(const GadgetGraph& g, std::size_t cell) { return g.cells[cell].set.to_string(); }

}  // namespace

bool ExtractedMap::is_identity() const
{
    for (std::size_t i = 0; i < on_cells.size(); ++i)
        if (on_cells[i] != i)
            return false;
    return true;
}

bool ExtractedMap::base_closed(const GadgetGraph& g) const
{
    return std::all_of(base_cells.begin(), base_cells.end(),
                       [&](std::size_t c) { return g.in_base(g.cells[on_cells[c]].set); });
}

bool ExtractedMap::identity_on_base() const
{
    return std::all_of(base_cells.begin(), base_cells.end(), [&](std::size_t c) { return on_cells[c] == c; });
}

ExtractedMap extract_embedding(const GadgetGraph& g, const VertexMap& h)
{
    if (h.size() != g.graph.size())
        throw ExtractionError("map has " + std::to_string(h.size()) + " entries for " +
                              std::to_string(g.graph.size()) + " vertices");
    const auto in_n = copy_index(g, 0);
    ExtractedMap j;
    j.quotient = has_class_members(g);
    for (std::size_t i = 0; i < g.cells.size(); ++i) {
        std::optional<std::size_t> target;
        for (auto v : g.cells[i].copies[0]) {
            auto it = in_n.find(h(v));
            if (it == in_n.end())
                throw ExtractionError("h sends " + role_of(g, v) + " outside N, to " + role_of(g, h(v)));
            if (target && *target != it->second)
                throw ExtractionError("class of " + set_of(g, i) + " splits between " + set_of(g, *target) +
                                      " and " + set_of(g, it->second));
            target = it->second;
        }
        if (!target)
            throw ExtractionError("cell " + set_of(g, i) + " has no N representative");
        j.on_cells.push_back(*target);
        if (g.in_base(g.cells[i].set))
            j.base_cells.push_back(i);
    }
    return j;
}

nlohmann::json to_json(const ExtractedMap& j, const GadgetGraph& g)
{
    nlohmann::json moved = nlohmann::json::array();
    for (std::size_t i = 0; i < j.on_cells.size(); ++i)
        if (j.on_cells[i] != i)
            moved.push_back({{"from", set_of(g, i)}, {"to", set_of(g, j.on_cells[i])}});
    return {{"quotient", j.quotient},
            {"identity", j.is_identity()},
            {"identity_on_base", j.identity_on_base()},
            {"base_closed", j.base_closed(g)},
            {"moved", std::move(moved)}};
}

LemmaTable check_lemma_battery(const GadgetGraph& g, const VertexMap& h, const BatteryOptions& opt)
{
    if (h.size() != g.graph.size())
        throw NotEndomorphismError("map size does not match the graph");
    for (auto v : h.images())
        if (!g.graph.contains(v))
            throw NotEndomorphismError("map leaves the vertex set");
    if (!opt.allow_non_homomorphism && !is_homomorphism(h, g.graph, g.graph))
        throw NotEndomorphismError("map is not an endomorphism");

    LemmaTable t;
    auto add = [&](std::string name, Outcome o, std::string detail = {}) {
        t.push_back({std::move(name), o, std::move(detail)});
    };
    auto first_moved = [&](std::span<const VertexId> vs) -> std::optional<VertexId> {
        for (auto v : vs)
            if (h(v) != v)
                return v;
        return std::nullopt;
    };
    auto moved_detail = [&](VertexId v) { return role_of(g, v) + " -> " + role_of(g, h(v)); };

    if (g.has_part("chain")) {
        auto order = gadgets::chain_order(g);
        std::map<VertexId, std::size_t> pos;
        for (std::size_t i = 0; i < order.size(); ++i)
            pos[order[i]] = i;
        std::string bad;
        if (!order.empty() && h(order.back()) != order.back())
            bad = "top " + moved_detail(order.back());
        for (std::size_t i = 0; bad.empty() && i < order.size(); ++i) {
            auto it = pos.find(h(order[i]));
            if (it == pos.end())
                bad = moved_detail(order[i]) + " leaves the chain";
            else if (i > 0 && pos[h(order[i - 1])] >= it->second)
                bad = "not increasing at " + role_of(g, order[i]);
        }
        add("chain_top_fixed", bad.empty() ? Outcome::Pass : Outcome::Fail, bad);
    } else if (g.has_part("A")) {
        auto v = first_moved(g.part("A"));
        add("anchors_fixed", v ? Outcome::Fail : Outcome::Pass, v ? moved_detail(*v) : "");
    } else {
        add("anchors_fixed", Outcome::Skipped, "no anchor");
    }

    if (g.has_part("B")) {
        auto v = first_moved(g.part("B"));
        add("tags_fixed", v ? Outcome::Fail : Outcome::Pass, v ? moved_detail(*v) : "");
    } else {
        add("tags_fixed", Outcome::Skipped, "no tags");
    }

    {
        std::vector<std::string> names;
        for (const auto& [name, vs] : g.parts)
            if (name == "N" || name == "NC" || name == "NC1" || name == "NC2" || name == "chain" ||
                name.starts_with("K"))
                names.push_back(name);
        std::string bad;
        for (const auto& name : names) {
            auto vs = g.part(name);
            for (auto v : vs)
                if (!std::binary_search(vs.begin(), vs.end(), h(v))) {
                    bad = name + ": " + moved_detail(v);
                    break;
                }
            if (!bad.empty())
                break;
        }
        if (names.empty())
            add("parts_closed", Outcome::Skipped, "no closed parts");
        else
            add("parts_closed", bad.empty() ? Outcome::Pass : Outcome::Fail, bad);
    }

    // The cell-level map j; later checks need it.
    std::optional<ExtractedMap> j;
    std::string j_error;
    if (!g.cells.empty()) {
        try {
            j = extract_embedding(g, h);
        } catch (const ExtractionError& e) {
            j_error = e.what();
        }
    }

    const bool has_copies = std::any_of(g.cells.begin(), g.cells.end(),
                                        [](const gadgets::Cell& c) { return !c.copies[1].empty(); });
    if (!has_copies) {
        add("copy_coherence", Outcome::Skipped, "no copies");
    } else if (!j) {
        add("copy_coherence", Outcome::Fail, "j undefined: " + j_error);
    } else {
        // Images that leave the copy part are the business of parts_closed.
        std::string bad;
        for (std::size_t k = 1; k < 3 && bad.empty(); ++k) {
            const auto idx = copy_index(g, k);
            for (std::size_t i = 0; i < g.cells.size() && bad.empty(); ++i)
                for (auto v : g.cells[i].copies[k]) {
                    auto it = idx.find(h(v));
                    if (it != idx.end() && it->second != j->on_cells[i]) {
                        bad = moved_detail(v) + ", expected the copy of " + set_of(g, j->on_cells[i]);
                        break;
                    }
                }
        }
        add("copy_coherence", bad.empty() ? Outcome::Pass : Outcome::Fail, bad);
    }

    auto on_cells = [&](const std::string& name, auto&& check) {
        if (g.cells.empty()) {
            add(name, Outcome::Skipped, "no encoded sets");
            return;
        }
        if (!j) {
            add(name, Outcome::Fail, "j undefined: " + j_error);
            return;
        }
        bool applicable = false;
        std::string bad;
        for (std::size_t i = 0; i < g.cells.size() && bad.empty(); ++i)
            check(i, applicable, bad);
        if (!applicable && bad.empty())
            add(name, Outcome::Skipped, "no instances");
        else
            add(name, bad.empty() ? Outcome::Pass : Outcome::Fail, bad);
    };
    auto image_set = [&](std::size_t i) { return g.cells[j->on_cells[i]].set; };
    auto image_of = [&](const hf::HFSet& x) -> std::optional<hf::HFSet> {
        auto c = cell_of_set(g, x);
        if (!c)
            return std::nullopt;
        return image_set(*c);
    };

    on_cells("injective_on_N", [&](std::size_t i, bool& applicable, std::string& bad) {
        applicable = true;
        for (std::size_t k = 0; k < i; ++k)
            if (j->on_cells[k] == j->on_cells[i])
                bad = set_of(g, k) + " and " + set_of(g, i) + " both go to " + set_of(g, j->on_cells[i]);
    });
    on_cells("finite_sets_preserved", [&](std::size_t i, bool& applicable, std::string& bad) {
        std::vector<hf::HFSet> imgs;
        for (const auto& m : g.cells[i].set.members()) {
            auto y = image_of(m);
            if (!y)
                return;
            imgs.push_back(*y);
        }
        applicable = true;
        if (hf::HFSet::of(imgs) != image_set(i))
            bad = set_of(g, i) + " goes to " + image_set(i).to_string();
    });
    on_cells("pairs_preserved", [&](std::size_t i, bool& applicable, std::string& bad) {
        auto p = hf::as_pair(g.cells[i].set);
        if (!p)
            return;
        auto a = image_of(p->first), b = image_of(p->second);
        if (!a || !b)
            return;
        applicable = true;
        if (hf::pair(*a, *b) != image_set(i))
            bad = set_of(g, i) + " goes to " + image_set(i).to_string();
    });
    on_cells("tuples_preserved", [&](std::size_t i, bool& applicable, std::string& bad) {
        auto tup = hf::as_tuple(g.cells[i].set);
        if (!tup)
            return;
        std::vector<hf::HFSet> imgs;
        for (const auto& x : *tup) {
            auto y = image_of(x);
            if (!y)
                return;
            imgs.push_back(*y);
        }
        applicable = true;
        if (hf::tuple(imgs) != image_set(i))
            bad = set_of(g, i) + " goes to " + image_set(i).to_string();
    });
    on_cells("naturals_fixed", [&](std::size_t i, bool& applicable, std::string& bad) {
        if (!hf::as_ordinal(g.cells[i].set))
            return;
        applicable = true;
        if (j->on_cells[i] != i)
            bad = set_of(g, i) + " goes to " + image_set(i).to_string();
    });
    on_cells("base_universe_preserved", [&](std::size_t i, bool& applicable, std::string& bad) {
        if (!g.in_base(g.cells[i].set))
            return;
        applicable = true;
        if (!g.in_base(image_set(i)))
            bad = set_of(g, i) + " goes to " + image_set(i).to_string();
    });

    if (!has_class_members(g)) {
        add("class_coherence", Outcome::Skipped, "no classes");
        add("within_class_identity", Outcome::Skipped, "no classes");
    } else {
        std::map<std::string, std::set<std::string>> targets;
        std::string within;
        for (std::size_t i = 0; i < g.graph.size(); ++i) {
            const VertexId v = vertex(i);
            auto c = class_of(g, v);
            if (!c)
                continue;
            auto tc = class_of(g, h(v));
            targets[*c].insert(tc ? *tc : role_of(g, h(v)));
            if (within.empty() && tc == c && h(v) != v)
                within = moved_detail(v);
        }
        std::string split;
        for (const auto& [c, ts] : targets)
            if (ts.size() > 1) {
                split = "class " + c + " splits over " + std::to_string(ts.size()) + " targets";
                break;
            }
        add("class_coherence", split.empty() ? Outcome::Pass : Outcome::Fail, split);
        add("within_class_identity", within.empty() ? Outcome::Pass : Outcome::Fail, within);
    }
    return t;
}

ElementarityResult check_elementarity(const folog::FOStructure& m, std::span<const std::size_t> j,
                                      const folog::Catalog& catalog)
{
    const std::size_t n = m.size();
    if (j.size() != n)
        throw std::invalid_argument("map has " + std::to_string(j.size()) + " entries for a domain of " +
                                    std::to_string(n));
    for (auto y : j)
        if (y >= n)
            throw std::invalid_argument("map leaves the domain");
    ElementarityResult r;
    if (n == 0)
        return r;
    for (const auto& entry : catalog) {
        folog::Evaluator eval(m, entry.formula);
        const std::size_t k = entry.formula.arity();
        std::vector<std::size_t> args(k, 0), image(k);
        for (;;) {
            for (std::size_t i = 0; i < k; ++i)
                image[i] = j[args[i]];
            if (eval(args) != eval(image)) {
                r.holds = false;
                r.counterexample = Counterexample{entry.index, entry.formula.to_string(), args};
                return r;
            }
            std::size_t pos = k;
            while (pos > 0 && ++args[pos - 1] == n)
                args[--pos] = 0;
            if (pos == 0)
                break;
        }
    }
    return r;
}

namespace {

std::string witness_moves(const GadgetGraph& g, const VertexMap& h, std::size_t limit = 4)
{
    std::ostringstream s;
    std::size_t shown = 0;
    for (std::size_t i = 0; i < h.size(); ++i)
        if (h(vertex(i)) != vertex(i)) {
            if (shown == limit) {
                s << ", ...";
                break;
            }
            s << (shown ? ", " : "") << role_of(g, vertex(i)) << " -> " << role_of(g, h(vertex(i)));
            ++shown;
        }
    return s.str();
}

void attach_witness(Certificate& c, const GadgetGraph& g, VertexMap w, bool bijective)
{
    // Never trust the solver with a claim.
    if (!is_homomorphism(w, g.graph, g.graph) || w.is_identity() ||
        (bijective && !is_isomorphism(w, g.graph, g.graph)))
        throw std::logic_error("solver produced an invalid witness: " + witness_moves(g, w));
    c.lemmas = check_lemma_battery(g, w);
    if (!g.cells.empty()) {
        try {
            c.extracted = extract_embedding(g, w);
        } catch (const ExtractionError& e) {
            c.extraction_error = e.what();
        }
    }
    c.witness = std::move(w);
}

Certificate start(const GadgetGraph& g, const CertifyOptions& opt, std::string question)
{
    Certificate c;
    c.graph_hash = io::content_hash(g.graph);
    c.kind = g.kind;
    c.vertices = g.graph.size();
    c.arrows = g.graph.arrow_count();
    c.question = std::move(question);
    c.mode = opt.mode;
    c.budget = opt.budget;
    c.catalog_manifest = folog::render_manifest(g.catalog);
    return c;
}

Certificate certify(const GadgetGraph& g, const CertifyOptions& opt, bool automorphisms)
{
    Certificate c = start(g, opt, automorphisms ? "automorphisms" : "endomorphisms");
    const Claim yes = automorphisms ? Claim::Rigid : Claim::StronglyRigid;
    const Claim no = automorphisms ? Claim::NotRigid : Claim::NotStronglyRigid;

    endo::SearchConstraints sc;
    sc.injective = automorphisms;
    if (opt.mode == CertMode::FindOne) {
        sc.mode = endo::Mode::FindOne;
        sc.nontrivial_only = true;
    }
    auto r = endo::enumerate_endomorphisms(g.graph, sc, opt.budget);
    c.stats = r.stats;

    std::optional<VertexMap> witness;
    if (opt.mode == CertMode::Enumerate) {
        c.enumerated = r.maps.size();
        for (const auto& h : r.maps)
            if (!h.is_identity() && is_isomorphism(h, g.graph, g.graph)) {
                witness = h;
                break;
            }
        if (!witness)
            for (const auto& h : r.maps)
                if (!h.is_identity()) {
                    witness = h;
                    break;
                }
    } else if (!r.maps.empty()) {
        witness = r.maps.front();
    }

    if (witness) {
        c.claim = no;
        attach_witness(c, g, std::move(*witness), automorphisms);
    } else if (r.stats.exhausted) {
        c.claim = yes;
        c.lemmas = check_lemma_battery(g, VertexMap::identity(g.graph.size()));
    } else {
        c.claim = Claim::Inconclusive;
    }
    return c;
}

}  // namespace

Certificate certify_strong_rigidity(const GadgetGraph& g, const CertifyOptions& opt)
{
    return certify(g, opt, false);
}

Certificate certify_rigidity(const GadgetGraph& g, const CertifyOptions& opt) { return certify(g, opt, true); }

nlohmann::json to_json(const Certificate& c, const GadgetGraph& g, bool with_timing)
{
    nlohmann::json j;
    j["tool"] = "rigidwb";
    j["tool_version"] = kToolVersion;
    j["format_version"] = io::kFormatVersion;
    j["graph_hash"] = c.graph_hash;
    j["kind"] = c.kind;
    j["vertices"] = c.vertices;
    j["arrows"] = c.arrows;
    j["question"] = c.question;
    j["mode"] = c.mode == CertMode::FindOne ? "find-one" : "enumerate";
    j["claim"] = to_string(c.claim);
    j["exhausted"] = c.stats.exhausted;
    if (c.enumerated)
        j["enumerated"] = *c.enumerated;
    if (c.witness) {
        nlohmann::json images = nlohmann::json::array();
        nlohmann::json moves = nlohmann::json::array();
        for (std::size_t i = 0; i < c.witness->size(); ++i) {
            const VertexId y = (*c.witness)(vertex(i));
            images.push_back(index(y));
            if (y != vertex(i))
                moves.push_back({{"from", role_of(g, vertex(i))}, {"to", role_of(g, y)}});
        }
        j["witness"] = {{"images", std::move(images)}, {"moves", std::move(moves)}};
    } else {
        j["witness"] = nullptr;
    }
    j["lemmas"] = to_json(c.lemmas);
    if (c.extracted)
        j["extracted"] = to_json(*c.extracted, g);
    else if (!c.extraction_error.empty())
        j["extracted"] = {{"error", c.extraction_error}};
    nlohmann::json manifest = nlohmann::json::array();
    std::istringstream lines(c.catalog_manifest);
    for (std::string line; std::getline(lines, line);)
        if (!line.empty())
            manifest.push_back(line);
    j["catalog_manifest"] = std::move(manifest);
    nlohmann::json stats = {{"nodes", c.stats.nodes}, {"prunes", c.stats.prunes}, {"solutions", c.stats.solutions}};
    if (with_timing)
        stats["seconds"] = c.stats.seconds;
    j["stats"] = std::move(stats);
    j["budget"] = {{"max_nodes", c.budget.max_nodes},
                   {"max_seconds", c.budget.max_seconds},
                   {"threads", c.budget.threads},
                   {"propagate", c.budget.propagate}};
    return j;
}

std::string summary(const Certificate& c)
{
    std::ostringstream s;
    s << c.kind << " [" << c.graph_hash << "] " << c.vertices << " vertices, " << c.arrows << " arrows: "
      << to_string(c.claim) << " (" << c.stats.nodes << " nodes" << (c.stats.exhausted ? ", exhausted" : "")
      << ")";
    for (const auto& l : c.lemmas)
        if (l.outcome == Outcome::Fail)
            s << "\n  " << l.name << " fails: " << l.detail;
    return s.str();
}

nlohmann::json to_json(const SweepReport& r)
{
    return {{"name", r.name},
            {"passed", r.passed()},
            {"exhausted", r.exhausted},
            {"checked", r.checked},
            {"failures", r.failures},
            {"stats", {{"nodes", r.stats.nodes}, {"prunes", r.stats.prunes}, {"solutions", r.stats.solutions}}}};
}

namespace {

template <class Check>
SweepReport sweep(std::string name, const GadgetGraph& g, const endo::SearchConstraints& c, const endo::Budget& b,
                  Check&& check)
{
    SweepReport rep;
    rep.name = std::move(name);
    auto r = endo::enumerate_endomorphisms(g.graph, c, b);
    rep.stats = r.stats;
    rep.exhausted = r.stats.exhausted;
    for (std::size_t i = 0; i < r.maps.size(); ++i) {
        ++rep.checked;
        std::string bad = check(r.maps[i]);
        if (!bad.empty())
            rep.failures.push_back("endomorphism " + std::to_string(i) + ": " + bad);
    }
    return rep;
}

}  // namespace

SweepReport check_prop62(const GadgetGraph& g, const endo::Budget& b)
{
    if (!g.has_part("N") || !g.has_part("NC1") || !g.has_part("NC2"))
        throw std::invalid_argument("gadget has no rank copies");
    endo::SearchConstraints c;
    for (const char* p : {"N", "NC1", "NC2"}) {
        auto vs = g.part(p);
        c.closed_parts.emplace_back(vs.begin(), vs.end());
    }
    const auto idx1 = copy_index(g, 1), idx2 = copy_index(g, 2);
    return sweep("prop62", g, c, b, [&](const VertexMap& h) -> std::string {
        ExtractedMap j;
        try {
            j = extract_embedding(g, h);
        } catch (const ExtractionError& e) {
            return e.what();
        }
        for (std::size_t i = 0; i < g.cells.size(); ++i) {
            for (std::size_t k = 1; k < 3; ++k) {
                const auto& idx = k == 1 ? idx1 : idx2;
                for (auto v : g.cells[i].copies[k]) {
                    auto it = idx.find(h(v));
                    if (it == idx.end() || it->second != j.on_cells[i])
                        return "copy " + std::to_string(k) + " of " + set_of(g, i) + " incoherent";
                }
            }
            for (std::size_t k = 0; k < i; ++k)
                if (j.on_cells[k] == j.on_cells[i])
                    return "not injective on N at " + set_of(g, k) + ", " + set_of(g, i);
        }
        return {};
    });
}

SweepReport check_chain_top_fixed(const GadgetGraph& g, const endo::Budget& b)
{
    if (!g.has_part("chain") || g.part("chain").empty())
        throw std::invalid_argument("gadget has no chain");
    const auto order = gadgets::chain_order(g);
    std::map<VertexId, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i)
        pos[order[i]] = i;
    return sweep("chain_top_fixed", g, {}, b, [&](const VertexMap& h) -> std::string {
        if (h(order.back()) != order.back())
            return "top goes to " + role_of(g, h(order.back()));
        std::optional<std::size_t> prev;
        for (auto v : order) {
            auto it = pos.find(h(v));
            if (it == pos.end())
                return role_of(g, v) + " leaves the chain";
            if (prev && *prev >= it->second)
                return "not increasing at " + role_of(g, v);
            prev = it->second;
        }
        return {};
    });
}

SweepReport check_elementarity_sweep(const GadgetGraph& g, const endo::Budget& b)
{
    if (g.cells.empty())
        throw std::invalid_argument("gadget encodes no sets");
    std::vector<std::size_t> base_cells;
    std::vector<hf::HFSet> domain;
    for (std::size_t i = 0; i < g.cells.size(); ++i)
        if (g.in_base(g.cells[i].set)) {
            base_cells.push_back(i);
            domain.push_back(g.cells[i].set);
        }
    const auto m = folog::FOStructure::membership(domain);
    return sweep("elementarity", g, {}, b, [&](const VertexMap& h) -> std::string {
        ExtractedMap j;
        try {
            j = extract_embedding(g, h);
        } catch (const ExtractionError& e) {
            return e.what();
        }
        std::vector<std::size_t> on_base;
        for (auto c : base_cells) {
            auto y = m.index_of(g.cells[j.on_cells[c]].set);
            if (!y)
                return set_of(g, c) + " leaves the base universe";
            on_base.push_back(*y);
        }
        auto r = check_elementarity(m, on_base, g.catalog);
        if (!r.holds) {
            std::string args;
            for (auto a : r.counterexample->tuple)
                args += (args.empty() ? "" : ", ") + domain[a].to_string();
            return "formula " + std::to_string(r.counterexample->formula_index) + " (" + r.counterexample->formula +
                   ") fails at (" + args + ")";
        }
        if (!j.identity_on_base())
            return "extracted map moves the base universe";
        return {};
    });
}

}  // namespace rigid::certify
