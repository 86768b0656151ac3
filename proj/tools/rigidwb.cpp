// rigidwb: build gadgets, certify rigidity, query satisfaction, export graphs,
// cross-check the solver against the oracle.
//
// Exit codes: 0 ok, 1 claim mismatch or check failure, 2 usage or input error,
// 3 inconclusive (budget exhausted).

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rigid/certify.hpp"
#include "rigid/endosearch.hpp"
#include "rigid/folog.hpp"
#include "rigid/gadgets.hpp"
#include "rigid/hf.hpp"
#include "rigid/interchange.hpp"

using namespace rigid;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInconclusive = 3;

struct BudgetArgs {
    std::uint64_t nodes = 0;
    double seconds = 0;
    unsigned threads = 1;
    bool no_propagate = false;

    endo::Budget budget() const
    {
        endo::Budget b;
        b.max_nodes = nodes;
        b.max_seconds = seconds;
        b.threads = threads;
        b.propagate = !no_propagate;
        return b;
    }
};

void add_budget(CLI::App* cmd, BudgetArgs& b)
{
    cmd->add_option("--nodes", b.nodes, "Node budget, 0 for none")->envname("RIGIDWB_NODES");
    cmd->add_option("--seconds", b.seconds, "Wall-clock budget in seconds, 0 for none")->envname("RIGIDWB_SECONDS");
    cmd->add_option("--threads", b.threads, "Worker threads (1 keeps enumeration order deterministic)")
        ->envname("RIGIDWB_THREADS")
        ->check(CLI::Range(1U, 256U));
    cmd->add_flag("--no-propagate", b.no_propagate, "Plain backtracking without arc consistency");
}

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
        std::cout << text;
    else
        io::write_file(path, text);
}

gadgets::GadgetGraph load_gadget(const std::string& path)
{
    auto j = nlohmann::json::parse(io::read_file(path));
    if (j.contains("meta"))
        return gadgets::gadget_from_json(j);
    // A bare interchange graph certifies as a gadget without parts.
    gadgets::GadgetGraph g;
    g.kind = "graph";
    g.graph = io::graph_from_json(j);
    return g;
}

struct GadgetArgs {
    std::string kind;
    std::size_t n = 6;
    std::string points;
    std::size_t level = 2;
    std::size_t arity = 2;
    std::string formulas;
    std::string chain = "auto";
    std::string spec;
    std::size_t depth = 2;
    bool strip = false;
    std::string k_parts;
    std::size_t label_length = 3;
    bool no_prefix = false;
    std::size_t h_size = 0;
    bool drop_notin_rk = false;
    std::size_t vertex_budget = gadgets::kDefaultVertexBudget;
    std::size_t closure_budget = hf::kDefaultClosureBudget;
    std::string out;
};

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty())
            out.push_back(cur);
    return out;
}

folog::Catalog catalog_for(const GadgetArgs& a, const hf::Universe& u)
{
    std::vector<folog::Formula> extra;
    if (!a.formulas.empty())
        extra = folog::parse_formula_list(io::read_file(a.formulas));
    return folog::formula_catalog(u, a.arity, extra);
}

gadgets::BlowupSpec read_spec(const std::string& path, const gadgets::GadgetGraph& base, std::size_t depth)
{
    auto j = nlohmann::json::parse(io::read_file(path));
    const std::size_t d = j.value("depth", depth);
    auto spec = gadgets::singleton_spec(base, d);
    if (j.contains("classes"))
        for (const auto& [role, labels] : j.at("classes").items()) {
            std::optional<VertexId> v;
            for (std::size_t i = 0; i < base.graph.size(); ++i)
                if (base.graph.role(vertex(i)).to_string() == role)
                    v = vertex(i);
            if (!v)
                throw std::invalid_argument("spec names unknown vertex " + role);
            spec.labels[index(*v)] = labels.get<std::vector<std::string>>();
        }
    return spec;
}

gadgets::GadgetGraph build(const GadgetArgs& a)
{
    gadgets::SatisfactionOptions sat;
    sat.vertex_budget = a.vertex_budget;
    sat.closure_budget = a.closure_budget;
    if (a.kind == "ray")
        return gadgets::build_ray(a.n);
    if (a.kind == "lex") {
        std::vector<gadgets::LexPoint> pts;
        for (const auto& item : split(a.points, ',')) {
            auto colon = item.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("lex point '" + item + "' is not real:ordinal");
            pts.push_back({item.substr(0, colon), std::stoul(item.substr(colon + 1))});
        }
        return gadgets::build_lex_order(pts);
    }
    if (a.kind == "finite-kappa") {
        std::vector<std::vector<std::string>> parts;
        for (const auto& p : split(a.k_parts, ';'))
            parts.push_back(split(p, ','));
        gadgets::FiniteKappaOptions opt;
        opt.with_prefix = !a.no_prefix;
        opt.h_size = a.h_size;
        return gadgets::build_finite_kappa(parts, a.label_length, opt);
    }
    const auto u = hf::build_universe(a.level);
    if (a.kind == "rank-copies") {
        gadgets::RankCopiesOptions opt;
        opt.drop_notin_rk = a.drop_notin_rk;
        return gadgets::build_rank_copies(hf::build_closure_N(u, a.arity, a.closure_budget), opt);
    }
    const auto cat = catalog_for(a, u);
    if (a.kind == "ordinal-case")
        return gadgets::build_ordinal_case(u, cat, a.arity, sat);
    if (a.kind == "berkeley") {
        std::size_t len = a.chain == "auto" ? 0 : std::stoul(a.chain);
        if (a.chain != "auto" && len == 0)
            throw std::invalid_argument("chain length must be positive or auto");
        gadgets::BerkeleyOptions opt;
        opt.sat = sat;
        return gadgets::build_berkeley(u, cat, a.arity, len, opt);
    }
    if (a.kind == "blowup") {
        auto base = gadgets::build_ordinal_case(u, cat, a.arity, sat);
        auto spec = a.spec.empty() ? gadgets::singleton_spec(base, a.depth) : read_spec(a.spec, base, a.depth);
        auto g = gadgets::blow_up(base, spec);
        return a.strip ? gadgets::strip_prefix_arrows(g) : g;
    }
    throw std::invalid_argument("unknown gadget kind " + a.kind);
}

int report_exception(const std::exception& e)
{
    std::cerr << "rigidwb: " << e.what() << "\n";
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"rigidwb: strongly rigid graph workbench"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI/TOML file with option defaults (flags take precedence)");
    app.set_version_flag("--version", certify::kToolVersion);

    // gadget
    GadgetArgs ga;
    auto* gadget = app.add_subcommand("gadget", "Build a gadget and write it as JSON");
    gadget->add_option("kind", ga.kind, "Gadget kind")
        ->required()
        ->check(CLI::IsMember({"ray", "lex", "finite-kappa", "ordinal-case", "blowup", "berkeley", "rank-copies"}));
    gadget->add_option("--n", ga.n, "Ray length");
    gadget->add_option("--points", ga.points, "Lex points as real:ordinal, comma separated");
    gadget->add_option("--level", ga.level, "Universe level n of V_n")->envname("RIGIDWB_LEVEL");
    gadget->add_option("--arity", ga.arity, "Arity bound")->envname("RIGIDWB_ARITY");
    gadget->add_option("--formulas", ga.formulas, "Extra catalog formulas, one per line");
    gadget->add_option("--chain", ga.chain, "Berkeley chain length or 'auto'");
    gadget->add_option("--spec", ga.spec, "Blow-up spec JSON");
    gadget->add_option("--depth", ga.depth, "Blow-up label length");
    gadget->add_flag("--strip", ga.strip, "Delete the prefix arrows after blowing up");
    gadget->add_option("--parts", ga.k_parts, "finite-kappa parts: labels comma separated, parts ';' separated");
    gadget->add_option("--label-length", ga.label_length, "finite-kappa label length");
    gadget->add_flag("--no-prefix", ga.no_prefix, "finite-kappa without the prefix family");
    gadget->add_option("--h-size", ga.h_size, "finite-kappa pad size");
    gadget->add_flag("--drop-notin-rk", ga.drop_notin_rk, "rank-copies without the not-in-by-rank arrows");
    gadget->add_option("--vertex-budget", ga.vertex_budget, "Refuse gadgets above this many vertices");
    gadget->add_option("--closure-budget", ga.closure_budget, "Refuse closures above this many sets");
    gadget->add_option("-o,--output", ga.out, "Output file (default stdout)");

    // certify
    std::string cert_in, cert_out, expect, cert_mode = "find-one", question = "endo";
    bool timing = false;
    BudgetArgs cert_budget;
    auto* cert = app.add_subcommand("certify", "Certify (strong) rigidity of a gadget file");
    cert->add_option("graph", cert_in, "Gadget JSON")->required()->check(CLI::ExistingFile);
    cert->add_option("--expect", expect, "Expected claim; exit 1 on mismatch")
        ->check(CLI::IsMember({"strongly-rigid", "rigid", "not-strongly-rigid", "not-rigid", "inconclusive"}));
    cert->add_option("--mode", cert_mode, "find-one or enumerate")->check(CLI::IsMember({"find-one", "enumerate"}));
    cert->add_option("--question", question, "endo (strong rigidity) or auto (rigidity)")
        ->check(CLI::IsMember({"endo", "auto"}));
    cert->add_flag("--timing", timing, "Include wall time in the certificate");
    cert->add_option("-o,--output", cert_out, "Certificate file (default stdout)");
    add_budget(cert, cert_budget);

    // search
    std::string search_in, search_mode = "all";
    bool nontrivial = false, automorphisms = false;
    BudgetArgs search_budget;
    auto* search = app.add_subcommand("search", "Enumerate endomorphisms of a gadget file");
    search->add_option("graph", search_in, "Gadget or graph JSON")->required()->check(CLI::ExistingFile);
    search->add_option("--mode", search_mode, "all, count or one")->check(CLI::IsMember({"all", "count", "one"}));
    search->add_flag("--nontrivial", nontrivial, "Exclude the identity");
    search->add_flag("--automorphisms", automorphisms, "Only automorphisms");
    add_budget(search, search_budget);

    // sat
    std::size_t sat_level = 2;
    std::string formula_text;
    std::vector<std::string> assignments;
    bool each = false;
    auto* sat = app.add_subcommand("sat", "Evaluate a formula in (V_n, in)");
    sat->add_option("--level", sat_level, "Universe level")->envname("RIGIDWB_LEVEL");
    sat->add_option("--formula", formula_text, "Formula text")->required();
    sat->add_option("--assign", assignments, "var=set in brace notation");
    sat->add_flag("--each", each, "Evaluate on every element for the single free variable");

    // export-dot
    std::string dot_in, dot_out;
    auto* dot = app.add_subcommand("export-dot", "Write a gadget as Graphviz DOT");
    dot->add_option("graph", dot_in, "Gadget or graph JSON")->required()->check(CLI::ExistingFile);
    dot->add_option("-o,--output", dot_out, "Output file (default stdout)");

    // oracle-diff
    endo::DiffConfig diff;
    std::string diff_densities = "0.2,0.5,0.8";
    auto* od = app.add_subcommand("oracle-diff", "Solver against brute force on seeded random digraphs");
    od->add_option("--graphs", diff.graphs, "Number of graphs");
    od->add_option("--max-vertices", diff.max_vertices, "Largest graph (oracle cap 8)");
    od->add_option("--seed", diff.seed, "RNG seed")->envname("RIGIDWB_SEED");
    od->add_option("--densities", diff_densities, "Arrow densities, comma separated");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gadget) {
            auto g = build(ga);
            emit(ga.out, gadgets::gadget_to_json(g).dump(1) + "\n");
            std::cerr << g.kind << " " << io::content_hash(g.graph) << " " << g.graph.size() << " vertices "
                      << g.graph.arrow_count() << " arrows\n";
            return kExitOk;
        }
        if (*cert) {
            auto g = load_gadget(cert_in);
            certify::CertifyOptions opt;
            opt.budget = cert_budget.budget();
            opt.mode = cert_mode == "enumerate" ? certify::CertMode::Enumerate : certify::CertMode::FindOne;
            auto c = question == "auto" ? certify::certify_rigidity(g, opt) : certify::certify_strong_rigidity(g, opt);
            emit(cert_out, certify::to_json(c, g, timing).dump(1) + "\n");
            std::cerr << certify::summary(c) << "\n";
            if (c.claim == certify::Claim::Inconclusive && expect != "inconclusive")
                return kExitInconclusive;
            if (!expect.empty() && certify::to_string(c.claim) != expect)
                return kExitMismatch;
            return kExitOk;
        }
        if (*search) {
            auto g = load_gadget(search_in);
            endo::SearchConstraints c;
            c.nontrivial_only = nontrivial;
            c.injective = automorphisms;
            c.mode = search_mode == "count" ? endo::Mode::Count
                     : search_mode == "one" ? endo::Mode::FindOne
                                            : endo::Mode::EnumerateAll;
            auto r = endo::enumerate_endomorphisms(g.graph, c, search_budget.budget());
            nlohmann::json maps = nlohmann::json::array();
            for (const auto& h : r.maps) {
                nlohmann::json images = nlohmann::json::array();
                for (auto v : h.images())
                    images.push_back(index(v));
                maps.push_back(std::move(images));
            }
            nlohmann::json out = {{"graph_hash", io::content_hash(g.graph)},
                                  {"solutions", r.stats.solutions},
                                  {"exhausted", r.stats.exhausted},
                                  {"nodes", r.stats.nodes},
                                  {"maps", std::move(maps)}};
            std::cout << out.dump(1) << "\n";
            return r.stats.exhausted ? kExitOk : kExitInconclusive;
        }
        if (*sat) {
            auto u = hf::build_universe(sat_level);
            auto m = folog::FOStructure::membership(u.elements);
            auto f = folog::parse(formula_text);
            if (each) {
                if (f.arity() != 1)
                    throw std::invalid_argument("--each needs exactly one free variable");
                folog::Evaluator eval(m, f);
                for (std::size_t i = 0; i < m.size(); ++i) {
                    const std::size_t arg[] = {i};
                    std::cout << m.element(i).to_string() << "\t" << (eval(arg) ? "true" : "false") << "\n";
                }
                return kExitOk;
            }
            std::unordered_map<std::string, std::size_t> env;
            for (const auto& a : assignments) {
                auto eq = a.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("assignment '" + a + "' is not var=set");
                auto x = hf::parse_set(a.substr(eq + 1));
                auto i = m.index_of(x);
                if (!i)
                    throw std::invalid_argument(x.to_string() + " is not in V_" + std::to_string(sat_level));
                env[a.substr(0, eq)] = *i;
            }
            std::cout << (folog::satisfies(m, f, env) ? "true" : "false") << "\n";
            return kExitOk;
        }
        if (*dot) {
            emit(dot_out, io::to_dot(load_gadget(dot_in).graph));
            return kExitOk;
        }
        if (*od) {
            diff.densities.clear();
            for (const auto& d : split(diff_densities, ','))
                diff.densities.push_back(std::stod(d));
            auto r = endo::oracle_differential(diff);
            nlohmann::json out = {{"graphs", r.graphs},
                                  {"seed", diff.seed},
                                  {"max_vertices", diff.max_vertices},
                                  {"endomorphisms", r.endomorphisms},
                                  {"automorphisms", r.automorphisms},
                                  {"endo_mismatches", r.endo_mismatches},
                                  {"auto_mismatches", r.auto_mismatches},
                                  {"details", r.details}};
            std::cout << out.dump(1) << "\n";
            return r.endo_mismatches + r.auto_mismatches == 0 ? kExitOk : kExitMismatch;
        }
    } catch (const std::exception& e) {
        return report_exception(e);
    }
    return kExitUsage;
}
