#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rigid/digraph.hpp"
#include "rigid/folog.hpp"
#include "rigid/hf.hpp"

namespace rigid::gadgets {

/// Representatives of one element x of N: copies[0] lives in N, copies[1] in
/// N^c (or N^{c1}), copies[2] in N^{c2}. After a blow-up each entry holds the
/// whole class [x].
struct Cell {
    hf::HFSet set;
    std::array<std::vector<VertexId>, 3> copies;
};

struct GadgetGraph {
    std::string kind;
    Digraph graph;
    /// Named vertex sets, each sorted. A, B, N, NC, NC1, NC2 and K partition
    /// the vertices; the rest (chain, B-C, C, P, Q, W, E, H, K<i>) are declared
    /// overlaps. In the Berkeley gadget A is the chain.
    std::map<std::string, std::vector<VertexId>> parts;
    std::vector<Cell> cells;
    std::size_t level = 0;
    std::size_t arity = 0;
    folog::Catalog catalog;
    /// Tag name -> path length from the tag root.
    std::map<std::string, std::size_t> tag_lengths;
    /// Root of the tag paths (u3 or the chain top) and the vertex with an arrow to every tag terminal.
    std::optional<VertexId> tag_root;
    std::optional<VertexId> marker;

    std::span<const VertexId> part(const std::string& name) const;
    bool has_part(const std::string& name) const { return parts.count(name) != 0; }
    /// Elements of the base universe V_level.
    bool in_base(const hf::HFSet& x) const;
};

inline constexpr const char* kPartitionParts[] = {"A", "B", "N", "NC", "NC1", "NC2", "K"};

class BudgetError : public std::length_error {
public:
    using std::length_error::length_error;
};

inline constexpr std::size_t kDefaultVertexBudget = 20000;

/// Prop. 2.1 truncated to n vertices: u0->u1, u0->u2, u1->u2, then the ray u2->u3->...
GadgetGraph build_ray(std::size_t n);

struct LexPoint {
    std::string real;
    std::size_t ordinal = 0;
    friend auto operator<=>(const LexPoint&, const LexPoint&) = default;
};

/// Arrow p -> q iff p.ordinal < q.ordinal, or equal ordinals and p.real < q.real.
GadgetGraph build_lex_order(std::span<const LexPoint> points);

struct PrefixFamily {
    std::size_t depth = 0;
    /// Every binary string of length <= depth, shortest first, then lexicographic.
    std::vector<std::string> strings;
    /// (parent, child) index pairs of the binary tree e_s -> e_{s b}.
    std::vector<std::pair<std::size_t, std::size_t>> tree;

    /// e_s tags a vertex labelled r iff s is a prefix of r.
    static bool tags(std::string_view s, std::string_view r) { return r.substr(0, s.size()) == s; }
};

PrefixFamily build_prefix_family(std::size_t depth);

struct FiniteKappaOptions {
    bool with_prefix = true;
    std::size_t h_size = 0;
};

/// Claim of the reals case: anchor, w_i per part with arrows to all of K_i,
/// prefix family e_s over the labels, and an optional pad of h_size fixed vertices.
GadgetGraph build_finite_kappa(const std::vector<std::vector<std::string>>& k_parts, std::size_t label_length,
                               const FiniteKappaOptions& opt = {});

/// u0->u1->u2->u0 with u1->u3 and u2->u3.
GadgetGraph build_anchor();

/// Anchor plus tag paths from u3: p_i of length 2i+2 and q_j of length 2j+3.
GadgetGraph build_B_tags(std::size_t p_count, std::size_t q_count);

struct SatisfactionOptions {
    std::size_t vertex_budget = kDefaultVertexBudget;
    std::size_t closure_budget = 4096;
};

/// Anchor, tags, N with membership, N^c ordered by code, G1-G5.
GadgetGraph build_ordinal_case(const hf::Universe& u, const folog::Catalog& catalog, std::size_t arity_bound,
                               const SatisfactionOptions& opt = {});

struct BlowupSpec {
    std::size_t depth = 0;
    /// labels[v] for every N or N^c vertex v of the base; empty elsewhere.
    std::vector<std::vector<std::string>> labels;
};

/// Every class gets the single label 0...0.
BlowupSpec singleton_spec(const GadgetGraph& base, std::size_t depth);

/// Replaces each N/N^c vertex by its class, turns base arrows into all-to-all
/// arrows between the expanded endpoints and adds the prefix family.
GadgetGraph blow_up(const GadgetGraph& base, const BlowupSpec& spec);

/// Deletes the arrows from e_s vertices into classes (the negative control).
GadgetGraph strip_prefix_arrows(const GadgetGraph& g);

struct BerkeleyOptions {
    SatisfactionOptions sat;
};

/// Number of vertices outside the chain for the given inputs; chain_len must exceed it.
std::size_t berkeley_non_chain_count(const hf::Universe& u, const folog::Catalog& catalog, std::size_t arity_bound,
                                     const SatisfactionOptions& opt = {});

/// Chain 0..chain_len-1 as a transitive tournament whose top roots the tags,
/// N with membership, N^c with inequality. chain_len == 0 means non-chain count + 1.
GadgetGraph build_berkeley(const hf::Universe& u, const folog::Catalog& catalog, std::size_t arity_bound,
                           std::size_t chain_len, const BerkeleyOptions& opt = {});

struct RankCopiesOptions {
    /// Drop the not-in-by-rank arrows on N^{c1}.
    bool drop_notin_rk = false;
};

GadgetGraph build_rank_copies(const hf::ClosureN& nset, const RankCopiesOptions& opt = {});

/// Vertices of the chain part in chain order (bottom first).
std::vector<VertexId> chain_order(const GadgetGraph& g);

nlohmann::json gadget_to_json(const GadgetGraph& g);
GadgetGraph gadget_from_json(const nlohmann::json& j);

}  // namespace rigid::gadgets
