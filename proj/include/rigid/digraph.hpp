#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rigid {

/// Dense vertex index 0..n-1.
enum class VertexId : std::uint32_t {};

constexpr std::size_t index(VertexId v) { return static_cast<std::size_t>(v); }
constexpr VertexId vertex(std::size_t i) { return static_cast<VertexId>(i); }

/// Vertex families of the constructions. The payload carries the semantic
/// identity (a set in brace notation, a binary string, a copy index, ...).
enum class RoleTag : std::uint8_t {
    Anchor,
    PathB,
    P,
    Q,
    W,
    E,
    N,
    NC,
    Chain,
    ClassMember,
    Plain,
};

std::string_view to_string(RoleTag tag);
std::optional<RoleTag> role_tag_from_string(std::string_view s);

struct VertexRole {
    RoleTag tag = RoleTag::Plain;
    std::string payload;

    friend auto operator<=>(const VertexRole&, const VertexRole&) = default;

    static VertexRole anchor(std::size_t i) { return {RoleTag::Anchor, "u" + std::to_string(i)}; }
    static VertexRole path(std::string_view tag_name, std::size_t depth)
    {
        return {RoleTag::PathB, std::string(tag_name) + "/" + std::to_string(depth)};
    }
    static VertexRole p(std::size_t n) { return {RoleTag::P, std::to_string(n)}; }
    static VertexRole q(std::size_t n) { return {RoleTag::Q, std::to_string(n)}; }
    static VertexRole w(std::size_t i) { return {RoleTag::W, std::to_string(i)}; }
    static VertexRole e(std::string_view bits) { return {RoleTag::E, "<" + std::string(bits) + ">"}; }
    static VertexRole n(std::string_view set) { return {RoleTag::N, std::string(set)}; }
    static VertexRole nc(std::string_view set, std::size_t copy)
    {
        return {RoleTag::NC, std::to_string(copy) + ":" + std::string(set)};
    }
    static VertexRole chain(std::size_t i) { return {RoleTag::Chain, std::to_string(i)}; }
    static VertexRole member(std::string_view cls, std::string_view label)
    {
        return {RoleTag::ClassMember, std::string(cls) + "|" + std::string(label)};
    }
    static VertexRole plain(std::string_view name) { return {RoleTag::Plain, std::string(name)}; }

    std::string to_string() const;
};

struct Arrow {
    VertexId from;
    VertexId to;
    friend auto operator<=>(const Arrow&, const Arrow&) = default;
};

class GraphError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Immutable finite directed graph with role-tagged vertices.
class Digraph {
public:
    Digraph() = default;

    std::size_t size() const { return roles_.size(); }
    std::size_t arrow_count() const { return arrows_.size(); }
    bool contains(VertexId v) const { return index(v) < size(); }

    const VertexRole& role(VertexId v) const;
    std::span<const VertexRole> roles() const { return roles_; }
    std::optional<VertexId> find(const VertexRole& role) const;

    /// Sorted out-neighbours / in-neighbours.
    std::span<const VertexId> out(VertexId v) const;
    std::span<const VertexId> in(VertexId v) const;

    bool has_arrow(VertexId from, VertexId to) const;
    /// All arrows in lexicographic order.
    std::span<const Arrow> arrows() const { return arrows_; }

private:
    friend class DigraphBuilder;
    void check(VertexId v) const;

    std::vector<VertexRole> roles_;
    std::vector<Arrow> arrows_;
    std::vector<std::size_t> out_offsets_, in_offsets_;
    std::vector<VertexId> out_, in_;
    std::unordered_map<std::string, VertexId> by_role_;
};

/// Accumulates vertices and arrows; duplicate arrows collapse, duplicate roles are rejected.
class DigraphBuilder {
public:
    VertexId add_vertex(VertexRole role);
    void add_arrow(VertexId from, VertexId to);
    std::size_t size() const { return roles_.size(); }
    const VertexRole& role(VertexId v) const { return roles_.at(index(v)); }
    std::optional<VertexId> find(const VertexRole& role) const;

    Digraph build() &&;

private:
    std::vector<VertexRole> roles_;
    std::vector<Arrow> arrows_;
    std::unordered_map<std::string, VertexId> by_role_;
};

/// Builds a graph of n plain vertices named "0".."n-1" from an arrow list.
Digraph make_graph(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> arrows);

/// Total function on the vertex set of a graph: images[v] = h(v).
class VertexMap {
public:
    VertexMap() = default;
    explicit VertexMap(std::vector<VertexId> images) : images_(std::move(images)) {}

    static VertexMap identity(std::size_t n);

    std::size_t size() const { return images_.size(); }
    VertexId operator()(VertexId v) const { return images_.at(index(v)); }
    std::span<const VertexId> images() const { return images_; }
    bool is_identity() const;

    friend auto operator<=>(const VertexMap&, const VertexMap&) = default;

private:
    std::vector<VertexId> images_;
};

std::string to_string(const VertexMap& h);

/// Number of arrows leaving v. Throws GraphError on an unknown vertex.
std::size_t outdegree(const Digraph& g, VertexId v);
std::size_t indegree(const Digraph& g, VertexId v);

bool has_loop(const Digraph& g);

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

/// Directed cycles of length <= max_len, each as <v_0,...,v_k> with v_0 == v_k,
/// rotated so that v_0 is the smallest vertex; sorted. Only vertices inside a
/// strongly connected component are explored.
std::vector<std::vector<VertexId>> find_cycles(const Digraph& g, std::size_t max_len);

bool is_acyclic(const Digraph& g);

/// keep must name existing vertices. Vertex ids are renumbered densely in
/// ascending order of the kept ids; roles are preserved.
Digraph induced_subgraph(const Digraph& g, std::span<const VertexId> keep);

/// Graph with the given arrows removed (vertices unchanged).
Digraph without_arrows(const Digraph& g, std::span<const Arrow> removed);

/// Throws GraphError if h is not total on g1 or maps outside g2.
bool is_homomorphism(const VertexMap& h, const Digraph& g1, const Digraph& g2);

/// (second after first): v -> second(first(v)). Throws GraphError on a size mismatch.
VertexMap compose(const VertexMap& first, const VertexMap& second);

/// Bijective homomorphism whose inverse is a homomorphism.
bool is_isomorphism(const VertexMap& h, const Digraph& g1, const Digraph& g2);

}  // namespace rigid
