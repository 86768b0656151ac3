#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace rigid::hf {

using Natural = boost::multiprecision::cpp_int;

/// Sets of rank above this bound have Ackermann codes with more than 2^65536
/// bits and are never materialized; their order is still decided exactly.
inline constexpr std::size_t kMaxCodeRank = 5;

/// A hereditarily finite set.
///
/// Values are immutable and cheap to copy (shared node). Members are kept in
/// ascending canonical order, which is the order of Ackermann codes
/// code(x) = sum over y in x of 2^code(y). Comparison never materializes the
/// codes: two codes compare like binary numbers, i.e. by their largest
/// differing member.
class HFSet {
public:
    /// The empty set.
    HFSet();

    /// Builds {members...}; duplicates are collapsed.
    static HFSet of(std::vector<HFSet> members);

    std::span<const HFSet> members() const;
    std::size_t cardinality() const;
    std::size_t rank() const;
    bool empty() const { return cardinality() == 0; }
    bool contains(const HFSet& x) const;

    /// Ackermann code. Throws std::domain_error when rank() > kMaxCodeRank.
    Natural code() const;

    /// Structural hash, stable across runs.
    std::uint64_t hash() const;

    /// Brace notation, members in canonical order: {} , {{}} , {{},{{}}} ...
    std::string to_string() const;

    friend std::strong_ordering operator<=>(const HFSet& a, const HFSet& b);
    friend bool operator==(const HFSet& a, const HFSet& b);

private:
    struct Node;
    explicit HFSet(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Parses brace notation; whitespace is ignored. Inverse of HFSet::to_string.
HFSet parse_set(std::string_view text);

/// The strict total order used in place of the constructible well-order.
inline bool canonical_less(const HFSet& x, const HFSet& y) { return x < y; }

inline bool rank_less(const HFSet& x, const HFSet& y) { return x.rank() < y.rank(); }

/// x notin_rk y  iff  x is not a member of y and rank(x) < rank(y).
inline bool notin_rk(const HFSet& x, const HFSet& y) { return rank_less(x, y) && !y.contains(x); }

/// Kuratowski pair {{x},{x,y}}.
HFSet pair(const HFSet& x, const HFSet& y);

/// <x_1,...,x_k> = {(0,x_1),...,(k-1,x_k)}. Throws std::invalid_argument on an empty list.
HFSet tuple(std::span<const HFSet> xs);

/// Finite von Neumann ordinal n.
HFSet ordinal(std::size_t n);

std::optional<std::pair<HFSet, HFSet>> as_pair(const HFSet& x);
std::optional<std::vector<HFSet>> as_tuple(const HFSet& x);
std::optional<std::size_t> as_ordinal(const HFSet& x);

/// Finite level V_n: all sets of rank < n.
struct Universe {
    std::size_t level = 0;
    std::vector<HFSet> elements;  // ascending canonical order

    bool contains(const HFSet& x) const;
    /// V_n itself as a set.
    HFSet as_set() const { return HFSet::of(elements); }
};

inline constexpr std::size_t kDefaultLevelBound = 5;

/// Throws std::out_of_range when n exceeds bound.
Universe build_universe(std::size_t n, std::size_t bound = kDefaultLevelBound);

/// Finite truncation of the closure N over a base universe.
///
/// Holds the base elements, the base itself as a set, every Kuratowski pair
/// of base elements, every tuple of length 1..arity_bound over the base, the
/// ordinals the tuples index with, and everything reachable from those by
/// membership (so the element list is transitive).
struct ClosureN {
    Universe base;
    std::size_t arity_bound = 1;
    std::vector<HFSet> elements;  // ascending canonical order

    bool contains(const HFSet& x) const;
    /// Position of x in elements, if present.
    std::optional<std::size_t> index_of(const HFSet& x) const;
};

inline constexpr std::size_t kDefaultClosureBudget = 4096;

/// Throws std::invalid_argument when arity_bound == 0 and std::length_error
/// when more than budget elements would be generated.
ClosureN build_closure_N(const Universe& u, std::size_t arity_bound,
                         std::size_t budget = kDefaultClosureBudget);

}  // namespace rigid::hf
