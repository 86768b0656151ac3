#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rigid/digraph.hpp"

namespace rigid::endo {

enum class Mode { FindOne, EnumerateAll, Count };

struct SearchConstraints {
    std::vector<VertexId> must_fix;
    /// At least one of these vertices must move.
    std::vector<VertexId> must_move;
    /// Partial map imposed on the search.
    std::vector<std::pair<VertexId, VertexId>> forced;
    /// Each listed vertex set must be mapped into itself.
    std::vector<std::vector<VertexId>> closed_parts;
    Mode mode = Mode::EnumerateAll;
    /// Exclude the identity (same as must_move = all vertices).
    bool nontrivial_only = false;
    /// Only bijections whose inverse is a homomorphism.
    bool injective = false;
};

class ConstraintError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// 0 means unlimited for both limits.
struct Budget {
    std::uint64_t max_nodes = 0;
    double max_seconds = 0;
    unsigned threads = 1;
    /// Arc consistency and the clique count check. Off gives plain backtracking
    /// with consistency checks against already assigned neighbours.
    bool propagate = true;
};

struct SearchStats {
    std::uint64_t nodes = 0;
    std::uint64_t prunes = 0;
    std::uint64_t solutions = 0;
    double seconds = 0;
    /// The whole search space was explored (or FindOne stopped on a solution).
    bool exhausted = false;
};

struct SearchResult {
    /// Sorted by image vector; empty in Count mode.
    std::vector<VertexMap> maps;
    SearchStats stats;
};

/// Throws ConstraintError when constraints are malformed (ids out of range,
/// must_fix meeting must_move, forced contradicting must_fix).
SearchResult enumerate_endomorphisms(const Digraph& g, const SearchConstraints& c, const Budget& b = {});

enum class Verdict { Found, None, Inconclusive };

struct FindResult {
    Verdict verdict = Verdict::Inconclusive;
    std::optional<VertexMap> witness;
    SearchStats stats;
};

FindResult find_nontrivial_endomorphism(const Digraph& g, const Budget& b = {});

SearchResult enumerate_automorphisms(const Digraph& g, const Budget& b = {});

/// Whether h is an endomorphism of g meeting every constraint (mode ignored).
bool satisfies_constraints(const VertexMap& h, const Digraph& g, const SearchConstraints& c);

inline constexpr std::size_t kOracleCap = 8;

/// All n^n maps filtered by satisfies_constraints, sorted. Throws std::length_error above the cap.
std::vector<VertexMap> naive_oracle(const Digraph& g, const SearchConstraints& c, std::size_t cap = kOracleCap);

/// Each possible arrow (loops included when asked) independently with the given probability.
Digraph random_digraph(std::size_t n, double density, std::mt19937_64& rng, bool loops = true);

struct DiffConfig {
    std::size_t graphs = 100;
    std::size_t max_vertices = 7;
    std::uint64_t seed = 1;
    /// Used round-robin.
    std::vector<double> densities{0.2, 0.5, 0.8};
};

struct DiffReport {
    std::size_t graphs = 0;
    std::size_t endo_mismatches = 0;
    std::size_t auto_mismatches = 0;
    /// Total endomorphisms and automorphisms seen, for the report.
    std::size_t endomorphisms = 0;
    std::size_t automorphisms = 0;
    std::vector<std::string> details;
};

/// Solver against naive_oracle on seeded random digraphs. Each graph is also
/// searched without propagation and with two threads; any disagreement counts.
/// Throws std::length_error when max_vertices exceeds the oracle cap.
DiffReport oracle_differential(const DiffConfig& cfg);

}  // namespace rigid::endo
