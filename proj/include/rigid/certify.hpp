#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rigid/digraph.hpp"
#include "rigid/endosearch.hpp"
#include "rigid/folog.hpp"
#include "rigid/gadgets.hpp"

namespace rigid::certify {

inline constexpr const char* kToolVersion = "0.3.0";

enum class Claim { StronglyRigid, Rigid, NotStronglyRigid, NotRigid, Inconclusive };

/// "strongly-rigid", "rigid", "not-strongly-rigid", "not-rigid", "inconclusive".
std::string_view to_string(Claim c);
std::optional<Claim> claim_from_string(std::string_view s);

enum class Outcome { Pass, Fail, Skipped };
std::string_view to_string(Outcome o);

struct LemmaResult {
    std::string name;
    Outcome outcome = Outcome::Skipped;
    std::string detail;
};

using LemmaTable = std::vector<LemmaResult>;

/// Entry by name, or nullptr.
const LemmaResult* find_lemma(const LemmaTable& t, std::string_view name);
/// No entry failed.
bool no_failures(const LemmaTable& t);
nlohmann::json to_json(const LemmaTable& t);

/// FindOne stops at the first nontrivial map; Enumerate lists every endomorphism
/// and prefers a bijective witness.
enum class CertMode { FindOne, Enumerate };

struct CertifyOptions {
    endo::Budget budget;
    CertMode mode = CertMode::FindOne;
};

/// Induced map on the encoded sets: cell x goes to cell y iff h sends the N
/// representatives of x into those of y.
struct ExtractedMap {
    /// Image cell index for every cell of the gadget.
    std::vector<std::size_t> on_cells;
    /// Cell indices of the base universe, ascending.
    std::vector<std::size_t> base_cells;
    /// Classes were involved (the map is the quotient j).
    bool quotient = false;

    bool is_identity() const;
    /// j maps every base element into the base.
    bool base_closed(const gadgets::GadgetGraph& g) const;
    bool identity_on_base() const;
};

class ExtractionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws ExtractionError if an N vertex leaves N or a class splits over several classes.
ExtractedMap extract_embedding(const gadgets::GadgetGraph& g, const VertexMap& h);

nlohmann::json to_json(const ExtractedMap& j, const gadgets::GadgetGraph& g);

struct Certificate {
    std::string graph_hash;
    std::string kind;
    std::size_t vertices = 0;
    std::size_t arrows = 0;
    /// "endomorphisms" or "automorphisms".
    std::string question;
    CertMode mode = CertMode::FindOne;
    Claim claim = Claim::Inconclusive;
    std::optional<VertexMap> witness;
    /// Number of maps listed in Enumerate mode.
    std::optional<std::size_t> enumerated;
    /// Battery on the witness, or on the identity for positive claims.
    LemmaTable lemmas;
    /// Quotient of the witness when it can be extracted.
    std::optional<ExtractedMap> extracted;
    std::string extraction_error;
    std::string catalog_manifest;
    endo::SearchStats stats;
    endo::Budget budget;
};

Certificate certify_strong_rigidity(const gadgets::GadgetGraph& g, const CertifyOptions& opt = {});
Certificate certify_rigidity(const gadgets::GadgetGraph& g, const CertifyOptions& opt = {});

/// Wall time is left out unless asked for, so equal runs give equal documents.
nlohmann::json to_json(const Certificate& c, const gadgets::GadgetGraph& g, bool with_timing = false);
std::string summary(const Certificate& c);

struct BatteryOptions {
    /// Evaluate maps that are not endomorphisms (negative controls).
    bool allow_non_homomorphism = false;
};

class NotEndomorphismError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// anchors_fixed (chain_top_fixed on chain gadgets), tags_fixed, parts_closed,
/// copy_coherence, injective_on_N, finite_sets_preserved, pairs_preserved,
/// tuples_preserved, naturals_fixed, base_universe_preserved, class_coherence,
/// within_class_identity. Checks that do not apply to the gadget are Skipped.
LemmaTable check_lemma_battery(const gadgets::GadgetGraph& g, const VertexMap& h, const BatteryOptions& opt = {});

struct Counterexample {
    std::size_t formula_index = 0;
    std::string formula;
    std::vector<std::size_t> tuple;
};

struct ElementarityResult {
    bool holds = true;
    std::optional<Counterexample> counterexample;
};

/// j[i] is the image of domain element i. Every catalog formula must have the
/// same truth value on each tuple and on its image. Throws std::invalid_argument
/// when j is not a map from the domain into itself.
ElementarityResult check_elementarity(const folog::FOStructure& m, std::span<const std::size_t> j,
                                      const folog::Catalog& catalog);

/// Result of checking a property on every endomorphism of a gadget.
struct SweepReport {
    std::string name;
    bool exhausted = false;
    std::size_t checked = 0;
    /// One line per failing endomorphism.
    std::vector<std::string> failures;
    endo::SearchStats stats;

    bool passed() const { return exhausted && failures.empty() && checked > 0; }
};

nlohmann::json to_json(const SweepReport& r);

/// Every endomorphism keeping N, N^{c1}, N^{c2} closed is coherent across
/// copies and injective on N.
SweepReport check_prop62(const gadgets::GadgetGraph& g, const endo::Budget& b = {});

/// Every endomorphism fixes the chain top and maps the chain strictly increasingly into itself.
SweepReport check_chain_top_fixed(const gadgets::GadgetGraph& g, const endo::Budget& b = {});

/// Every endomorphism has an extractable map that is elementary on the base
/// universe for the gadget catalog and is the identity there.
SweepReport check_elementarity_sweep(const gadgets::GadgetGraph& g, const endo::Budget& b = {});

}  // namespace rigid::certify
