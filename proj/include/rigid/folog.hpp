#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rigid/hf.hpp"

namespace rigid::folog {

enum class Connective { In, Eq, Not, And, Or, Implies, Exists, Forall };

/// Formula of the first-order language with a single binary relation symbol.
///
/// Immutable; free variables are listed in order of first occurrence and this
/// order fixes the argument positions a_1, ..., a_m.
class Formula {
public:
    static Formula member(std::string lhs, std::string rhs);
    static Formula equal(std::string lhs, std::string rhs);
    static Formula negation(Formula f);
    static Formula conjunction(Formula l, Formula r);
    static Formula disjunction(Formula l, Formula r);
    static Formula implication(Formula l, Formula r);
    static Formula exists(std::string var, Formula body);
    static Formula forall(std::string var, Formula body);

    Connective kind() const;
    bool is_atom() const { return kind() == Connective::In || kind() == Connective::Eq; }
    bool is_quantifier() const { return kind() == Connective::Exists || kind() == Connective::Forall; }

    /// Atom operands.
    const std::string& lhs() const;
    const std::string& rhs() const;
    /// Variable bound by a quantifier.
    const std::string& bound_variable() const;
    std::span<const Formula> operands() const;

    std::span<const std::string> free_variables() const;
    std::size_t arity() const { return free_variables().size(); }

    /// Surface syntax accepted by parse().
    std::string to_string() const;

    friend bool operator==(const Formula& a, const Formula& b);

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Formula binary(Connective k, Formula l, Formula r);
    std::shared_ptr<const Node> node_;
};

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& what, std::size_t position)
        : std::runtime_error("syntax error at position " + std::to_string(position) + ": " + what),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Grammar:
///   formula := ('exists' | 'forall') var '.' formula | imp
///   imp     := or ['->' formula]          (right associative)
///   or      := and ('|' and)*
///   and     := unary ('&' unary)*
///   unary   := '!' unary | '(' formula ')' | var 'in' var | var '=' var | quantified formula
/// Variables are [A-Za-z_][A-Za-z0-9_]* other than the keywords.
Formula parse(std::string_view text);

/// Equal up to renaming of bound variables; free variables are compared by position.
bool alpha_equivalent(const Formula& a, const Formula& b);

struct GodelNumber {
    hf::Natural value;
    friend bool operator==(const GodelNumber& a, const GodelNumber& b) { return a.value == b.value; }
    friend bool operator<(const GodelNumber& a, const GodelNumber& b) { return a.value < b.value; }
    std::string to_string() const { return value.str(); }
};

/// Injective on alpha-equivalence classes: the de Bruijn form is serialized
/// over a fixed byte alphabet and read as a base-256 natural.
GodelNumber godel_number(const Formula& f);

/// Throws std::invalid_argument when n is not the number of any formula.
/// Free variables come back as a1..am, bound ones as b1, b2, ... by depth.
Formula decode(const GodelNumber& n);

/// Finite structure with one binary relation over hereditarily finite sets.
class FOStructure {
public:
    FOStructure(std::vector<hf::HFSet> domain, std::vector<std::pair<std::size_t, std::size_t>> relation);

    /// (domain, membership).
    static FOStructure membership(std::span<const hf::HFSet> domain);

    std::size_t size() const { return domain_.size(); }
    const hf::HFSet& element(std::size_t i) const { return domain_.at(i); }
    std::span<const hf::HFSet> domain() const { return domain_; }
    bool related(std::size_t a, std::size_t b) const { return relation_[a * domain_.size() + b]; }
    std::optional<std::size_t> index_of(const hf::HFSet& x) const;

private:
    std::vector<hf::HFSet> domain_;
    std::vector<bool> relation_;
};

inline constexpr std::size_t kMaxDenseStructure = 4096;

class AssignmentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Reusable evaluator for one formula over one structure. Quantified
/// subformulas are memoized on the values of their free variables, so
/// evaluating a formula on every argument tuple stays cheap.
class Evaluator {
public:
    Evaluator(const FOStructure& s, const Formula& f);
    ~Evaluator();
    Evaluator(Evaluator&&) noexcept;
    Evaluator& operator=(Evaluator&&) noexcept;

    /// args[i] is the domain index assigned to the i-th free variable.
    bool operator()(std::span<const std::size_t> args);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Tarskian satisfaction. Throws AssignmentError if a free variable is unassigned
/// or mapped outside the domain.
bool satisfies(const FOStructure& s, const Formula& f,
               const std::unordered_map<std::string, std::size_t>& assignment);

inline constexpr std::size_t kNumeralBound = 8;

/// One free variable a1; true exactly of the von Neumann ordinal m in every
/// transitive structure (V_n, in) that contains it.
Formula numeral_formula(std::size_t m, std::size_t bound = kNumeralBound);

/// Fixed structural formulas used by the built-in catalog.
Formula emptiness_formula();
Formula transitivity_formula();
Formula member_formula();
Formula equality_formula();
Formula subset_formula();
Formula successor_formula();

struct CatalogEntry {
    std::size_t index = 0;
    std::string name;
    Formula formula;
    GodelNumber godel;
};

using Catalog = std::vector<CatalogEntry>;

/// Numerals 0..max(level, max_arity)-1, then the structural formulas of arity
/// <= max_arity, then extras. Entries with an equal Goedel number are dropped
/// after their first occurrence. Throws std::invalid_argument when max_arity == 0.
Catalog formula_catalog(const hf::Universe& u, std::size_t max_arity, std::span<const Formula> extra = {});

/// One line per entry: index, Goedel number, arity, name, formula text (tab separated).
std::string render_manifest(const Catalog& c);

/// Reads formulas one per line; blank lines and lines starting with '#' are skipped.
std::vector<Formula> parse_formula_list(std::string_view text);

}  // namespace rigid::folog
