#include "rigid/folog.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <sstream>

namespace rigid::folog {

struct Formula::Node {
    Connective kind;
    std::string a, b;  // atom operands, or the bound variable in a
    std::vector<Formula> children;
    std::vector<std::string> free;
};

namespace {

void append_new(std::vector<std::string>& into, std::span<const std::string> from, const std::string* skip = nullptr)
{
    for (const auto& v : from) {
        if (skip != nullptr && v == *skip)
            continue;
        if (std::find(into.begin(), into.end(), v) == into.end())
            into.push_back(v);
    }
}

bool is_keyword(std::string_view s) { return s == "in" || s == "exists" || s == "forall"; }

bool valid_variable(std::string_view s)
{
    if (s.empty() || is_keyword(s))
        return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

void require_variable(const std::string& s)
{
    if (!valid_variable(s))
        throw std::invalid_argument("invalid variable name '" + s + "'");
}

}  // namespace

Formula Formula::member(std::string lhs, std::string rhs)
{
    require_variable(lhs);
    require_variable(rhs);
    auto n = std::make_shared<Node>();
    n->kind = Connective::In;
    n->free.push_back(lhs);
    if (rhs != lhs)
        n->free.push_back(rhs);
    n->a = std::move(lhs);
    n->b = std::move(rhs);
    return Formula(std::move(n));
}

Formula Formula::equal(std::string lhs, std::string rhs)
{
    auto f = member(std::move(lhs), std::move(rhs));
    auto n = std::make_shared<Node>(*f.node_);
    n->kind = Connective::Eq;
    return Formula(std::move(n));
}

Formula Formula::negation(Formula f)
{
    auto n = std::make_shared<Node>();
    n->kind = Connective::Not;
    n->free = f.node_->free;
    n->children.push_back(std::move(f));
    return Formula(std::move(n));
}

Formula Formula::binary(Connective k, Formula l, Formula r)
{
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->free = l.node_->free;
    append_new(n->free, r.node_->free);
    n->children.push_back(std::move(l));
    n->children.push_back(std::move(r));
    return Formula(std::move(n));
}

Formula Formula::conjunction(Formula l, Formula r) { return binary(Connective::And, std::move(l), std::move(r)); }
Formula Formula::disjunction(Formula l, Formula r) { return binary(Connective::Or, std::move(l), std::move(r)); }
Formula Formula::implication(Formula l, Formula r) { return binary(Connective::Implies, std::move(l), std::move(r)); }

Formula Formula::exists(std::string var, Formula body)
{
    require_variable(var);
    auto n = std::make_shared<Node>();
    n->kind = Connective::Exists;
    append_new(n->free, body.free_variables(), &var);
    n->a = std::move(var);
    n->children.push_back(std::move(body));
    return Formula(std::move(n));
}

Formula Formula::forall(std::string var, Formula body)
{
    auto f = exists(std::move(var), std::move(body));
    auto n = std::make_shared<Node>(*f.node_);
    n->kind = Connective::Forall;
    return Formula(std::move(n));
}

Connective Formula::kind() const { return node_->kind; }

const std::string& Formula::lhs() const
{
    if (!is_atom())
        throw std::logic_error("lhs() on a non-atomic formula");
    return node_->a;
}

const std::string& Formula::rhs() const
{
    if (!is_atom())
        throw std::logic_error("rhs() on a non-atomic formula");
    return node_->b;
}

const std::string& Formula::bound_variable() const
{
    if (!is_quantifier())
        throw std::logic_error("bound_variable() on an unquantified formula");
    return node_->a;
}

std::span<const Formula> Formula::operands() const { return node_->children; }
std::span<const std::string> Formula::free_variables() const { return node_->free; }

bool operator==(const Formula& x, const Formula& y)
{
    if (x.node_ == y.node_)
        return true;
    const auto& a = *x.node_;
    const auto& b = *y.node_;
    return a.kind == b.kind && a.a == b.a && a.b == b.b && a.children == b.children;
}

namespace {

enum class Position { Top, Operand };

std::string render(const Formula& f, Position pos)
{
    auto binary = [&](std::string_view op) {
        auto ops = f.operands();
        std::string s = render(ops[0], Position::Operand) + " " + std::string(op) + " " + render(ops[1], Position::Operand);
        return pos == Position::Top ? s : "(" + s + ")";
    };
    switch (f.kind()) {
    case Connective::In:
        return f.lhs() + " in " + f.rhs();
    case Connective::Eq:
        return f.lhs() + " = " + f.rhs();
    case Connective::Not: {
        const auto& c = f.operands()[0];
        if (c.is_atom())
            return "!(" + render(c, Position::Top) + ")";
        return "!" + render(c, Position::Operand);
    }
    case Connective::And:
        return binary("&");
    case Connective::Or:
        return binary("|");
    case Connective::Implies:
        return binary("->");
    case Connective::Exists:
    case Connective::Forall: {
        std::string s = std::string(f.kind() == Connective::Exists ? "exists " : "forall ") + f.bound_variable() + " . " +
                        render(f.operands()[0], Position::Top);
        return pos == Position::Top ? s : "(" + s + ")";
    }
    }
    return {};
}

}  // namespace

std::string Formula::to_string() const { return render(*this, Position::Top); }

namespace {

struct Token {
    enum Kind { Ident, Bang, Amp, Bar, Arrow, Eq, LParen, RParen, Dot, End } kind;
    std::string text;
    std::size_t pos;
};

std::vector<Token> tokenize(std::string_view s)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            out.push_back({Token::Ident, std::string(s.substr(i, j - i)), i});
            i = j;
            continue;
        }
        switch (c) {
        case '!': out.push_back({Token::Bang, "!", i}); ++i; continue;
        case '&': out.push_back({Token::Amp, "&", i}); ++i; continue;
        case '|': out.push_back({Token::Bar, "|", i}); ++i; continue;
        case '=': out.push_back({Token::Eq, "=", i}); ++i; continue;
        case '(': out.push_back({Token::LParen, "(", i}); ++i; continue;
        case ')': out.push_back({Token::RParen, ")", i}); ++i; continue;
        case '.': out.push_back({Token::Dot, ".", i}); ++i; continue;
        case '-':
            if (i + 1 < s.size() && s[i + 1] == '>') {
                out.push_back({Token::Arrow, "->", i});
                i += 2;
                continue;
            }
            break;
        default:
            break;
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({Token::End, "", s.size()});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Formula parse_all()
    {
        Formula f = formula();
        if (peek().kind != Token::End)
            throw SyntaxError("unexpected '" + peek().text + "'", peek().pos);
        return f;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    Token take() { return toks_[pos_++]; }

    bool at_quantifier() const
    {
        return peek().kind == Token::Ident && (peek().text == "exists" || peek().text == "forall");
    }

    std::string variable()
    {
        const Token& t = peek();
        if (t.kind != Token::Ident || is_keyword(t.text))
            throw SyntaxError("expected a variable", t.pos);
        return take().text;
    }

    Formula formula()
    {
        if (at_quantifier())
            return quantified();
        Formula left = disjunction();
        if (peek().kind == Token::Arrow) {
            take();
            return Formula::implication(std::move(left), formula());
        }
        return left;
    }

    Formula quantified()
    {
        bool is_exists = take().text == "exists";
        std::string var = variable();
        if (peek().kind != Token::Dot)
            throw SyntaxError("expected '.' after quantified variable", peek().pos);
        take();
        Formula body = formula();
        return is_exists ? Formula::exists(std::move(var), std::move(body)) : Formula::forall(std::move(var), std::move(body));
    }

    Formula disjunction()
    {
        Formula f = conjunction();
        while (peek().kind == Token::Bar) {
            take();
            f = Formula::disjunction(std::move(f), conjunction());
        }
        return f;
    }

    Formula conjunction()
    {
        Formula f = unary();
        while (peek().kind == Token::Amp) {
            take();
            f = Formula::conjunction(std::move(f), unary());
        }
        return f;
    }

    Formula unary()
    {
        const Token& t = peek();
        if (t.kind == Token::Bang) {
            take();
            return Formula::negation(unary());
        }
        if (t.kind == Token::LParen) {
            take();
            Formula f = formula();
            if (peek().kind != Token::RParen)
                throw SyntaxError("expected ')'", peek().pos);
            take();
            return f;
        }
        if (at_quantifier())
            return quantified();
        std::string lhs = variable();
        const Token& op = peek();
        if (op.kind == Token::Eq) {
            take();
            return Formula::equal(std::move(lhs), variable());
        }
        if (op.kind == Token::Ident && op.text == "in") {
            take();
            return Formula::member(std::move(lhs), variable());
        }
        throw SyntaxError("expected 'in' or '='", op.pos);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

Formula parse(std::string_view text)
{
    return Parser(tokenize(text)).parse_all();
}

namespace {

// Byte alphabet of the de Bruijn serialization.
constexpr unsigned char kIn = 'E', kEq = 'Q', kNot = 'N', kAnd = 'C', kOr = 'D', kImp = 'I', kEx = 'X', kAll = 'A';
constexpr unsigned char kBound = 'b', kFree = 'f';

void serialize(const Formula& f, std::vector<std::string>& bound, std::span<const std::string> free,
               std::vector<unsigned char>& out)
{
    auto term = [&](const std::string& v) {
        for (std::size_t i = bound.size(); i-- > 0;)
            if (bound[i] == v) {
                std::size_t idx = bound.size() - 1 - i;
                if (idx > 255)
                    throw std::length_error("quantifier nesting too deep to encode");
                out.push_back(kBound);
                out.push_back(static_cast<unsigned char>(idx));
                return;
            }
        auto it = std::find(free.begin(), free.end(), v);
        std::size_t pos = static_cast<std::size_t>(it - free.begin());
        if (pos > 255)
            throw std::length_error("too many free variables to encode");
        out.push_back(kFree);
        out.push_back(static_cast<unsigned char>(pos));
    };
    switch (f.kind()) {
    case Connective::In:
    case Connective::Eq:
        out.push_back(f.kind() == Connective::In ? kIn : kEq);
        term(f.lhs());
        term(f.rhs());
        return;
    case Connective::Not:
        out.push_back(kNot);
        serialize(f.operands()[0], bound, free, out);
        return;
    case Connective::And:
    case Connective::Or:
    case Connective::Implies:
        out.push_back(f.kind() == Connective::And ? kAnd : f.kind() == Connective::Or ? kOr : kImp);
        serialize(f.operands()[0], bound, free, out);
        serialize(f.operands()[1], bound, free, out);
        return;
    case Connective::Exists:
    case Connective::Forall:
        out.push_back(f.kind() == Connective::Exists ? kEx : kAll);
        bound.push_back(f.bound_variable());
        serialize(f.operands()[0], bound, free, out);
        bound.pop_back();
        return;
    }
}

std::vector<unsigned char> debruijn_bytes(const Formula& f)
{
    std::vector<std::string> bound;
    std::vector<unsigned char> out;
    serialize(f, bound, f.free_variables(), out);
    return out;
}

class Decoder {
public:
    explicit Decoder(std::vector<unsigned char> bytes) : bytes_(std::move(bytes)) {}

    Formula run()
    {
        Formula f = node(0);
        if (pos_ != bytes_.size())
            fail();
        return f;
    }

private:
    [[noreturn]] void fail() const { throw std::invalid_argument("not the number of a formula"); }

    unsigned char next()
    {
        if (pos_ >= bytes_.size())
            fail();
        return bytes_[pos_++];
    }

    std::string term(std::size_t depth)
    {
        unsigned char k = next();
        std::size_t i = next();
        if (k == kBound) {
            if (i >= depth)
                fail();
            return "b" + std::to_string(depth - i);
        }
        if (k != kFree)
            fail();
        // Free variables must appear in first-occurrence order.
        if (i > free_seen_)
            fail();
        if (i == free_seen_)
            ++free_seen_;
        return "a" + std::to_string(i + 1);
    }

    Formula node(std::size_t depth)
    {
        unsigned char k = next();
        switch (k) {
        case kIn:
        case kEq: {
            std::string l = term(depth);
            std::string r = term(depth);
            return k == kIn ? Formula::member(std::move(l), std::move(r)) : Formula::equal(std::move(l), std::move(r));
        }
        case kNot:
            return Formula::negation(node(depth));
        case kAnd:
        case kOr:
        case kImp: {
            Formula l = node(depth);
            Formula r = node(depth);
            if (k == kAnd)
                return Formula::conjunction(std::move(l), std::move(r));
            if (k == kOr)
                return Formula::disjunction(std::move(l), std::move(r));
            return Formula::implication(std::move(l), std::move(r));
        }
        case kEx:
        case kAll: {
            std::string var = "b" + std::to_string(depth + 1);
            Formula body = node(depth + 1);
            return k == kEx ? Formula::exists(std::move(var), std::move(body)) : Formula::forall(std::move(var), std::move(body));
        }
        default:
            fail();
        }
    }

    std::vector<unsigned char> bytes_;
    std::size_t pos_ = 0;
    std::size_t free_seen_ = 0;
};

}  // namespace

bool alpha_equivalent(const Formula& a, const Formula& b)
{
    return debruijn_bytes(a) == debruijn_bytes(b);
}

GodelNumber godel_number(const Formula& f)
{
    auto bytes = debruijn_bytes(f);
    hf::Natural n = 0;
    for (auto byte : bytes) {
        n <<= 8;
        n += byte;
    }
    return {n};
}

Formula decode(const GodelNumber& n)
{
    if (n.value <= 0)
        throw std::invalid_argument("not the number of a formula");
    std::vector<unsigned char> bytes;
    hf::Natural v = n.value;
    while (v > 0) {
        bytes.push_back(static_cast<unsigned char>(static_cast<unsigned>(v & 0xff)));
        v >>= 8;
    }
    std::reverse(bytes.begin(), bytes.end());
    return Decoder(std::move(bytes)).run();
}

FOStructure::FOStructure(std::vector<hf::HFSet> domain, std::vector<std::pair<std::size_t, std::size_t>> relation)
    : domain_(std::move(domain))
{
    if (domain_.size() > kMaxDenseStructure)
        throw std::length_error("structure of " + std::to_string(domain_.size()) + " elements is too large");
    relation_.assign(domain_.size() * domain_.size(), false);
    for (auto [a, b] : relation) {
        if (a >= domain_.size() || b >= domain_.size())
            throw std::out_of_range("relation pair outside the domain");
        relation_[a * domain_.size() + b] = true;
    }
}

FOStructure FOStructure::membership(std::span<const hf::HFSet> domain)
{
    std::vector<hf::HFSet> elems(domain.begin(), domain.end());
    std::vector<std::pair<std::size_t, std::size_t>> rel;
    for (std::size_t i = 0; i < elems.size(); ++i)
        for (std::size_t j = 0; j < elems.size(); ++j)
            if (elems[j].contains(elems[i]))
                rel.emplace_back(i, j);
    return FOStructure(std::move(elems), std::move(rel));
}

std::optional<std::size_t> FOStructure::index_of(const hf::HFSet& x) const
{
    for (std::size_t i = 0; i < domain_.size(); ++i)
        if (domain_[i] == x)
            return i;
    return std::nullopt;
}

struct Evaluator::Impl {
    struct Op {
        Connective kind;
        std::size_t a = 0, b = 0;          // slots of atom operands; a is the bound slot of a quantifier
        std::size_t left = 0, right = 0;   // child op indices
        std::vector<std::size_t> free;     // slots free in this subformula (quantifiers only)
    };

    struct KeyHash {
        std::size_t operator()(const std::vector<std::uint32_t>& k) const
        {
            std::size_t h = 0xcbf29ce484222325ULL;
            for (auto x : k)
                h = (h ^ x) * 0x100000001b3ULL;
            return h;
        }
    };

    const FOStructure* s;
    std::size_t arity;
    std::vector<Op> ops;
    std::size_t root = 0;
    std::vector<std::size_t> env;
    std::vector<std::unordered_map<std::vector<std::uint32_t>, bool, KeyHash>> memo;

    Impl(const FOStructure& st, const Formula& f) : s(&st), arity(f.arity())
    {
        std::vector<std::pair<std::string, std::size_t>> scope;
        std::size_t next_slot = arity;
        for (std::size_t i = 0; i < arity; ++i)
            scope.emplace_back(f.free_variables()[i], i);
        root = compile(f, scope, next_slot);
        env.assign(next_slot, 0);
        memo.resize(ops.size());
    }

    static std::size_t lookup(const std::vector<std::pair<std::string, std::size_t>>& scope, const std::string& v)
    {
        for (std::size_t i = scope.size(); i-- > 0;)
            if (scope[i].first == v)
                return scope[i].second;
        throw std::logic_error("unresolved variable " + v);
    }

    std::size_t compile(const Formula& f, std::vector<std::pair<std::string, std::size_t>>& scope, std::size_t& next_slot)
    {
        Op op;
        op.kind = f.kind();
        switch (f.kind()) {
        case Connective::In:
        case Connective::Eq:
            op.a = lookup(scope, f.lhs());
            op.b = lookup(scope, f.rhs());
            break;
        case Connective::Not:
            op.left = compile(f.operands()[0], scope, next_slot);
            break;
        case Connective::And:
        case Connective::Or:
        case Connective::Implies:
            op.left = compile(f.operands()[0], scope, next_slot);
            op.right = compile(f.operands()[1], scope, next_slot);
            break;
        case Connective::Exists:
        case Connective::Forall: {
            op.a = next_slot++;
            for (const auto& v : f.free_variables())
                op.free.push_back(lookup(scope, v));
            scope.emplace_back(f.bound_variable(), op.a);
            op.left = compile(f.operands()[0], scope, next_slot);
            scope.pop_back();
            break;
        }
        }
        ops.push_back(std::move(op));
        return ops.size() - 1;
    }

    bool eval(std::size_t i)
    {
        const Op& op = ops[i];
        switch (op.kind) {
        case Connective::In:
            return s->related(env[op.a], env[op.b]);
        case Connective::Eq:
            return env[op.a] == env[op.b];
        case Connective::Not:
            return !eval(op.left);
        case Connective::And:
            return eval(op.left) && eval(op.right);
        case Connective::Or:
            return eval(op.left) || eval(op.right);
        case Connective::Implies:
            return !eval(op.left) || eval(op.right);
        case Connective::Exists:
        case Connective::Forall: {
            std::vector<std::uint32_t> key;
            key.reserve(op.free.size());
            for (auto slot : op.free)
                key.push_back(static_cast<std::uint32_t>(env[slot]));
            auto& table = memo[i];
            if (auto it = table.find(key); it != table.end())
                return it->second;
            const bool want = op.kind == Connective::Exists;
            bool result = !want;
            for (std::size_t d = 0; d < s->size(); ++d) {
                env[op.a] = d;
                if (eval(op.left) == want) {
                    result = want;
                    break;
                }
            }
            table.emplace(std::move(key), result);
            return result;
        }
        }
        return false;
    }
};

Evaluator::Evaluator(const FOStructure& s, const Formula& f) : impl_(std::make_unique<Impl>(s, f)) {}
Evaluator::~Evaluator() = default;
Evaluator::Evaluator(Evaluator&&) noexcept = default;
Evaluator& Evaluator::operator=(Evaluator&&) noexcept = default;

bool Evaluator::operator()(std::span<const std::size_t> args)
{
    if (args.size() != impl_->arity)
        throw AssignmentError("expected " + std::to_string(impl_->arity) + " arguments, got " + std::to_string(args.size()));
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] >= impl_->s->size())
            throw AssignmentError("argument outside the domain");
        impl_->env[i] = args[i];
    }
    return impl_->eval(impl_->root);
}

bool satisfies(const FOStructure& s, const Formula& f, const std::unordered_map<std::string, std::size_t>& assignment)
{
    std::vector<std::size_t> args;
    for (const auto& v : f.free_variables()) {
        auto it = assignment.find(v);
        if (it == assignment.end())
            throw AssignmentError("free variable " + v + " is not assigned");
        args.push_back(it->second);
    }
    Evaluator eval(s, f);
    return eval(args);
}

namespace {

/// x = y u {y}, written so that y occurs first.
Formula successor_of(const std::string& y, const std::string& x, const std::string& z)
{
    auto in_succ = Formula::disjunction(Formula::member(z, y), Formula::equal(z, y));
    return Formula::forall(z, Formula::conjunction(Formula::implication(in_succ, Formula::member(z, x)),
                                                   Formula::implication(Formula::member(z, x), in_succ)));
}

Formula numeral_over(std::size_t m, const std::string& x)
{
    if (m == 0)
        return Formula::forall("q0", Formula::negation(Formula::member("q0", x)));
    std::string p = "p" + std::to_string(m);
    std::string q = "q" + std::to_string(m);
    return Formula::exists(p, Formula::conjunction(numeral_over(m - 1, p), successor_of(p, x, q)));
}

}  // namespace

Formula numeral_formula(std::size_t m, std::size_t bound)
{
    if (m > bound)
        throw std::out_of_range("numeral " + std::to_string(m) + " exceeds bound " + std::to_string(bound));
    return numeral_over(m, "a1");
}

Formula emptiness_formula() { return parse("forall y . !(y in a1)"); }

Formula transitivity_formula() { return parse("forall y . forall z . ((y in a1 & z in y) -> z in a1)"); }

Formula member_formula() { return parse("a1 in a2"); }

Formula equality_formula() { return parse("a1 = a2"); }

Formula subset_formula() { return parse("forall z . (z in a1 -> z in a2)"); }

Formula successor_formula() { return successor_of("a1", "a2", "z"); }

Catalog formula_catalog(const hf::Universe& u, std::size_t max_arity, std::span<const Formula> extra)
{
    if (max_arity == 0)
        throw std::invalid_argument("catalog arity bound must be at least 1");
    std::vector<std::pair<std::string, Formula>> candidates;
    const std::size_t numerals = std::max(u.level, max_arity);
    for (std::size_t m = 0; m < numerals; ++m)
        candidates.emplace_back("numeral-" + std::to_string(m), numeral_formula(m, std::max(numerals, kNumeralBound)));
    candidates.emplace_back("empty", emptiness_formula());
    candidates.emplace_back("transitive", transitivity_formula());
    candidates.emplace_back("member", member_formula());
    candidates.emplace_back("equal", equality_formula());
    candidates.emplace_back("subset", subset_formula());
    candidates.emplace_back("successor", successor_formula());
    for (std::size_t i = 0; i < extra.size(); ++i)
        candidates.emplace_back("extra-" + std::to_string(i), extra[i]);

    Catalog c;
    for (auto& [name, f] : candidates) {
        if (f.arity() == 0 || f.arity() > max_arity)
            continue;
        GodelNumber g = godel_number(f);
        if (std::any_of(c.begin(), c.end(), [&](const CatalogEntry& e) { return e.godel == g; }))
            continue;
        c.push_back(CatalogEntry{c.size(), name, f, std::move(g)});
    }
    return c;
}

std::string render_manifest(const Catalog& c)
{
    std::ostringstream out;
    for (const auto& e : c)
        out << e.index << '\t' << e.godel.to_string() << '\t' << e.formula.arity() << '\t' << e.name << '\t'
            << e.formula.to_string() << '\n';
    return out.str();
}

std::vector<Formula> parse_formula_list(std::string_view text)
{
    std::vector<Formula> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(start, end - start);
        auto first = line.find_first_not_of(" \t\r");
        if (first != std::string_view::npos && line[first] != '#')
            out.push_back(parse(line));
        start = end + 1;
    }
    return out;
}

}  // namespace rigid::folog
