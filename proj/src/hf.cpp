#include "rigid/hf.hpp"

#include <algorithm>
#include <set>

namespace rigid::hf {

struct HFSet::Node {
    std::vector<HFSet> members;
    std::size_t rank = 0;
    std::uint64_t hash = 0;
};

namespace {

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t kEmptyHash = 0x2545f4914f6cdd1dULL;

}  // namespace

HFSet::HFSet()
{
    static const auto empty = [] {
        auto n = std::make_shared<Node>();
        n->hash = kEmptyHash;
        return std::shared_ptr<const Node>(std::move(n));
    }();
    node_ = empty;
}

HFSet::HFSet(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

HFSet HFSet::of(std::vector<HFSet> members)
{
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.empty())
        return HFSet();

    auto n = std::make_shared<Node>();
    std::uint64_t h = kEmptyHash;
    std::size_t r = 0;
    for (const auto& m : members) {
        h = splitmix(h ^ m.hash());
        r = std::max(r, m.rank() + 1);
    }
    n->members = std::move(members);
    n->rank = r;
    n->hash = h;
    return HFSet(std::move(n));
}

std::span<const HFSet> HFSet::members() const { return node_->members; }
std::size_t HFSet::cardinality() const { return node_->members.size(); }
std::size_t HFSet::rank() const { return node_->rank; }
std::uint64_t HFSet::hash() const { return node_->hash; }

bool HFSet::contains(const HFSet& x) const
{
    const auto& ms = node_->members;
    return std::binary_search(ms.begin(), ms.end(), x);
}

Natural HFSet::code() const
{
    if (rank() > kMaxCodeRank)
        throw std::domain_error("Ackermann code of a rank " + std::to_string(rank()) +
                                " set is too large to materialize");
    Natural result = 0;
    for (const auto& m : node_->members)
        boost::multiprecision::bit_set(result, m.code().convert_to<unsigned>());
    return result;
}

std::string HFSet::to_string() const
{
    std::string out = "{";
    bool first = true;
    for (const auto& m : node_->members) {
        if (!first)
            out += ',';
        first = false;
        out += m.to_string();
    }
    out += '}';
    return out;
}

std::strong_ordering operator<=>(const HFSet& a, const HFSet& b)
{
    if (a.node_ == b.node_)
        return std::strong_ordering::equal;
    const auto& xs = a.node_->members;
    const auto& ys = b.node_->members;
    // Codes compare like binary numbers: walk the set bits from the top.
    auto xi = xs.rbegin();
    auto yi = ys.rbegin();
    for (; xi != xs.rend() && yi != ys.rend(); ++xi, ++yi) {
        auto c = *xi <=> *yi;
        if (c != 0)
            return c;
    }
    return xs.size() <=> ys.size();
}

bool operator==(const HFSet& a, const HFSet& b)
{
    if (a.node_ == b.node_)
        return true;
    if (a.node_->hash != b.node_->hash || a.node_->rank != b.node_->rank)
        return false;
    return (a <=> b) == 0;
}

namespace {

struct SetParser {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws()
    {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r'))
            ++pos;
    }

    void expect(char c)
    {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            throw ParseError(std::string("expected '") + c + "'", pos);
        ++pos;
    }

    HFSet parse()
    {
        expect('{');
        std::vector<HFSet> members;
        skip_ws();
        if (pos < text.size() && text[pos] == '}') {
            ++pos;
            return HFSet();
        }
        for (;;) {
            members.push_back(parse());
            skip_ws();
            if (pos < text.size() && text[pos] == ',') {
                ++pos;
                continue;
            }
            expect('}');
            return HFSet::of(std::move(members));
        }
    }
};

}  // namespace

HFSet parse_set(std::string_view text)
{
    SetParser p{text};
    HFSet result = p.parse();
    p.skip_ws();
    if (p.pos != text.size())
        throw ParseError("trailing input", p.pos);
    return result;
}

HFSet pair(const HFSet& x, const HFSet& y)
{
    return HFSet::of({HFSet::of({x}), HFSet::of({x, y})});
}

HFSet ordinal(std::size_t n)
{
    std::vector<HFSet> members;
    HFSet current;
    for (std::size_t i = 0; i < n; ++i) {
        members.push_back(current);
        current = HFSet::of(members);
    }
    return current;
}

HFSet tuple(std::span<const HFSet> xs)
{
    if (xs.empty())
        throw std::invalid_argument("tuple of length 0");
    std::vector<HFSet> entries;
    entries.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        entries.push_back(pair(ordinal(i), xs[i]));
    return HFSet::of(std::move(entries));
}

std::optional<std::pair<HFSet, HFSet>> as_pair(const HFSet& x)
{
    auto ms = x.members();
    if (ms.size() == 1) {
        // {{a}} = (a,a)
        if (ms[0].cardinality() != 1)
            return std::nullopt;
        return std::pair{ms[0].members()[0], ms[0].members()[0]};
    }
    if (ms.size() != 2)
        return std::nullopt;
    const HFSet* single = nullptr;
    const HFSet* doubleton = nullptr;
    for (const auto& m : ms) {
        if (m.cardinality() == 1)
            single = &m;
        else if (m.cardinality() == 2)
            doubleton = &m;
    }
    if (single == nullptr || doubleton == nullptr)
        return std::nullopt;
    const HFSet& a = single->members()[0];
    if (!doubleton->contains(a))
        return std::nullopt;
    const HFSet& b = doubleton->members()[0] == a ? doubleton->members()[1] : doubleton->members()[0];
    return std::pair{a, b};
}

std::optional<std::size_t> as_ordinal(const HFSet& x)
{
    // An ordinal of cardinality n has rank n and is exactly ordinal(n).
    if (x.rank() == x.cardinality() && ordinal(x.cardinality()) == x)
        return x.cardinality();
    return std::nullopt;
}

std::optional<std::vector<HFSet>> as_tuple(const HFSet& x)
{
    if (x.empty())
        return std::nullopt;
    std::vector<std::optional<HFSet>> slots(x.cardinality());
    for (const auto& m : x.members()) {
        auto p = as_pair(m);
        if (!p)
            return std::nullopt;
        auto i = as_ordinal(p->first);
        if (!i || *i >= slots.size() || slots[*i])
            return std::nullopt;
        slots[*i] = p->second;
    }
    std::vector<HFSet> out;
    out.reserve(slots.size());
    for (auto& s : slots)
        out.push_back(std::move(*s));
    return out;
}

bool Universe::contains(const HFSet& x) const
{
    return std::binary_search(elements.begin(), elements.end(), x);
}

Universe build_universe(std::size_t n, std::size_t bound)
{
    if (n > bound)
        throw std::out_of_range("universe level " + std::to_string(n) + " exceeds bound " + std::to_string(bound));
    Universe u;
    u.level = n;
    for (std::size_t level = 0; level < n; ++level) {
        const auto& prev = u.elements;
        const std::size_t count = std::size_t{1} << prev.size();
        std::vector<HFSet> next;
        next.reserve(count);
        // Mask i over the previous level (codes 0..|V|-1 in order) is exactly the set with code i.
        for (std::size_t mask = 0; mask < count; ++mask) {
            std::vector<HFSet> members;
            for (std::size_t j = 0; j < prev.size(); ++j)
                if ((mask >> j) & 1U)
                    members.push_back(prev[j]);
            next.push_back(HFSet::of(std::move(members)));
        }
        u.elements = std::move(next);
    }
    return u;
}

bool ClosureN::contains(const HFSet& x) const
{
    return std::binary_search(elements.begin(), elements.end(), x);
}

std::optional<std::size_t> ClosureN::index_of(const HFSet& x) const
{
    auto it = std::lower_bound(elements.begin(), elements.end(), x);
    if (it == elements.end() || *it != x)
        return std::nullopt;
    return static_cast<std::size_t>(it - elements.begin());
}

ClosureN build_closure_N(const Universe& u, std::size_t arity_bound, std::size_t budget)
{
    if (arity_bound == 0)
        throw std::invalid_argument("arity bound must be at least 1");

    const std::size_t b = u.elements.size();
    // Rough size check before generating tuples: sum_k b^k plus pairs.
    {
        std::size_t estimate = b + 1 + b * b;
        std::size_t power = 1;
        for (std::size_t k = 1; k <= arity_bound; ++k) {
            if (b != 0 && power > budget / b)
                throw std::length_error("closure exceeds budget of " + std::to_string(budget) + " elements");
            power *= b;
            estimate += power;
        }
        if (estimate > budget)
            throw std::length_error("closure exceeds budget of " + std::to_string(budget) + " elements");
    }

    std::vector<HFSet> seeds(u.elements.begin(), u.elements.end());
    seeds.push_back(u.as_set());
    for (const auto& x : u.elements)
        for (const auto& y : u.elements)
            seeds.push_back(pair(x, y));
    if (b > 0) {
        for (std::size_t i = 0; i < arity_bound; ++i)
            seeds.push_back(ordinal(i));
        std::vector<std::size_t> idx;
        for (std::size_t k = 1; k <= arity_bound; ++k) {
            idx.assign(k, 0);
            for (;;) {
                std::vector<HFSet> xs;
                xs.reserve(k);
                for (auto i : idx)
                    xs.push_back(u.elements[i]);
                seeds.push_back(tuple(xs));
                std::size_t pos = k;
                while (pos > 0 && ++idx[pos - 1] == b)
                    idx[--pos] = 0;
                if (pos == 0)
                    break;
            }
        }
    }

    std::set<HFSet> seen;
    std::vector<HFSet> stack = std::move(seeds);
    while (!stack.empty()) {
        HFSet x = std::move(stack.back());
        stack.pop_back();
        if (!seen.insert(x).second)
            continue;
        if (seen.size() > budget)
            throw std::length_error("closure exceeds budget of " + std::to_string(budget) + " elements");
        for (const auto& m : x.members())
            stack.push_back(m);
    }

    ClosureN n;
    n.base = u;
    n.arity_bound = arity_bound;
    n.elements.assign(seen.begin(), seen.end());
    return n;
}

}  // namespace rigid::hf
