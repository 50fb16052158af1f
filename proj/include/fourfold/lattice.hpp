#ifndef FOURFOLD_LATTICE_HPP
#define FOURFOLD_LATTICE_HPP

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace fourfold {

// ---------------------------------------------------------------------------
// Generator symbols of a tracked sublattice of H^2.
// ---------------------------------------------------------------------------

enum class GenKind {
    canonical,
    torus,
    section,
    exceptional,
    hyperbolic_a,
    hyperbolic_b,
    generic,
};

inline std::string_view gen_kind_name(GenKind k)
{
    switch (k) {
        case GenKind::canonical: return "canonical";
        case GenKind::torus: return "torus";
        case GenKind::section: return "section";
        case GenKind::exceptional: return "exceptional";
        case GenKind::hyperbolic_a: return "hyperbolic-A";
        case GenKind::hyperbolic_b: return "hyperbolic-B";
        case GenKind::generic: return "generic";
    }
    return "generic";
}

inline std::optional<GenKind> gen_kind_from_name(std::string_view s)
{
    if (s == "canonical") return GenKind::canonical;
    if (s == "torus") return GenKind::torus;
    if (s == "section") return GenKind::section;
    if (s == "exceptional") return GenKind::exceptional;
    if (s == "hyperbolic-A") return GenKind::hyperbolic_a;
    if (s == "hyperbolic-B") return GenKind::hyperbolic_b;
    if (s == "generic") return GenKind::generic;
    return std::nullopt;
}

struct GeneratorSymbol {
    std::string id;
    GenKind kind = GenKind::generic;
    std::string origin; // construction-step tag

    friend bool operator==(const GeneratorSymbol&, const GeneratorSymbol&) = default;
};

// Default self-pairing implied by the generator kind, when not set explicitly.
inline long long default_self_pairing(GenKind k)
{
    switch (k) {
        case GenKind::torus: return 0;
        case GenKind::section: return -2;
        case GenKind::exceptional: return -1;
        case GenKind::hyperbolic_a: return 0;
        case GenKind::hyperbolic_b: return 0;
        case GenKind::canonical: return 0;
        case GenKind::generic: return 0;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// CohClass: finite integer combination of generator symbols.
// ---------------------------------------------------------------------------

/// Sparse integer vector over generator ids, kept sorted with no zero terms.
class CohClass {
public:
    using Term = std::pair<std::string, long long>;

    CohClass() = default;

    static CohClass unit(const std::string& id, long long c = 1)
    {
        CohClass r;
        if (c != 0) r.terms_.emplace_back(id, c);
        return r;
    }

    bool is_zero() const { return terms_.empty(); }

    long long coeff(const std::string& id) const
    {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), id,
                                   [](const Term& t, const std::string& k) { return t.first < k; });
        if (it != terms_.end() && it->first == id) return it->second;
        return 0;
    }

    const std::vector<Term>& terms() const { return terms_; }

    CohClass& operator+=(const CohClass& o)
    {
        if (o.terms_.empty()) return *this;
        std::vector<Term> merged;
        merged.reserve(terms_.size() + o.terms_.size());
        auto a = terms_.begin();
        auto b = o.terms_.begin();
        while (a != terms_.end() && b != o.terms_.end()) {
            if (a->first < b->first) {
                merged.push_back(*a++);
            } else if (b->first < a->first) {
                merged.push_back(*b++);
            } else {
                long long c = a->second + b->second;
                if (c != 0) merged.emplace_back(a->first, c);
                ++a;
                ++b;
            }
        }
        merged.insert(merged.end(), a, terms_.end());
        merged.insert(merged.end(), b, o.terms_.end());
        terms_ = std::move(merged);
        return *this;
    }

    friend CohClass operator+(CohClass a, const CohClass& b) { return a += b; }

    CohClass operator*(long long s) const
    {
        CohClass r;
        if (s == 0) return r;
        r.terms_.reserve(terms_.size());
        for (const auto& [id, c] : terms_) r.terms_.emplace_back(id, c * s);
        return r;
    }

    friend CohClass operator-(const CohClass& a, const CohClass& b) { return a + b * -1; }

    /// this + coeff * id, in one merge pass.
    CohClass shifted(const std::string& id, long long coeff) const
    {
        if (coeff == 0) return *this;
        CohClass r;
        r.terms_.reserve(terms_.size() + 1);
        bool placed = false;
        for (const auto& t : terms_) {
            if (!placed && id < t.first) {
                r.terms_.emplace_back(id, coeff);
                placed = true;
            }
            if (t.first == id) {
                placed = true;
                if (t.second + coeff != 0) r.terms_.emplace_back(id, t.second + coeff);
            } else {
                r.terms_.push_back(t);
            }
        }
        if (!placed) r.terms_.emplace_back(id, coeff);
        return r;
    }

    /// Rename generator ids through `ren`; ids not present map to themselves.
    CohClass renamed(const std::map<std::string, std::string>& ren) const
    {
        CohClass r;
        for (const auto& [id, c] : terms_) {
            auto it = ren.find(id);
            r += unit(it == ren.end() ? id : it->second, c);
        }
        return r;
    }

    std::string to_string() const
    {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [id, c] : terms_) {
            if (!first) os << (c >= 0 ? "+" : "");
            first = false;
            if (c == 1)
                os << id;
            else if (c == -1)
                os << "-" << id;
            else
                os << c << "*" << id;
        }
        return os.str();
    }

    auto operator<=>(const CohClass&) const = default;

private:
    std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// PairingTable: symmetric integer pairing on tracked generators.
// ---------------------------------------------------------------------------

class PairingTable {
public:
    bool has_generator(const std::string& id) const { return gens_.count(id) != 0; }

    const GeneratorSymbol& generator(const std::string& id) const
    {
        auto it = gens_.find(id);
        if (it == gens_.end()) fail(ErrorCode::UnknownGenerator, "no generator '" + id + "'");
        return it->second;
    }

    const std::map<std::string, GeneratorSymbol>& generators() const { return gens_; }

    void add_generator(GeneratorSymbol g, std::optional<long long> self = std::nullopt)
    {
        if (gens_.count(g.id))
            fail(ErrorCode::Precondition, "duplicate generator id '" + g.id + "'");
        long long s = self.value_or(default_self_pairing(g.kind));
        entries_[key(g.id, g.id)] = s;
        gens_.emplace(g.id, std::move(g));
    }

    void set_pair(const std::string& a, const std::string& b, long long v)
    {
        generator(a);
        generator(b);
        entries_[key(a, b)] = v;
    }

    /// Pairing of two generators; unspecified pairs default to 0.
    long long pair_ids(const std::string& a, const std::string& b) const
    {
        generator(a);
        generator(b);
        auto it = entries_.find(key(a, b));
        return it == entries_.end() ? 0 : it->second;
    }

    /// Bilinear extension of the table to classes.
    long long pair(const CohClass& c, const CohClass& d) const
    {
        long long total = 0;
        for (const auto& [ga, ca] : c.terms())
            for (const auto& [gb, cb] : d.terms()) total += ca * cb * pair_ids(ga, gb);
        return total;
    }

    long long square(const CohClass& c) const { return pair(c, c); }

    /// True iff pair(c,g) = pair(g,g) mod 2 for every tracked generator g.
    bool is_characteristic(const CohClass& c) const
    {
        for (const auto& [id, g] : gens_) {
            CohClass u = CohClass::unit(id);
            long long lhs = pair(c, u);
            long long rhs = pair_ids(id, id);
            if (((lhs - rhs) % 2 + 2) % 2 != 0) return false;
        }
        return true;
    }

    /// All stored pairing entries with non-zero value, cross pairs only.
    std::vector<std::tuple<std::string, std::string, long long>> cross_entries() const
    {
        std::vector<std::tuple<std::string, std::string, long long>> out;
        for (const auto& [k, v] : entries_)
            if (k.first != k.second && v != 0) out.emplace_back(k.first, k.second, v);
        return out;
    }

private:
    static std::pair<std::string, std::string> key(const std::string& a, const std::string& b)
    {
        return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
    }

    std::map<std::string, GeneratorSymbol> gens_;
    std::map<std::pair<std::string, std::string>, long long> entries_;
};

// ---------------------------------------------------------------------------
// HomeoType: (b2, signature, parity) with derived quantities.
// ---------------------------------------------------------------------------

enum class Parity { even, odd };

inline std::string_view parity_name(Parity p) { return p == Parity::even ? "even" : "odd"; }

struct HomeoType {
    long long b2 = 0;
    long long sigma = 0;
    Parity parity = Parity::even;

    long long b_plus() const { return (b2 + sigma) / 2; }
    long long euler() const { return 2 + b2; } // simply connected convention

    void validate() const
    {
        if (b2 < 0) fail(ErrorCode::Precondition, "negative b2");
        if (sigma > b2 || sigma < -b2)
            fail(ErrorCode::Precondition, "|sigma| exceeds b2");
        if (((b2 - sigma) % 2 + 2) % 2 != 0)
            fail(ErrorCode::Precondition, "sigma and b2 have different parity");
        if (parity == Parity::even && ((sigma % 8) + 8) % 8 != 0)
            fail(ErrorCode::Precondition, "even form with signature not divisible by 8");
    }

    friend bool operator==(const HomeoType&, const HomeoType&) = default;
};

// ---------------------------------------------------------------------------
// Dimension formulas.
// ---------------------------------------------------------------------------

/// (c1^2 - sigma)/4 - (1 + b+), with exact integer division.
inline long long virtual_dimension(long long c1sq, const HomeoType& h)
{
    long long num = c1sq - h.sigma;
    if (((num % 4) + 4) % 4 != 0)
        fail(ErrorCode::NonIntegralDimension,
             "c1^2 - sigma = " + std::to_string(num) + " not divisible by 4");
    return num / 4 - (1 + h.b_plus());
}

inline long long family_virtual_dimension(long long c1sq, const HomeoType& h, long long k)
{
    if (k < 0) fail(ErrorCode::Precondition, "negative parameter dimension");
    return virtual_dimension(c1sq, h) + k;
}

/// Membership in the degree-k class set: unparameterized dimension -(k+1).
inline bool shat_membership(long long c1sq, const HomeoType& h, long long k)
{
    return virtual_dimension(c1sq, h) == -(k + 1);
}

inline bool shat_membership(const CohClass& c, const PairingTable& t, const HomeoType& h, long long k)
{
    return shat_membership(t.square(c), h, k);
}

// ---------------------------------------------------------------------------
// Realizability gate for intersection forms of symplectic blocks.
// ---------------------------------------------------------------------------

struct GateResult {
    bool pass = false;
    std::string reason; // first violated clause, empty on pass
};

inline constexpr long long kDefaultRStar = 200; // threshold is a runtime configuration

inline GateResult realizability_gate(const HomeoType& h, long long r_star = kDefaultRStar)
{
    if (!(h.b2 > r_star))
        return {false, "rank " + std::to_string(h.b2) + " not above threshold " + std::to_string(r_star)};
    long long abs_sigma = h.sigma < 0 ? -h.sigma : h.sigma;
    if (!(13 * abs_sigma <= 3 * h.b2))
        return {false, "|sigma| = " + std::to_string(abs_sigma) + " exceeds (3/13) * " + std::to_string(h.b2)};
    if (h.b_plus() % 2 == 0)
        return {false, "b+ = " + std::to_string(h.b_plus()) + " is even"};
    if (h.parity == Parity::even && ((h.sigma % 16) + 16) % 16 != 0)
        return {false, "even form with sigma = " + std::to_string(h.sigma) + " not divisible by 16"};
    return {true, ""};
}

} // namespace fourfold

#endif
