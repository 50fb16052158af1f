#ifndef FOURFOLD_FAMILY_HPP
#define FOURFOLD_FAMILY_HPP

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "manifold.hpp"

namespace fourfold {

// ---------------------------------------------------------------------------
// Families of diffeomorphisms, represented by their finite invariant maps.
// ---------------------------------------------------------------------------

struct FamilyConstruction;
using FamConsPtr = std::shared_ptr<const FamilyConstruction>;

struct FamilyConstruction {
    enum class Kind { base, suspend, commutator, compose, conjugate };
    Kind kind = Kind::base;
    long long q = 0;      // base index
    int p = 0, r = 0, s = 0; // commutator target
    std::map<std::string, std::string> relabel; // conjugation record
    std::vector<FamConsPtr> children;

    static FamConsPtr base(long long q)
    {
        auto c = std::make_shared<FamilyConstruction>();
        c->kind = Kind::base;
        c->q = q;
        return c;
    }
    static FamConsPtr node(Kind k, std::vector<FamConsPtr> children)
    {
        auto c = std::make_shared<FamilyConstruction>();
        c->kind = k;
        c->children = std::move(children);
        return c;
    }
};

inline std::string family_construction_text(const FamConsPtr& c)
{
    if (!c) return "?";
    using Kind = FamilyConstruction::Kind;
    switch (c->kind) {
        case Kind::base: return "base(q=" + std::to_string(c->q) + ")";
        case Kind::suspend: return "suspend(" + family_construction_text(c->children.at(0)) + ")";
        case Kind::commutator:
            return "commstep(" + family_construction_text(c->children.at(0)) + ")";
        case Kind::compose:
            return "compose(" + family_construction_text(c->children.at(0)) + "," +
                   family_construction_text(c->children.at(1)) + ")";
        case Kind::conjugate:
            return "conjugate(" + family_construction_text(c->children.at(0)) + ")";
    }
    return "?";
}

/// A parameter-dimension-k spherical family of diffeomorphisms of `host`,
/// recorded by its finite mod-2 invariant map.
struct FamilyElement {
    std::shared_ptr<const ManifoldModel> host;
    int k = 0;
    std::set<CohClass> invariant; // classes with value 1 mod 2
    bool torelli = false;
    bool orientation_preserved = false;
    bool integer_defined = false;
    bool one_stably_trivial = false;
    long long q = 0;      // index within its collection; 0 when not applicable
    CohClass probe_base;  // evaluation classes are probe_base + 2l * probe_step
    std::string probe_step;
    FamConsPtr construction;

    CohClass probe(long long ell) const
    {
        return probe_base + CohClass::unit(probe_step, 2 * ell);
    }
};

struct EvalResult {
    int value = 0; // mod 2
    bool integer_defined = false;
};

inline EvalResult evaluate(const FamilyElement& f, const CohClass& c)
{
    if (!shat_membership(c, f.host->lattice, f.host->homeo, f.k))
        fail(ErrorCode::DimensionMismatch,
             "class " + c.to_string() + " is not in the degree-" + std::to_string(f.k) +
                 " class set of " + f.host->name);
    return {f.invariant.count(c) ? 1 : 0, f.integer_defined};
}

// ---------------------------------------------------------------------------
// Base families on level-0 hosts.
// ---------------------------------------------------------------------------

namespace detail {

/// Hosts built as csum(core, S2xS2) qualify as level-0 hosts even when not
/// produced by build_Z; synthesize the bookkeeping for them.
inline std::shared_ptr<const ZInfo> level0_info(const ManifoldModel& host)
{
    if (host.z) return host.z;
    const TreePtr& t = host.construction;
    if (t && t->kind == ConstructionTree::Kind::connected_sum && t->children.size() == 2 &&
        tree_is_standard(t->children[1], StandardPiece::s2xs2)) {
        ManifoldModel core = evaluate_tree(t->children[0]);
        if (!core.nuclei.empty() && !core.nucleus(1).consumed) {
            auto zi = std::make_shared<ZInfo>();
            zi->core = std::make_shared<const ManifoldModel>(std::move(core));
            zi->v_nucleus_label = 1;
            return zi;
        }
    }
    return nullptr;
}

} // namespace detail

/// The level-0 family indexed by q: its invariant is the mod-2 difference of
/// the basic-class records of the (2q+1)-transformed and untransformed cores,
/// carried across the stabilization.
inline FamilyElement base_family(long long q, std::shared_ptr<const ManifoldModel> host)
{
    if (q < 1) fail(ErrorCode::InvalidIndex, "base family index must be >= 1");
    auto zi = detail::level0_info(*host);
    if (!zi || zi->level != 0)
        fail(ErrorCode::Precondition,
             "base families live on level-0 hosts (a stabilized block with a free nucleus)");

    const ManifoldModel& core = *zi->core;
    ManifoldModel transformed = log_transform(core, zi->v_nucleus_label, 2 * q + 1);

    FamilyElement f;
    f.host = std::move(host);
    f.k = 0;
    f.invariant = xor_support(transformed.sw.support, core.sw.support);
    f.torelli = true;
    f.orientation_preserved = true;
    f.integer_defined = true;
    f.one_stably_trivial = true;
    f.q = q;
    f.probe_base = f.host->canonical.value_or(CohClass{});
    f.probe_step = core.nucleus(zi->v_nucleus_label).torus;
    f.construction = FamilyConstruction::base(q);
    return f;
}

// ---------------------------------------------------------------------------
// Suspension: one stabilization, parameter dimension k+1.
// ---------------------------------------------------------------------------

inline FamilyElement suspend(const FamilyElement& f)
{
    if (!f.one_stably_trivial)
        fail(ErrorCode::NoStableContraction,
             "suspension needs a family that contracts after one stabilization");
    FamilyElement out = f;
    out.host = std::make_shared<const ManifoldModel>(
        connected_sum(*f.host, make_standard(StandardPiece::s2xs2)));
    out.k = f.k + 1;
    // Classes extend across the new summand by the distinguished spin structure,
    // which is the identity on tracked coefficients; everything else maps to 0.
    out.construction = FamilyConstruction::node(FamilyConstruction::Kind::suspend, {f.construction});
    return out;
}

// ---------------------------------------------------------------------------
// The commutator step of the recursion.
// ---------------------------------------------------------------------------

/// From a level-p family on the host with block counts (r, s+1), produce the
/// level-(p+1) family on the host with block counts (r, s). The dropped term
/// of the recursion is checked to be adjunction-excluded on the (r+1, s)
/// variant before it is set to zero.
inline FamilyElement commutator_step(const FamilyElement& f, int p, int r, int s)
{
    if (!f.host->z)
        fail(ErrorCode::Precondition, "commutator step requires a host built by build_Z");
    const ZInfo& zi = *f.host->z;
    if (zi.level != p || zi.r != r || zi.s != s + 1)
        fail(ErrorCode::Precondition,
             "family host is " + f.host->name + ", expected Z(p=" + std::to_string(p) + ",r=" +
                 std::to_string(r) + ",s=" + std::to_string(s + 1) + ")");
    if (f.k != p) fail(ErrorCode::Precondition, "family parameter dimension does not match level");
    if (!f.one_stably_trivial)
        fail(ErrorCode::NoStableContraction,
             "commutator step needs a family that contracts after one stabilization");
    if (f.q < 1)
        fail(ErrorCode::Precondition, "commutator step applies to base-indexed families");

    ManifoldModel next = build_Z(p + 1, r, s, zi.config);
    ManifoldModel check = build_Z(p, r + 1, s, zi.config);

    // The dropped term of the recursion lives on the (r+1, s) variant. Each
    // non-trivial evaluation class must be excluded there by adjunction: it
    // pairs non-trivially with the section sphere of a nucleus that was
    // neither glued nor transformed, so it cannot be a basic class.
    {
        const ManifoldModel& ccore = *check.z->core;
        CohClass base = next.canonical.value_or(CohClass{});
        for (long long l = -f.q; l <= f.q; ++l) {
            if (l == 0) continue;
            CohClass c = base + CohClass::unit(f.probe_step, 2 * l);
            bool excluded = false;
            for (const auto& nu : ccore.nuclei) {
                if (nu.consumed) continue;
                if (ccore.pair(c, CohClass::unit(nu.section)) != 0) {
                    excluded = true;
                    break;
                }
            }
            if (!excluded)
                fail(ErrorCode::RecursionObstructed,
                     "dropped term at " + c.to_string() + " is not excluded by adjunction on " +
                         check.name);
        }
    }

    FamilyElement out;
    out.host = std::make_shared<const ManifoldModel>(std::move(next));
    out.k = f.k + 1;
    out.torelli = f.torelli;
    out.orientation_preserved = f.orientation_preserved;
    out.integer_defined = f.integer_defined;
    out.one_stably_trivial = f.one_stably_trivial;
    out.q = f.q;
    out.probe_base = out.host->canonical.value_or(CohClass{});
    out.probe_step = f.probe_step;
    {
        auto c = std::make_shared<FamilyConstruction>();
        c->kind = FamilyConstruction::Kind::commutator;
        c->q = f.q;
        c->p = p + 1;
        c->r = r;
        c->s = s;
        c->children = {f.construction};
        out.construction = c;
    }

    // Transport the invariant along the evaluation classes, index by index.
    for (long long l = -f.q; l <= f.q; ++l) {
        if (l == 0) continue;
        if (f.invariant.count(f.probe(l))) out.invariant.insert(out.probe(l));
    }
    return out;
}

namespace detail {

/// Same values as base_family, materialized only on the evaluation line that
/// the commutator steps read. The agreement with base_family is exact: the
/// difference record is a convolution against the core record, so its value
/// at probe(l) is a parity of core lookups.
inline FamilyElement base_family_on_line(long long q, std::shared_ptr<const ManifoldModel> host)
{
    if (q < 1) fail(ErrorCode::InvalidIndex, "base family index must be >= 1");
    auto zi = level0_info(*host);
    if (!zi || zi->level != 0)
        fail(ErrorCode::Precondition, "base families live on level-0 hosts");
    const ManifoldModel& core = *zi->core;
    const std::string torus = core.nucleus(zi->v_nucleus_label).torus;

    FamilyElement f;
    f.host = std::move(host);
    f.k = 0;
    f.torelli = f.orientation_preserved = f.integer_defined = f.one_stably_trivial = true;
    f.q = q;
    f.probe_base = f.host->canonical.value_or(CohClass{});
    f.probe_step = torus;
    f.construction = FamilyConstruction::base(q);
    for (long long l = -q; l <= q; ++l) {
        CohClass c = f.probe(l);
        int parity = core.sw.at(c); // the untransformed side
        for (long long t = -q; t <= q; ++t) parity ^= core.sw.at(c.shifted(torus, -2 * t));
        if (parity) f.invariant.insert(c);
    }
    return f;
}

} // namespace detail

/// Builds the level-p family of index q on the (r, s) host: a base family on
/// the level-0 host with s+p transformed blocks followed by p commutator steps.
inline FamilyElement alpha_family(int p, long long q, int r, int s, const ZConfig& config = {})
{
    if (p < 0) fail(ErrorCode::InvalidIndex, "negative level");
    auto host0 = std::make_shared<const ManifoldModel>(build_Z(0, r, s + p, config));
    FamilyElement f = p == 0 ? base_family(q, host0) : detail::base_family_on_line(q, host0);
    for (int j = 0; j < p; ++j) f = commutator_step(f, j, r, s + p - j - 1);
    return f;
}

// ---------------------------------------------------------------------------
// Composition, naturality, derived invariants.
// ---------------------------------------------------------------------------

inline FamilyElement compose(const FamilyElement& f, const FamilyElement& g)
{
    if (f.k != g.k || tree_to_text(f.host->construction) != tree_to_text(g.host->construction))
        fail(ErrorCode::IncompatibleFamilies, "composition requires the same host and dimension");
    FamilyElement out = f;
    out.invariant = xor_support(f.invariant, g.invariant);
    out.torelli = f.torelli && g.torelli;
    out.orientation_preserved = f.orientation_preserved && g.orientation_preserved;
    out.integer_defined = f.integer_defined && g.integer_defined;
    out.one_stably_trivial = f.one_stably_trivial && g.one_stably_trivial;
    out.q = 0;
    out.construction =
        FamilyConstruction::node(FamilyConstruction::Kind::compose, {f.construction, g.construction});
    return out;
}

/// Transport along a pairing-preserving relabeling of tracked generators.
inline FamilyElement conjugate(const FamilyElement& f, const std::map<std::string, std::string>& relabel)
{
    const PairingTable& t = f.host->lattice;
    std::map<std::string, std::string> full; // extended by the identity
    for (const auto& [id, g] : t.generators()) full[id] = id;
    std::set<std::string> targets;
    for (const auto& [from, to] : relabel) {
        if (!t.has_generator(from) || !t.has_generator(to))
            fail(ErrorCode::NotAnIsometry, "relabeling references unknown generator");
        full[from] = to;
    }
    for (const auto& [from, to] : full)
        if (!targets.insert(to).second)
            fail(ErrorCode::NotAnIsometry, "relabeling is not a bijection");
    for (const auto& [a, ia] : full)
        for (const auto& [b, ib] : full)
            if (t.pair_ids(a, b) != t.pair_ids(ia, ib))
                fail(ErrorCode::NotAnIsometry,
                     "relabeling changes the pairing of (" + a + ", " + b + ")");

    FamilyElement out = f;
    out.invariant.clear();
    for (const auto& c : f.invariant) out.invariant.insert(c.renamed(full));
    out.probe_base = f.probe_base.renamed(full);
    out.probe_step = full.at(f.probe_step);
    {
        auto c = std::make_shared<FamilyConstruction>();
        c->kind = FamilyConstruction::Kind::conjugate;
        c->relabel = relabel;
        c->children = {f.construction};
        out.construction = c;
    }
    return out;
}

enum class DerivedMode { embedding, psc };

struct DerivedInvariant {
    DerivedMode mode;
    std::string description;
    std::set<CohClass> values; // equal to the family invariant
};

/// Both reductions carry the family invariant verbatim.
inline DerivedInvariant derived_invariant(const FamilyElement& f, DerivedMode mode)
{
    DerivedInvariant d;
    d.mode = mode;
    d.description = mode == DerivedMode::embedding
                        ? "spherical family of embedded surfaces in " + f.host->name
                        : "spherical family of positive-scalar-curvature metrics on " + f.host->name;
    d.values = f.invariant;
    return d;
}

// ---------------------------------------------------------------------------
// Independence certificates.
// ---------------------------------------------------------------------------

struct IndependenceCertificate {
    std::vector<std::string> families; // display names
    std::vector<CohClass> probes;
    std::vector<std::vector<int>> matrix; // mod-2 entries
    bool verdict = false;                 // lower-unitriangular
    bool integer_defined = false;         // all families carry integer-defined invariants
};

inline IndependenceCertificate independence_certificate(
    const std::vector<FamilyElement>& families,
    const std::function<CohClass(long long)>& probe_rule)
{
    IndependenceCertificate cert;
    if (families.empty()) return cert;
    for (size_t i = 1; i < families.size(); ++i)
        if (families[i].k != families[0].k ||
            tree_to_text(families[i].host->construction) !=
                tree_to_text(families[0].host->construction))
            fail(ErrorCode::IncompatibleFamilies, "certificate families must share host and dimension");

    cert.integer_defined = true;
    for (const auto& f : families) {
        cert.families.push_back(family_construction_text(f.construction));
        cert.probes.push_back(probe_rule(f.q));
        cert.integer_defined = cert.integer_defined && f.integer_defined;
    }
    cert.matrix.assign(families.size(), std::vector<int>(families.size(), 0));
    for (size_t i = 0; i < families.size(); ++i)
        for (size_t j = 0; j < families.size(); ++j)
            cert.matrix[i][j] = evaluate(families[i], cert.probes[j]).value;

    cert.verdict = true;
    for (size_t i = 0; i < families.size() && cert.verdict; ++i) {
        if (cert.matrix[i][i] != 1) cert.verdict = false;
        for (size_t j = i + 1; j < families.size(); ++j)
            if (cert.matrix[i][j] != 0) cert.verdict = false;
    }
    return cert;
}

inline IndependenceCertificate independence_certificate(const std::vector<FamilyElement>& families)
{
    if (families.empty()) return {};
    const FamilyElement& f0 = families.front();
    return independence_certificate(
        families, [&f0](long long ell) { return f0.probe(ell); });
}

// ---------------------------------------------------------------------------
// Probe index sequences.
// ---------------------------------------------------------------------------

enum class ProbeStrategy {
    linear,   // q_i = i
    seq_min,  // q_1 = 1, q_{i+1} = 1 + min(q_1, Q(q_i))
    seq_max,  // q_1 = 1, q_{i+1} = 1 + max(q_1, Q(q_i))
};

/// Vanishing threshold of a family: largest |l| with a non-zero value on the
/// evaluation line. Reported as a computed quantity.
inline long long vanishing_threshold(const FamilyElement& f)
{
    long long best = 0;
    for (const auto& c : f.invariant) {
        CohClass d = c - f.probe_base;
        if (d.terms().size() == 1 && d.terms()[0].first == f.probe_step &&
            d.terms()[0].second % 2 == 0) {
            long long l = d.terms()[0].second / 2;
            best = std::max(best, l < 0 ? -l : l);
        }
    }
    return best;
}

inline std::vector<long long> probe_sequence(ProbeStrategy strategy, int n,
                                             const std::function<long long(long long)>& threshold)
{
    std::vector<long long> qs;
    if (n <= 0) return qs;
    qs.push_back(1);
    for (int i = 1; i < n; ++i) {
        long long prev = qs.back();
        switch (strategy) {
            case ProbeStrategy::linear: qs.push_back(i + 1); break;
            case ProbeStrategy::seq_min: qs.push_back(1 + std::min(qs[0], threshold(prev))); break;
            case ProbeStrategy::seq_max: qs.push_back(1 + std::max(qs[0], threshold(prev))); break;
        }
    }
    return qs;
}

// ---------------------------------------------------------------------------
// Validation.
// ---------------------------------------------------------------------------

inline std::vector<Violation> validate_family(const FamilyElement& f)
{
    std::vector<Violation> out;
    if (!(f.host->homeo.b_plus() > f.k + 2))
        out.push_back({"BPlusViolation", "host b+ = " + std::to_string(f.host->homeo.b_plus()) +
                                             " not above k+2 = " + std::to_string(f.k + 2)});
    for (const auto& c : f.invariant) {
        try {
            if (!shat_membership(c, f.host->lattice, f.host->homeo, f.k))
                out.push_back({"DimensionViolation", c.to_string()});
        } catch (const EngineError& e) {
            out.push_back({"DimensionViolation", std::string(e.what())});
        }
    }
    return out;
}

} // namespace fourfold

#endif
