#ifndef FOURFOLD_MANIFOLD_HPP
#define FOURFOLD_MANIFOLD_HPP

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "construction.hpp"
#include "errors.hpp"
#include "lattice.hpp"

namespace fourfold {

// ---------------------------------------------------------------------------
// Nuclei and basic-class functions.
// ---------------------------------------------------------------------------

struct NucleusMark {
    std::string torus;   // generator id, kind torus, self-pairing 0
    std::string section; // generator id, kind section, self-pairing -2
    int label = 0;
    bool consumed = false; // used by a fiber sum or log transform
};

/// Finite basic-class record: mod-2 support plus an optional integer lift.
struct SWFunction {
    std::set<CohClass> support; // classes with value 1 mod 2
    std::optional<std::map<CohClass, long long>> lift;
    std::string lift_source; // "fixture" when admitted from outside the calculus

    int at(const CohClass& c) const { return support.count(c) ? 1 : 0; }

    void toggle(const CohClass& c)
    {
        auto it = support.find(c);
        if (it == support.end())
            support.insert(c);
        else
            support.erase(it);
    }

    friend bool operator==(const SWFunction& a, const SWFunction& b)
    {
        return a.support == b.support && a.lift == b.lift;
    }
};

/// Mod-2 pointwise sum of two supports (symmetric difference).
inline std::set<CohClass> xor_support(const std::set<CohClass>& a, const std::set<CohClass>& b)
{
    std::set<CohClass> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::inserter(out, out.end()));
    return out;
}

// ---------------------------------------------------------------------------
// ManifoldModel.
// ---------------------------------------------------------------------------

struct ManifoldModel;
struct ZInfo;

enum class BlockKind { e2, e4 };

inline std::string_view block_kind_name(BlockKind k) { return k == BlockKind::e2 ? "E(2)" : "E(4)"; }

/// Choice of seed blocks for the recursive construction.
struct ZConfig {
    BlockKind v = BlockKind::e2;
    BlockKind u0 = BlockKind::e2;

    friend bool operator==(const ZConfig&, const ZConfig&) = default;
};

/// Bookkeeping for hosts produced by build_Z: level, block counts and the
/// torus ids the evaluation classes are written in.
struct ZInfo {
    int level = 0;
    int r = 0;
    int s = 0;
    ZConfig config;
    std::shared_ptr<const ManifoldModel> core;    // fiber-sum core before stabilization
    int v_nucleus_label = 1;                      // nucleus of the V block used by families
    std::vector<int> block_labels;                // nucleus label per block, index 1..r+s+level
};

struct ManifoldModel {
    std::string name;
    HomeoType homeo;
    PairingTable lattice;
    std::vector<NucleusMark> nuclei;
    std::optional<CohClass> canonical;
    SWFunction sw;
    bool symplectic = false;
    bool spin = false;
    std::string pi1 = "1"; // pass-through fundamental-group tag
    TreePtr construction;
    std::shared_ptr<const ZInfo> z; // present on hosts assembled by build_Z

    const NucleusMark& nucleus(int label) const
    {
        for (const auto& n : nuclei)
            if (n.label == label) return n;
        fail(ErrorCode::Precondition, name + " has no nucleus labeled " + std::to_string(label));
    }

    NucleusMark& nucleus(int label)
    {
        for (auto& n : nuclei)
            if (n.label == label) return n;
        fail(ErrorCode::Precondition, name + " has no nucleus labeled " + std::to_string(label));
    }

    long long pair(const CohClass& a, const CohClass& b) const { return lattice.pair(a, b); }
    long long square(const CohClass& c) const { return lattice.square(c); }
};

// ---------------------------------------------------------------------------
// Constructors for the standard pieces and elliptic surfaces.
// ---------------------------------------------------------------------------

namespace detail {

inline void add_nucleus(ManifoldModel& m, int label, const std::string& torus_id,
                        const std::string& section_id, const std::string& origin)
{
    m.lattice.add_generator({torus_id, GenKind::torus, origin});
    m.lattice.add_generator({section_id, GenKind::section, origin});
    m.lattice.set_pair(torus_id, section_id, 1);
    m.nuclei.push_back({torus_id, section_id, label, false});
}

} // namespace detail

inline ManifoldModel make_elliptic(int n)
{
    if (n != 2 && n != 4)
        fail(ErrorCode::Precondition, "elliptic surface E(" + std::to_string(n) + ") not supported");

    ManifoldModel m;
    m.construction = ConstructionTree::elliptic(n);
    m.symplectic = true;
    m.spin = true;
    if (n == 2) {
        m.name = "E(2)";
        m.homeo = {22, -16, Parity::even};
        detail::add_nucleus(m, 1, "T1", "S1", "E(2)");
        detail::add_nucleus(m, 2, "T2", "S2", "E(2)");
        detail::add_nucleus(m, 3, "T3", "S3", "E(2)");
        m.canonical = CohClass{}; // K = 0
        m.sw.support.insert(CohClass{});
        m.sw.lift = std::map<CohClass, long long>{{CohClass{}, 1}};
        m.sw.lift_source = "fixture";
    } else {
        m.name = "E(4)";
        m.homeo = {46, -32, Parity::even};
        m.lattice.add_generator({"F", GenKind::torus, "E(4)"}); // fiber dual
        detail::add_nucleus(m, 1, "T1", "S1", "E(4)");
        detail::add_nucleus(m, 2, "T2", "S2", "E(4)");
        detail::add_nucleus(m, 3, "T3", "S3", "E(4)");
        m.canonical = CohClass::unit("F", 2);
        m.sw.support.insert(CohClass::unit("F", 2));
        m.sw.support.insert(CohClass::unit("F", -2));
        m.sw.lift = std::map<CohClass, long long>{
            {CohClass::unit("F", 2), 1}, {CohClass{}, -2}, {CohClass::unit("F", -2), 1}};
        m.sw.lift_source = "fixture";
    }
    m.homeo.validate();
    return m;
}

inline ManifoldModel make_standard(StandardPiece piece)
{
    ManifoldModel m;
    m.construction = ConstructionTree::standard(piece);
    switch (piece) {
        case StandardPiece::s2xs2:
            m.name = "S2xS2";
            m.homeo = {2, 0, Parity::even};
            m.spin = true;
            m.lattice.add_generator({"A", GenKind::hyperbolic_a, "S2xS2"});
            m.lattice.add_generator({"B", GenKind::hyperbolic_b, "S2xS2"});
            m.lattice.set_pair("A", "B", 1);
            break;
        case StandardPiece::cp2:
            m.name = "CP2";
            m.homeo = {1, 1, Parity::odd};
            m.lattice.add_generator({"H", GenKind::generic, "CP2"}, 1);
            break;
        case StandardPiece::cp2bar:
            m.name = "CP2bar";
            m.homeo = {1, -1, Parity::odd};
            m.lattice.add_generator({"E", GenKind::exceptional, "CP2bar"});
            break;
        case StandardPiece::s4:
            m.name = "S4";
            m.homeo = {0, 0, Parity::even};
            m.spin = true;
            break;
    }
    m.homeo.validate();
    return m;
}

// ---------------------------------------------------------------------------
// Log transform.
// ---------------------------------------------------------------------------

inline ManifoldModel log_transform(const ManifoldModel& m, int nucleus_label, long long p)
{
    if (p < 1 || p % 2 == 0)
        fail(ErrorCode::UnsupportedMultiplicity,
             "log transform multiplicity must be odd and positive, got " + std::to_string(p));
    const NucleusMark& nuc = m.nucleus(nucleus_label);
    if (nuc.consumed)
        fail(ErrorCode::NucleusConsumed,
             "nucleus " + std::to_string(nucleus_label) + " of " + m.name + " already consumed");
    if (m.homeo.b_plus() <= 1)
        fail(ErrorCode::Precondition, "log transform requires b+ > 1");
    CohClass t = CohClass::unit(nuc.torus);
    if (m.canonical && m.pair(*m.canonical, t) != 0)
        fail(ErrorCode::Precondition, "canonical class pairs non-trivially with the nucleus torus");

    ManifoldModel out = m;
    out.construction = ConstructionTree::log_transform(m.construction, nucleus_label, p);
    out.nucleus(nucleus_label).consumed = true; // no further transform; torus stays tracked

    // Multiply the basic-class record by the symmetric step factor of width p.
    long long q = (p - 1) / 2;
    std::vector<CohClass> shifts;
    shifts.reserve(m.sw.support.size() * static_cast<size_t>(p));
    for (const auto& c : m.sw.support)
        for (long long l = -q; l <= q; ++l) shifts.push_back(c.shifted(nuc.torus, 2 * l));
    std::sort(shifts.begin(), shifts.end());
    std::set<CohClass> support;
    for (auto it = shifts.begin(); it != shifts.end();) {
        auto run = it;
        while (run != shifts.end() && *run == *it) ++run;
        if ((run - it) % 2 != 0) support.insert(support.end(), *it);
        it = run;
    }
    out.sw.support = std::move(support);
    if (m.sw.lift) {
        std::map<CohClass, long long> lift;
        for (const auto& [c, v] : *m.sw.lift)
            for (long long l = -q; l <= q; ++l) lift[c + t * (2 * l)] += v;
        for (auto it = lift.begin(); it != lift.end();)
            it = it->second == 0 ? lift.erase(it) : std::next(it);
        out.sw.lift = std::move(lift);
    }
    if (m.canonical) out.canonical = *m.canonical + t * (p - 1);

    if (m.name == "E(2)" || m.name == "E(4)")
        out.name = m.name.substr(0, 2) + m.name.substr(2, 1) + ";" + std::to_string(p) + ")";
    else
        out.name = m.name + ";logt(" + std::to_string(nucleus_label) + "," + std::to_string(p) + ")";
    return out;
}

// ---------------------------------------------------------------------------
// Merging tracked lattices (disjoint ids, deterministic renaming).
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fresh_id(const PairingTable& t, const std::string& base)
{
    if (!t.has_generator(base)) return base;
    for (int k = 2;; ++k) {
        std::string cand = base + "." + std::to_string(k);
        if (!t.has_generator(cand)) return cand;
    }
}

/// Copy n's generators, pairings, nuclei into m. Returns the id renaming used.
inline std::map<std::string, std::string> merge_lattice(ManifoldModel& m, const ManifoldModel& n,
                                                        const std::string& origin)
{
    std::map<std::string, std::string> ren;
    for (const auto& [id, g] : n.lattice.generators()) {
        std::string nid = fresh_id(m.lattice, id);
        ren[id] = nid;
        GeneratorSymbol ng = g;
        ng.id = nid;
        if (nid != id && ng.origin.empty()) ng.origin = origin;
        m.lattice.add_generator(ng, n.lattice.pair_ids(id, id));
    }
    for (const auto& [a, b, v] : n.lattice.cross_entries()) m.lattice.set_pair(ren[a], ren[b], v);

    int offset = 0;
    for (const auto& nu : m.nuclei) offset = std::max(offset, nu.label);
    for (const auto& nu : n.nuclei)
        m.nuclei.push_back({ren[nu.torus], ren[nu.section], nu.label + offset, nu.consumed});
    return ren;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Connected sum.
// ---------------------------------------------------------------------------

namespace detail {

/// A single blow-up summand: the sphere-content test is on the tracked data,
/// not the construction tree.
inline const std::string* blow_up_generator(const ManifoldModel& m)
{
    if (m.homeo.b2 != 1 || m.homeo.sigma != -1) return nullptr;
    if (m.lattice.generators().size() != 1) return nullptr;
    const auto& [id, g] = *m.lattice.generators().begin();
    return g.kind == GenKind::exceptional ? &id : nullptr;
}

} // namespace detail

inline ManifoldModel connected_sum(const ManifoldModel& m, const ManifoldModel& n)
{
    // Summing with a homotopy sphere changes nothing but the provenance.
    if (n.homeo.b2 == 0) {
        ManifoldModel out = m;
        out.construction = ConstructionTree::connected_sum({m.construction, n.construction});
        return out;
    }
    if (m.homeo.b2 == 0) {
        ManifoldModel out = n;
        out.construction = ConstructionTree::connected_sum({m.construction, n.construction});
        return out;
    }

    ManifoldModel out;
    out.name = m.name + " # " + n.name;
    out.construction = ConstructionTree::connected_sum({m.construction, n.construction});
    out.homeo = {m.homeo.b2 + n.homeo.b2, m.homeo.sigma + n.homeo.sigma,
                 (m.homeo.parity == Parity::odd || n.homeo.parity == Parity::odd) ? Parity::odd
                                                                                  : Parity::even};
    out.homeo.validate();
    out.spin = m.spin && n.spin;
    out.symplectic = false;
    out.lattice = m.lattice;
    out.nuclei = m.nuclei;
    auto ren = detail::merge_lattice(out, n, "csum");

    // Basic classes: blow-up rule for a single exceptional summand, vanishing
    // when both sides have b+ > 0, empty record otherwise (not determined by
    // the rules this calculus carries).
    auto blow_up = [&out](const SWFunction& sw_in, const std::string& eid) {
        CohClass e = CohClass::unit(eid);
        SWFunction sw;
        for (const auto& c : sw_in.support) {
            sw.toggle(c + e);
            sw.toggle(c - e);
        }
        if (sw_in.lift) {
            std::map<CohClass, long long> lift;
            for (const auto& [c, v] : *sw_in.lift) {
                lift[c + e] += v;
                lift[c - e] += v;
            }
            sw.lift = std::move(lift);
            sw.lift_source = sw_in.lift_source;
        }
        out.sw = std::move(sw);
    };
    if (const std::string* e = detail::blow_up_generator(n)) {
        blow_up(m.sw, ren.at(*e));
    } else if (const std::string* e = detail::blow_up_generator(m)) {
        SWFunction renamed;
        for (const auto& c : n.sw.support) renamed.support.insert(c.renamed(ren));
        if (n.sw.lift) {
            std::map<CohClass, long long> lift;
            for (const auto& [c, v] : *n.sw.lift) lift[c.renamed(ren)] += v;
            renamed.lift = std::move(lift);
            renamed.lift_source = n.sw.lift_source;
        }
        blow_up(renamed, *e);
    } else {
        // both b+ positive: the record vanishes; anything else these rules
        // do not determine, so no classes are claimed
        out.sw = {};
    }

    // The degree-zero extension of classes across the new summand is the
    // identity on tracked coefficients, so canonical data just carries over.
    if (m.canonical && n.canonical)
        out.canonical = *m.canonical + n.canonical->renamed(ren);
    else if (m.canonical)
        out.canonical = m.canonical;
    else if (n.canonical)
        out.canonical = n.canonical->renamed(ren);
    return out;
}

// ---------------------------------------------------------------------------
// Fiber (submanifold) sum along square-zero tori in marked nuclei.
// ---------------------------------------------------------------------------

inline ManifoldModel fiber_sum(const ManifoldModel& m, const ManifoldModel& n, int nucleus_m,
                               int nucleus_n)
{
    if (!m.symplectic || !n.symplectic)
        fail(ErrorCode::SymplecticRequired, "fiber sum requires symplectic summands");
    const NucleusMark& nm = m.nucleus(nucleus_m);
    const NucleusMark& nn = n.nucleus(nucleus_n);
    if (nm.consumed)
        fail(ErrorCode::NucleusConsumed,
             "nucleus " + std::to_string(nucleus_m) + " of " + m.name + " already consumed");
    if (nn.consumed)
        fail(ErrorCode::NucleusConsumed,
             "nucleus " + std::to_string(nucleus_n) + " of " + n.name + " already consumed");

    ManifoldModel out;
    out.name = m.name + " #_T " + n.name;
    out.construction = ConstructionTree::fiber_sum(m.construction, n.construction, nucleus_m, nucleus_n);
    bool spin = m.spin && n.spin;
    out.homeo = {m.homeo.b2 + n.homeo.b2 + 2, m.homeo.sigma + n.homeo.sigma,
                 spin ? Parity::even : Parity::odd};
    out.homeo.validate();
    out.spin = spin;
    out.symplectic = true;
    out.lattice = m.lattice;
    out.nuclei = m.nuclei;
    auto ren = detail::merge_lattice(out, n, "fsum");

    int left_max = 0;
    for (const auto& nu : m.nuclei) left_max = std::max(left_max, nu.label);
    out.nucleus(nucleus_m).consumed = true;
    out.nucleus(nucleus_n + left_max).consumed = true;

    // The glued tori become one tracked class.
    std::string tg = detail::fresh_id(out.lattice, "tg");
    out.lattice.add_generator({tg, GenKind::torus, "fsum"});

    // Fresh canonical symbol with the axiomatic pairings: orthogonal to every
    // marked torus and section, square 2e + 3*sigma of the sum.
    std::string kid = detail::fresh_id(out.lattice, "K");
    long long ksq = 2 * out.homeo.euler() + 3 * out.homeo.sigma;
    out.lattice.add_generator({kid, GenKind::canonical, "fsum"}, ksq);
    out.canonical = CohClass::unit(kid);
    out.sw = {};
    out.sw.support.insert(*out.canonical);
    return out;
}

// ---------------------------------------------------------------------------
// Tree evaluation and rewriting.
// ---------------------------------------------------------------------------

inline ManifoldModel evaluate_tree(const TreePtr& tree)
{
    using Kind = ConstructionTree::Kind;
    if (!tree) fail(ErrorCode::Precondition, "empty construction tree");
    switch (tree->kind) {
        case Kind::elliptic:
            return make_elliptic(tree->n);
        case Kind::standard:
            return make_standard(tree->piece);
        case Kind::log_transform:
            return log_transform(evaluate_tree(tree->children.at(0)), tree->nucleus,
                                 tree->multiplicity);
        case Kind::connected_sum: {
            if (tree->children.empty()) fail(ErrorCode::Precondition, "empty connected sum");
            ManifoldModel acc = evaluate_tree(tree->children[0]);
            for (size_t i = 1; i < tree->children.size(); ++i)
                acc = connected_sum(acc, evaluate_tree(tree->children[i]));
            // n-ary sums carry the flat tree rather than the nested one
            acc.construction = tree;
            return acc;
        }
        case Kind::fiber_sum:
            return fiber_sum(evaluate_tree(tree->children.at(0)), evaluate_tree(tree->children.at(1)),
                             tree->nucleus_left, tree->nucleus_right);
        case Kind::rewrite: {
            ManifoldModel m = evaluate_tree(tree->children.at(0));
            m.construction = tree;
            return m;
        }
    }
    fail(ErrorCode::Precondition, "corrupt construction tree");
}

namespace detail {

inline bool tree_is_standard(const TreePtr& t, StandardPiece p)
{
    return t && t->kind == ConstructionTree::Kind::standard && t->piece == p;
}

/// One rewrite pass: (X #_T Y) # S2xS2 -> X # Y # 2(S2xS2) or the
/// log-transform absorption N(2;2q+1) # S2xS2 -> N(2) # S2xS2.
inline TreePtr try_mm_rewrite(const TreePtr& t, std::string& rule)
{
    using Kind = ConstructionTree::Kind;
    if (!t) return nullptr;
    if (t->kind == Kind::connected_sum) {
        bool has_sss = false;
        for (const auto& c : t->children)
            if (tree_is_standard(c, StandardPiece::s2xs2)) has_sss = true;
        if (has_sss) {
            for (size_t i = 0; i < t->children.size(); ++i) {
                const TreePtr& c = t->children[i];
                if (c->kind == Kind::fiber_sum) {
                    std::vector<TreePtr> kids;
                    for (size_t j = 0; j < t->children.size(); ++j)
                        if (j != i) kids.push_back(t->children[j]);
                    kids.push_back(c->children.at(0));
                    kids.push_back(c->children.at(1));
                    kids.push_back(ConstructionTree::standard(StandardPiece::s2xs2));
                    rule = "mm-fiber-sum";
                    return ConstructionTree::connected_sum(std::move(kids));
                }
                if (c->kind == Kind::log_transform) {
                    std::vector<TreePtr> kids = t->children;
                    kids[i] = c->children.at(0);
                    rule = "mm-log-transform";
                    return ConstructionTree::connected_sum(std::move(kids));
                }
            }
        }
    }
    // recurse into children, first match wins
    for (size_t i = 0; i < t->children.size(); ++i) {
        if (TreePtr r = try_mm_rewrite(t->children[i], rule)) {
            auto copy = std::make_shared<ConstructionTree>(*t);
            copy->children[i] = r;
            return copy;
        }
    }
    return nullptr;
}

} // namespace detail

/// Rewrites the first stabilized fiber sum (or stabilized log transform)
/// found in the tree. Homeomorphism data of the evaluated models is preserved.
inline TreePtr mm_rewrite(const TreePtr& tree)
{
    std::string rule;
    TreePtr r = detail::try_mm_rewrite(tree, rule);
    if (!r) fail(ErrorCode::NoRewrite, "no stabilized fiber-sum or log-transform pattern in tree");
    return ConstructionTree::rewrite(r, rule);
}

// ---------------------------------------------------------------------------
// Validation.
// ---------------------------------------------------------------------------

struct Violation {
    std::string kind;
    std::string detail;
};

inline std::vector<Violation> validate_model(const ManifoldModel& m)
{
    std::vector<Violation> out;
    try {
        m.homeo.validate();
    } catch (const EngineError& e) {
        out.push_back({"HomeoTypeViolation", e.what()});
    }
    if (m.spin && m.homeo.parity != Parity::even)
        out.push_back({"SpinParityViolation", m.name + " is flagged spin with odd parity"});

    for (const auto& nu : m.nuclei) {
        if (m.lattice.pair_ids(nu.torus, nu.torus) != 0 ||
            m.lattice.pair_ids(nu.section, nu.section) != -2 ||
            m.lattice.pair_ids(nu.torus, nu.section) != 1)
            out.push_back({"NucleusAxiomViolation",
                           "nucleus " + std::to_string(nu.label) + " of " + m.name});
    }

    for (const auto& c : m.sw.support) {
        if (!m.lattice.is_characteristic(c))
            out.push_back({"NonCharacteristicSupport", c.to_string()});
        try {
            if (virtual_dimension(m.square(c), m.homeo) != 0)
                out.push_back({"SimpleTypeViolation",
                               c.to_string() + " has virtual dimension " +
                                   std::to_string(virtual_dimension(m.square(c), m.homeo))});
        } catch (const EngineError&) {
            out.push_back({"SimpleTypeViolation", c.to_string() + " has non-integral dimension"});
        }
        if (m.homeo.b_plus() > 1) {
            for (const auto& nu : m.nuclei) {
                long long p = m.pair(c, CohClass::unit(nu.torus));
                if (p != 0)
                    out.push_back({"AdjunctionViolation", c.to_string() + " pairs " +
                                                              std::to_string(p) + " with torus " +
                                                              nu.torus});
            }
        }
    }

    if (m.symplectic && m.homeo.b_plus() > 1) {
        if (!m.canonical) {
            out.push_back({"CanonicalClassViolation", m.name + " lacks a canonical class"});
        } else {
            if (m.sw.at(*m.canonical) != 1)
                out.push_back(
                    {"CanonicalClassViolation", "sw(K) = 0 mod 2 on symplectic " + m.name});
            long long want = 2 * m.homeo.euler() + 3 * m.homeo.sigma;
            if (m.square(*m.canonical) != want)
                out.push_back({"CanonicalClassViolation",
                               "K*K = " + std::to_string(m.square(*m.canonical)) + ", expected " +
                                   std::to_string(want)});
            // K pairs trivially with every torus and section of an intact nucleus
            for (const auto& nu : m.nuclei) {
                if (nu.consumed) continue;
                if (m.pair(*m.canonical, CohClass::unit(nu.torus)) != 0 ||
                    m.pair(*m.canonical, CohClass::unit(nu.section)) != 0)
                    out.push_back({"CanonicalClassViolation",
                                   "K pairs non-trivially with nucleus " +
                                       std::to_string(nu.label)});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// The recursive hosts Z(p; r, s).
// ---------------------------------------------------------------------------

inline ManifoldModel make_block(BlockKind k)
{
    return make_elliptic(k == BlockKind::e2 ? 2 : 4);
}

namespace detail {

inline ManifoldModel build_Z_uncached(int p, int r, int s, const ZConfig& config);

/// Construction is deterministic and content-addressed, so hosts can be
/// shared; the recursion rebuilds the same handful of hosts constantly.
inline const ManifoldModel& build_Z_cached(int p, int r, int s, const ZConfig& config)
{
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const ManifoldModel>> cache;
    std::string key = std::to_string(p) + "|" + std::to_string(r) + "|" + std::to_string(s) + "|" +
                      std::string(block_kind_name(config.v)) + "|" +
                      std::string(block_kind_name(config.u0));
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    auto built = std::make_shared<const ManifoldModel>(build_Z_uncached(p, r, s, config));
    std::lock_guard<std::mutex> lock(mu);
    return *cache.emplace(key, std::move(built)).first->second;
}

} // namespace detail

/// Assemble the level-p host with r untransformed and s transformed blocks:
/// a chain of fiber sums of the seed blocks, multiplicity-3 log transforms on
/// the s designated block tori, then p+1 stabilizing S2xS2 summands.
inline ManifoldModel build_Z(int p, int r, int s, const ZConfig& config = {})
{
    if (p < 0 || r < 0 || s < 0) fail(ErrorCode::InvalidIndex, "build_Z indices must be >= 0");
    return detail::build_Z_cached(p, r, s, config);
}

inline ManifoldModel detail::build_Z_uncached(int p, int r, int s, const ZConfig& config)
{
    ManifoldModel core = make_block(config.v);
    // Nucleus 1 of V is reserved for the family transforms, nucleus 2 stays
    // spare; chaining starts at nucleus 3.
    int chain = 3;
    if (core.nuclei.size() < 3) fail(ErrorCode::NucleusConsumed, "seed block has too few nuclei");

    int n_blocks = r + s + p;
    std::vector<int> block_labels;
    for (int i = 0; i < n_blocks; ++i) {
        ManifoldModel u0 = make_block(config.u0);
        if (u0.nuclei.size() < 3) fail(ErrorCode::NucleusConsumed, "block has too few nuclei");
        int offset = 0;
        for (const auto& nu : core.nuclei) offset = std::max(offset, nu.label);
        core = fiber_sum(core, u0, chain, 3);
        block_labels.push_back(offset + 1);
        chain = offset + 2;
    }
    // Transformed blocks sit at positions r+1 .. r+s.
    for (int a = r + 1; a <= r + s; ++a) core = log_transform(core, block_labels[a - 1], 3);

    auto core_ptr = std::make_shared<const ManifoldModel>(core);
    ManifoldModel host = core;
    for (int i = 0; i <= p; ++i) host = connected_sum(host, make_standard(StandardPiece::s2xs2));

    host.name = "Z(p=" + std::to_string(p) + ",r=" + std::to_string(r) + ",s=" + std::to_string(s) + ")";
    auto zi = std::make_shared<ZInfo>();
    zi->level = p;
    zi->r = r;
    zi->s = s;
    zi->config = config;
    zi->core = core_ptr;
    zi->v_nucleus_label = 1;
    zi->block_labels = block_labels;
    host.z = zi;
    return host;
}

} // namespace fourfold

#endif
