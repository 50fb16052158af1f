#ifndef FOURFOLD_JSON_IO_HPP
#define FOURFOLD_JSON_IO_HPP

#include <cstdio>

#include <json.hpp>

#include "dataspace.hpp"
#include "family.hpp"
#include "manifold.hpp"

namespace fourfold::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Hashing (FNV-1a, used for deterministic input/report digests).
// ---------------------------------------------------------------------------

inline std::string fnv1a_hex(std::string_view data)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Classes and pairing tables: sorted-key JSON objects.
// ---------------------------------------------------------------------------

inline json to_json(const CohClass& c)
{
    json o = json::object();
    for (const auto& [id, v] : c.terms()) o[id] = v;
    return o;
}

inline CohClass cohclass_from_json(const json& o)
{
    CohClass c;
    for (auto it = o.begin(); it != o.end(); ++it)
        c += CohClass::unit(it.key(), it.value().get<long long>());
    return c;
}

inline json generators_to_json(const PairingTable& t)
{
    json arr = json::array();
    for (const auto& [id, g] : t.generators()) {
        json o = json::object();
        o["id"] = id;
        o["kind"] = std::string(gen_kind_name(g.kind));
        o["self"] = t.pair_ids(id, id);
        if (!g.origin.empty()) o["origin"] = g.origin;
        arr.push_back(o);
    }
    return arr;
}

inline json pairing_to_json(const PairingTable& t)
{
    json arr = json::array();
    for (const auto& [a, b, v] : t.cross_entries()) arr.push_back(json::array({a, b, v}));
    return arr;
}

// ---------------------------------------------------------------------------
// Construction trees.
// ---------------------------------------------------------------------------

inline json to_json(const TreePtr& t)
{
    if (!t) return nullptr;
    json o = json::object();
    using Kind = ConstructionTree::Kind;
    switch (t->kind) {
        case Kind::elliptic:
            o["kind"] = "elliptic";
            o["n"] = t->n;
            break;
        case Kind::standard:
            o["kind"] = "standard";
            o["piece"] = std::string(standard_piece_name(t->piece));
            break;
        case Kind::log_transform:
            o["kind"] = "log-transform";
            o["nucleus"] = t->nucleus;
            o["p"] = t->multiplicity;
            break;
        case Kind::connected_sum:
            o["kind"] = "connected-sum";
            break;
        case Kind::fiber_sum:
            o["kind"] = "fiber-sum";
            o["nucleus_left"] = t->nucleus_left;
            o["nucleus_right"] = t->nucleus_right;
            break;
        case Kind::rewrite:
            o["kind"] = "rewrite";
            o["rule"] = t->rule;
            break;
    }
    if (!t->children.empty()) {
        json kids = json::array();
        for (const auto& c : t->children) kids.push_back(to_json(c));
        o["children"] = kids;
    }
    return o;
}

inline TreePtr tree_from_json(const json& o)
{
    if (o.is_null()) return nullptr;
    std::string kind = o.at("kind").get<std::string>();
    std::vector<TreePtr> kids;
    if (o.contains("children"))
        for (const auto& c : o.at("children")) kids.push_back(tree_from_json(c));
    if (kind == "elliptic") return ConstructionTree::elliptic(o.at("n").get<int>());
    if (kind == "standard") {
        std::string p = o.at("piece").get<std::string>();
        for (StandardPiece sp :
             {StandardPiece::s2xs2, StandardPiece::cp2, StandardPiece::cp2bar, StandardPiece::s4})
            if (p == standard_piece_name(sp)) return ConstructionTree::standard(sp);
        fail(ErrorCode::IoError, "unknown standard piece '" + p + "'");
    }
    if (kind == "log-transform")
        return ConstructionTree::log_transform(kids.at(0), o.at("nucleus").get<int>(),
                                               o.at("p").get<long long>());
    if (kind == "connected-sum") return ConstructionTree::connected_sum(std::move(kids));
    if (kind == "fiber-sum")
        return ConstructionTree::fiber_sum(kids.at(0), kids.at(1), o.at("nucleus_left").get<int>(),
                                           o.at("nucleus_right").get<int>());
    if (kind == "rewrite") return ConstructionTree::rewrite(kids.at(0), o.at("rule").get<std::string>());
    fail(ErrorCode::IoError, "unknown construction node '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Models.
// ---------------------------------------------------------------------------

inline json to_json(const ManifoldModel& m)
{
    json o = json::object();
    o["schema"] = kSchemaVersion;
    o["name"] = m.name;
    o["homeo"] = {{"b2", m.homeo.b2}, {"sigma", m.homeo.sigma},
                  {"parity", std::string(parity_name(m.homeo.parity))}};
    o["generators"] = generators_to_json(m.lattice);
    o["pairing"] = pairing_to_json(m.lattice);
    json nuclei = json::array();
    for (const auto& n : m.nuclei)
        nuclei.push_back({{"label", n.label},
                          {"torus", n.torus},
                          {"section", n.section},
                          {"consumed", n.consumed}});
    o["nuclei"] = nuclei;
    o["canonical"] = m.canonical ? to_json(*m.canonical) : json(nullptr);

    // One row per class appearing in the mod-2 support or the integer lift.
    std::set<CohClass> classes = m.sw.support;
    if (m.sw.lift)
        for (const auto& [c, v] : *m.sw.lift) classes.insert(c);
    json sw = json::array();
    for (const auto& c : classes) {
        json row = json::array({to_json(c), m.sw.at(c)});
        if (m.sw.lift) {
            auto it = m.sw.lift->find(c);
            row.push_back(it == m.sw.lift->end() ? 0 : it->second);
        }
        sw.push_back(row);
    }
    o["sw"] = sw;
    if (!m.sw.lift_source.empty()) o["sw_lift_source"] = m.sw.lift_source;

    o["flags"] = {{"symplectic", m.symplectic}, {"spin", m.spin}, {"pi1", m.pi1}};
    o["construction"] = to_json(m.construction);
    return o;
}

/// Rebuild from the construction record and check the stored snapshot against
/// the re-evaluated model.
inline ManifoldModel model_from_json(const json& o)
{
    TreePtr tree = tree_from_json(o.at("construction"));
    ManifoldModel m = evaluate_tree(tree);
    const json& h = o.at("homeo");
    if (h.at("b2").get<long long>() != m.homeo.b2 ||
        h.at("sigma").get<long long>() != m.homeo.sigma ||
        h.at("parity").get<std::string>() != parity_name(m.homeo.parity))
        fail(ErrorCode::IoError, "stored homeomorphism data disagrees with the construction record");
    std::set<CohClass> support;
    for (const auto& row : o.at("sw"))
        if (row.at(1).get<int>() % 2 != 0) support.insert(cohclass_from_json(row.at(0)));
    if (support != m.sw.support)
        fail(ErrorCode::IoError, "stored basic classes disagree with the construction record");
    if (o.contains("name")) m.name = o.at("name").get<std::string>();
    return m;
}

// ---------------------------------------------------------------------------
// Families.
// ---------------------------------------------------------------------------

inline json to_json(const FamConsPtr& c)
{
    if (!c) return nullptr;
    json o = json::object();
    using Kind = FamilyConstruction::Kind;
    switch (c->kind) {
        case Kind::base:
            o["kind"] = "base";
            o["q"] = c->q;
            break;
        case Kind::suspend:
            o["kind"] = "suspend";
            break;
        case Kind::commutator:
            o["kind"] = "commutator";
            o["q"] = c->q;
            o["p"] = c->p;
            o["r"] = c->r;
            o["s"] = c->s;
            break;
        case Kind::compose:
            o["kind"] = "compose";
            break;
        case Kind::conjugate:
            o["kind"] = "conjugate";
            o["relabel"] = c->relabel;
            break;
    }
    if (!c->children.empty()) {
        json kids = json::array();
        for (const auto& ch : c->children) kids.push_back(to_json(ch));
        o["children"] = kids;
    }
    return o;
}

inline FamConsPtr family_construction_from_json(const json& o)
{
    if (o.is_null()) return nullptr;
    auto c = std::make_shared<FamilyConstruction>();
    std::string kind = o.at("kind").get<std::string>();
    using Kind = FamilyConstruction::Kind;
    if (kind == "base")
        c->kind = Kind::base;
    else if (kind == "suspend")
        c->kind = Kind::suspend;
    else if (kind == "commutator")
        c->kind = Kind::commutator;
    else if (kind == "compose")
        c->kind = Kind::compose;
    else if (kind == "conjugate")
        c->kind = Kind::conjugate;
    else
        fail(ErrorCode::IoError, "unknown family construction '" + kind + "'");
    if (o.contains("q")) c->q = o.at("q").get<long long>();
    if (o.contains("p")) c->p = o.at("p").get<int>();
    if (o.contains("r")) c->r = o.at("r").get<int>();
    if (o.contains("s")) c->s = o.at("s").get<int>();
    if (o.contains("relabel"))
        c->relabel = o.at("relabel").get<std::map<std::string, std::string>>();
    if (o.contains("children"))
        for (const auto& ch : o.at("children")) c->children.push_back(family_construction_from_json(ch));
    return c;
}

inline json to_json(const FamilyElement& f)
{
    json o = json::object();
    o["schema"] = kSchemaVersion;
    o["k"] = f.k;
    o["host"] = to_json(*f.host);
    json inv = json::array();
    for (const auto& c : f.invariant) inv.push_back(json::array({to_json(c), 1}));
    o["invariant"] = inv;
    o["flags"] = {{"torelli", f.torelli},
                  {"orientation_preserved", f.orientation_preserved},
                  {"integer_defined", f.integer_defined},
                  {"one_stably_trivial", f.one_stably_trivial}};
    o["q"] = f.q;
    o["probe"] = {{"base", to_json(f.probe_base)}, {"step", f.probe_step}};
    o["construction"] = to_json(f.construction);
    return o;
}

inline FamilyElement family_from_json(const json& o)
{
    FamilyElement f;
    f.host = std::make_shared<const ManifoldModel>(model_from_json(o.at("host")));
    f.k = o.at("k").get<int>();
    for (const auto& row : o.at("invariant")) f.invariant.insert(cohclass_from_json(row.at(0)));
    const json& fl = o.at("flags");
    f.torelli = fl.at("torelli").get<bool>();
    f.orientation_preserved = fl.at("orientation_preserved").get<bool>();
    f.integer_defined = fl.at("integer_defined").get<bool>();
    f.one_stably_trivial = fl.at("one_stably_trivial").get<bool>();
    f.q = o.at("q").get<long long>();
    f.probe_base = cohclass_from_json(o.at("probe").at("base"));
    f.probe_step = o.at("probe").at("step").get<std::string>();
    f.construction = family_construction_from_json(o.at("construction"));
    return f;
}

// ---------------------------------------------------------------------------
// Certificates.
// ---------------------------------------------------------------------------

inline json to_json(const IndependenceCertificate& cert)
{
    json o = json::object();
    o["families"] = cert.families;
    json probes = json::array();
    for (const auto& c : cert.probes) probes.push_back(to_json(c));
    o["probes"] = probes;
    o["matrix"] = cert.matrix;
    o["verdict"] = cert.verdict;
    o["integer_defined"] = cert.integer_defined;
    return o;
}

// ---------------------------------------------------------------------------
// Wall scenarios.
// ---------------------------------------------------------------------------

inline walls::Rat rat_from_json(const json& v)
{
    if (v.is_number_integer()) return walls::Rat(v.get<long long>());
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        auto slash = s.find('/');
        if (slash == std::string::npos) return walls::Rat(std::stoll(s));
        return walls::Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    }
    fail(ErrorCode::IoError, "rational values must be integers or 'p/q' strings");
}

inline std::string rat_to_string(const walls::Rat& r)
{
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

struct WallScenario {
    walls::DataSpace space;
    std::vector<walls::Wall> walls;
    std::vector<walls::Chain> chains;

    int dimension() const { return space.dimension; }
};

inline WallScenario scenario_from_json(const json& o)
{
    WallScenario sc;
    sc.space.dimension = o.at("dimension").get<int>();
    sc.space.validate();
    for (const auto& w : o.at("walls")) {
        walls::Wall wall;
        const json& fs = w.at("functionals");
        std::vector<int> signs(fs.size(), 1);
        if (w.contains("signs")) {
            size_t i = 0;
            for (const auto& s : w.at("signs"))
                if (i < signs.size()) signs[i++] = s.get<int>();
        }
        size_t i = 0;
        for (const auto& f : fs) {
            walls::AffineFunctional L;
            for (const auto& x : f.at("normal")) L.normal.push_back(rat_from_json(x));
            if (static_cast<int>(L.normal.size()) != sc.dimension())
                fail(ErrorCode::IoError, "functional dimension mismatch");
            L.offset = f.contains("offset") ? rat_from_json(f.at("offset")) : walls::Rat(0);
            L.sign = signs[i++];
            wall.functionals.push_back(std::move(L));
        }
        wall.validate();
        sc.walls.push_back(std::move(wall));
    }
    for (const auto& ch : o.at("chains")) {
        walls::Chain chain;
        for (const auto& sx : ch.at("simplices")) {
            walls::WeightedSimplex ws;
            ws.weight = sx.at("weight").get<long long>();
            for (const auto& vtx : sx.at("vertices")) {
                walls::Point p;
                for (const auto& x : vtx) p.push_back(rat_from_json(x));
                if (static_cast<int>(p.size()) != sc.dimension())
                    fail(ErrorCode::IoError, "vertex dimension mismatch");
                ws.simplex.vertices.push_back(std::move(p));
            }
            chain.simplices.push_back(std::move(ws));
        }
        chain.validate();
        if (ch.contains("dim") && ch.at("dim").get<int>() != chain.dim())
            fail(ErrorCode::IoError, "stored chain dimension disagrees with simplices");
        sc.chains.push_back(std::move(chain));
    }
    return sc;
}

} // namespace fourfold::io

#endif
