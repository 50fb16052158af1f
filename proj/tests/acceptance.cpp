// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "fourfold/engine.hpp"
#include "fourfold/gf2.hpp"
#include "helpers.hpp"

using namespace fourfold;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail = "")
{
    std::printf("criterion %2d  %-34s  %s%s%s\n", index, name.c_str(), pass ? "PASS" : "FAIL",
                detail.empty() ? "" : "  ", detail.c_str());
    if (!pass) ++failures;
}

double ms_since(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string ms_text(double ms)
{
    std::ostringstream os;
    os.precision(1);
    os << std::fixed << "(" << ms << " ms)";
    return os.str();
}

// Independent mod-2 rank oracle: column elimination on bit rows.
int rank_oracle(const std::vector<std::vector<int>>& m)
{
    std::vector<unsigned long long> rows;
    for (const auto& r : m) {
        unsigned long long bits = 0;
        for (size_t j = 0; j < r.size(); ++j)
            if (r[j] & 1) bits |= 1ull << j;
        rows.push_back(bits);
    }
    int rank = 0;
    for (int bit = 0; bit < 64; ++bit) {
        unsigned long long mask = 1ull << bit;
        size_t pivot = rows.size();
        for (size_t i = 0; i < rows.size(); ++i)
            if (rows[i] & mask) {
                pivot = i;
                break;
            }
        if (pivot == rows.size()) continue;
        unsigned long long prow = rows[pivot];
        rows.erase(rows.begin() + static_cast<long>(pivot));
        for (auto& r : rows)
            if (r & mask) r ^= prow;
        ++rank;
    }
    return rank;
}

// Direct restatement of the realizability predicate, kept separate from the
// library implementation on purpose.
bool gate_oracle(long long b2, long long sigma, bool even, long long r_star)
{
    if (!(b2 > r_star)) return false;
    long long a = sigma < 0 ? -sigma : sigma;
    if (!(13 * a <= 3 * b2)) return false;
    long long bplus = (b2 + sigma) / 2;
    if (bplus % 2 == 0) return false;
    if (even && ((sigma % 16) + 16) % 16 != 0) return false;
    return true;
}

// --------------------------------------------------------------------------

void criterion_1_log_transform_table()
{
    auto t0 = Clock::now();
    bool ok = true;
    ManifoldModel e2 = make_elliptic(2);
    for (long long q = 0; q <= 25 && ok; ++q) {
        ManifoldModel m = log_transform(e2, 1, 2 * q + 1);
        if (m.sw.support.size() != static_cast<size_t>(2 * q + 1)) ok = false;
        for (long long l = -q - 4; l <= q + 4; ++l) {
            int want = std::abs(l) <= q ? 1 : 0;
            if (m.sw.at(CohClass::unit("T1", 2 * l)) != want) ok = false;
        }
        if (m.homeo != e2.homeo) ok = false;
    }
    double ms = ms_since(t0);
    report(1, "log-transform table q<=25", ok && ms < 1000.0, ms_text(ms));
}

void criterion_2_base_families()
{
    auto t0 = Clock::now();
    bool ok = true;
    auto z0 = std::make_shared<const ManifoldModel>(build_Z(0, 0, 0));
    std::vector<FamilyElement> fams;
    for (long long q = 1; q <= 25; ++q) {
        FamilyElement f = base_family(q, z0);
        fams.push_back(f);
        if (f.invariant.size() != static_cast<size_t>(2 * q)) ok = false;
        for (long long l = -q - 2; l <= q + 2; ++l) {
            int want = (l != 0 && std::abs(l) <= q) ? 1 : 0;
            if (evaluate(f, f.probe(l)).value != want) ok = false;
        }
        std::set<CohClass> want_support;
        for (long long l = 1; l <= q; ++l) {
            want_support.insert(CohClass::unit("T1", 2 * l));
            want_support.insert(CohClass::unit("T1", -2 * l));
        }
        if (f.invariant != want_support) ok = false;
    }
    // composition homomorphism, exhaustively over the union of supports
    for (size_t i = 0; i < fams.size() && ok; ++i) {
        for (size_t j = i; j < fams.size(); ++j) {
            FamilyElement c = compose(fams[i], fams[j]);
            std::set<CohClass> all = fams[i].invariant;
            all.insert(fams[j].invariant.begin(), fams[j].invariant.end());
            for (const auto& cls : all)
                if (evaluate(c, cls).value !=
                    (evaluate(fams[i], cls).value ^ evaluate(fams[j], cls).value))
                    ok = false;
            if (i == j && !c.invariant.empty()) ok = false;
        }
    }
    report(2, "base families q<=25", ok, ms_text(ms_since(t0)));
}

void criterion_3_main_recursion()
{
    auto t0 = Clock::now();
    bool ok = true;
    for (int p = 1; p <= 6 && ok; ++p)
        for (int r = 0; r <= 2 && ok; ++r)
            for (int s = 0; s <= 2 && ok; ++s)
                for (long long q = 1; q <= 10 && ok; ++q) {
                    FamilyElement f = alpha_family(p, q, r, s);
                    if (f.k != p) ok = false;
                    for (long long l = -q - 2; l <= q + 2; ++l) {
                        int want = (l != 0 && std::abs(l) <= q) ? 1 : 0;
                        if (evaluate(f, f.probe(l)).value != want) ok = false;
                    }
                    if (f.invariant.size() != static_cast<size_t>(2 * q)) ok = false;
                }
    double ms = ms_since(t0);
    report(3, "main recursion p<=6 q<=10 r,s<=2", ok && ms < 5000.0, ms_text(ms));
}

void criterion_4_independence_certificate()
{
    auto t0 = Clock::now();
    std::vector<FamilyElement> fams;
    for (long long q = 1; q <= 20; ++q) fams.push_back(alpha_family(2, q, 0, 1));
    IndependenceCertificate cert = independence_certificate(fams);
    bool ok = cert.verdict && cert.integer_defined;
    ok = ok && cert.matrix.size() == 20;
    ok = ok && gf2::is_lower_unitriangular(cert.matrix);
    ok = ok && rank_oracle(cert.matrix) == 20;
    report(4, "20-family certificate, full rank", ok, ms_text(ms_since(t0)));
}

void criterion_5_rewrite_soundness()
{
    auto t0 = Clock::now();
    bool ok = true;
    std::mt19937 rng(20260101);
    std::uniform_int_distribution<int> depth(0, 2), extras(0, 2), coin(0, 9);
    int applicable = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        ManifoldModel m = testing::random_symplectic_model(rng, depth(rng));
        int n = extras(rng);
        bool with_sss = coin(rng) < 7;
        if (with_sss) m = connected_sum(m, make_standard(StandardPiece::s2xs2));
        for (int i = 0; i < n; ++i)
            m = connected_sum(m, coin(rng) < 5 ? make_standard(StandardPiece::cp2bar)
                                               : make_standard(StandardPiece::s2xs2));
        try {
            TreePtr r = mm_rewrite(m.construction);
            ManifoldModel after = evaluate_tree(r);
            if (!(after.homeo == m.homeo)) ok = false;
            ++applicable;
        } catch (const EngineError& e) {
            if (e.code() != ErrorCode::NoRewrite) ok = false;
        }
    }
    if (applicable < 300) ok = false;

    // the worked case
    ManifoldModel e2 = make_elliptic(2);
    ManifoldModel lhs =
        connected_sum(fiber_sum(e2, e2, 3, 3), make_standard(StandardPiece::s2xs2));
    ManifoldModel rhs = evaluate_tree(mm_rewrite(lhs.construction));
    HomeoType want{48, -32, Parity::even};
    if (!(lhs.homeo == want) || !(rhs.homeo == want)) ok = false;

    report(5, "rewrite soundness, 1000 trees", ok,
           ms_text(ms_since(t0)) + " applicable=" + std::to_string(applicable));
}

void criterion_6_symplectic_dimension_identity()
{
    auto t0 = Clock::now();
    bool ok = true;
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> depth(0, 5);
    for (int trial = 0; trial < 250; ++trial) {
        ManifoldModel m = testing::random_symplectic_model(rng, depth(rng));
        if (!m.symplectic || !m.canonical) {
            ok = false;
            continue;
        }
        if (virtual_dimension(m.square(*m.canonical), m.homeo) != 0) ok = false;
    }
    report(6, "canonical dimension identity", ok, ms_text(ms_since(t0)));
}

void criterion_7_validator()
{
    auto t0 = Clock::now();
    bool ok = true;

    std::vector<ManifoldModel> engine_models;
    engine_models.push_back(make_elliptic(2));
    engine_models.push_back(make_elliptic(4));
    for (StandardPiece p : {StandardPiece::s2xs2, StandardPiece::cp2, StandardPiece::cp2bar,
                            StandardPiece::s4})
        engine_models.push_back(make_standard(p));
    for (long long q = 1; q <= 5; ++q)
        engine_models.push_back(log_transform(make_elliptic(2), 1, 2 * q + 1));
    engine_models.push_back(fiber_sum(make_elliptic(2), make_elliptic(2), 3, 3));
    engine_models.push_back(connected_sum(log_transform(make_elliptic(2), 1, 3),
                                          make_standard(StandardPiece::cp2bar)));
    for (int p = 0; p <= 2; ++p)
        for (int r = 0; r <= 1; ++r)
            for (int s = 0; s <= 1; ++s) engine_models.push_back(build_Z(p, r, s));
    std::mt19937 rng(8);
    for (int t = 0; t < 40; ++t)
        engine_models.push_back(testing::random_symplectic_model(rng, 3));
    for (const auto& m : engine_models)
        if (!validate_model(m).empty()) ok = false;

    // three seeded negative fixtures
    auto has = [](const std::vector<Violation>& v, const std::string& kind) {
        for (const auto& x : v)
            if (x.kind == kind) return true;
        return false;
    };
    ManifoldModel bad1 = make_elliptic(2);
    bad1.sw.support.insert(CohClass::unit("S1", 2));
    if (!has(validate_model(bad1), "AdjunctionViolation")) ok = false;

    ManifoldModel bad2 = connected_sum(make_elliptic(2), make_standard(StandardPiece::s2xs2));
    bad2.sw.support.insert(CohClass::unit("A", 2) + CohClass::unit("B", 2));
    if (!has(validate_model(bad2), "SimpleTypeViolation")) ok = false;

    ManifoldModel bad3 = make_elliptic(2);
    bad3.sw.support.insert(CohClass::unit("S1", 1));
    if (!has(validate_model(bad3), "NonCharacteristicSupport")) ok = false;

    report(7, "validator, engine models clean", ok, ms_text(ms_since(t0)));
}

void criterion_8_blow_up_rule()
{
    auto t0 = Clock::now();
    bool ok = true;
    std::vector<ManifoldModel> xs;
    xs.push_back(make_elliptic(2));
    xs.push_back(log_transform(make_elliptic(2), 1, 3));
    xs.push_back(log_transform(make_elliptic(2), 1, 5));
    for (const auto& x : xs) {
        ManifoldModel b = connected_sum(x, make_standard(StandardPiece::cp2bar));
        if (b.sw.support.size() != 2 * x.sw.support.size()) ok = false;
        for (const auto& c : x.sw.support) {
            if (b.sw.at(c.shifted("E", 1)) != x.sw.at(c)) ok = false;
            if (b.sw.at(c.shifted("E", -1)) != x.sw.at(c)) ok = false;
        }
        for (const auto& c : b.sw.support) {
            long long e = c.coeff("E");
            if (e != 1 && e != -1) ok = false;
            if (x.sw.at(c.shifted("E", -e)) != 1) ok = false;
        }
    }
    report(8, "blow-up rule, exhaustive", ok, ms_text(ms_since(t0)));
}

void criterion_9_wall_toy()
{
    using namespace fourfold::walls;
    auto t0 = Clock::now();
    bool ok = true;

    // standard one-parameter datum: a straight path through one wall
    {
        std::string path = std::string(FOURFOLD_SOURCE_DIR) + "/scripts/standard_wall.json";
        std::ifstream is(path);
        std::ostringstream ss;
        ss << is.rdbuf();
        io::WallScenario sc = io::scenario_from_json(nlohmann::json::parse(ss.str()));
        if (sc.walls.size() != 1 || sc.chains.size() != 1) ok = false;
        if (signed_crossing_count(sc.chains[0], sc.walls[0]) != 1) ok = false;
    }

    std::mt19937 rng(90210);
    auto rnd_rat = [&rng]() {
        std::uniform_int_distribution<long long> num(-8, 8), den(1, 4);
        return Rat(num(rng), den(rng));
    };
    auto rnd_point = [&](int n) {
        Point p;
        for (int i = 0; i < n; ++i) p.push_back(rnd_rat());
        return p;
    };
    auto rnd_chain = [&](int n, int dim, int count) {
        Chain c;
        std::uniform_int_distribution<long long> w(-2, 2);
        for (int i = 0; i < count; ++i) {
            WeightedSimplex ws;
            ws.weight = w(rng);
            if (ws.weight == 0) ws.weight = 1;
            for (int v = 0; v <= dim; ++v) ws.simplex.vertices.push_back(rnd_point(n));
            c.simplices.push_back(std::move(ws));
        }
        return c;
    };
    auto rnd_wall = [&](int n, int codim) {
        Wall w;
        for (int i = 0; i < codim; ++i) {
            AffineFunctional L;
            L.normal.assign(n, Rat(0));
            L.normal[i] = Rat(1);
            for (int j = codim; j < n; ++j) L.normal[j] = rnd_rat();
            L.offset = rnd_rat();
            w.functionals.push_back(std::move(L));
        }
        return w;
    };

    // bounding-chain independence, 500 instances
    int done = 0;
    while (done < 500) {
        int n = 2 + static_cast<int>(rng() % 3); // dimensions 2..4
        int k = static_cast<int>(rng() % std::min<int>(3, n));
        Chain gamma = rnd_chain(n, k + 1, 2);
        Chain cycle = boundary(gamma);
        Wall w = rnd_wall(n, k + 1);
        try {
            long long a = signed_crossing_count(gamma, w);
            long long b = signed_crossing_count(cone(cycle, rnd_point(n)), w);
            long long c = signed_crossing_count(cone(cycle, rnd_point(n)), w);
            if (a != b || b != c) ok = false;
            ++done;
        } catch (const EngineError& e) {
            if (e.code() != ErrorCode::NotTransverse) throw;
        }
    }

    // boundary cycles of wall-avoiding chains count zero, 200 instances
    done = 0;
    while (done < 200) {
        int n = 2 + static_cast<int>(rng() % 3);
        int k = static_cast<int>(rng() % std::min<int>(3, n));
        Wall w = rnd_wall(n, k + 1);
        Chain gamma = rnd_chain(n, k + 1, 2);
        for (auto& ws : gamma.simplices)
            for (auto& v : ws.simplex.vertices)
                while (w.functionals[0].eval(v) <= Rat(0)) v[0] += Rat(1);
        try {
            if (signed_crossing_count(gamma, w) != 0) ok = false;
            if (invariant_of_cycle(boundary(gamma), w, rnd_point(n)) != 0) ok = false;
            ++done;
        } catch (const EngineError& e) {
            if (e.code() != ErrorCode::NotTransverse) throw;
        }
    }

    double ms = ms_since(t0);
    report(9, "wall toy, 500+200 instances", ok && ms < 10000.0, ms_text(ms));
}

void criterion_10_realizability_gate()
{
    auto t0 = Clock::now();
    bool ok = true;

    GateResult g1 = realizability_gate({22, -16, Parity::odd}, 20);
    if (g1.pass || g1.reason.find("sigma") == std::string::npos) ok = false;
    if (!realizability_gate({102, 0, Parity::even}, 100).pass) ok = false;
    GateResult g3 = realizability_gate({100, 0, Parity::odd}, 50);
    if (g3.pass || g3.reason.find("even") == std::string::npos) ok = false;

    std::mt19937 rng(161803);
    std::uniform_int_distribution<long long> b2d(2, 400), sd(-40, 40);
    std::uniform_int_distribution<int> par(0, 1), thr(0, 300);
    int tested = 0;
    while (tested < 20) {
        long long b2 = b2d(rng);
        long long sigma = sd(rng);
        if (((b2 - sigma) % 2 + 2) % 2 != 0) continue;
        if (std::abs(sigma) > b2) continue;
        bool even = par(rng) == 0;
        if (even && ((sigma % 8) + 8) % 8 != 0) continue;
        long long r_star = thr(rng);
        HomeoType h{b2, sigma, even ? Parity::even : Parity::odd};
        if (realizability_gate(h, r_star).pass != gate_oracle(b2, sigma, even, r_star)) ok = false;
        ++tested;
    }
    report(10, "realizability gate vs oracle", ok, ms_text(ms_since(t0)));
}

} // namespace

int main()
{
    criterion_1_log_transform_table();
    criterion_2_base_families();
    criterion_3_main_recursion();
    criterion_4_independence_certificate();
    criterion_5_rewrite_soundness();
    criterion_6_symplectic_dimension_identity();
    criterion_7_validator();
    criterion_8_blow_up_rule();
    criterion_9_wall_toy();
    criterion_10_realizability_gate();
    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
