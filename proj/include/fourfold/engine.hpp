#ifndef FOURFOLD_ENGINE_HPP
#define FOURFOLD_ENGINE_HPP

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json_io.hpp"
#include "script.hpp"
#include "version.hpp"

namespace fourfold::engine {

using nlohmann::json;

struct RunConfig {
    bool mod2 = true;            // display values mod 2 (the engine computes mod 2 throughout)
    bool show_int_flags = false; // annotate values with integer-definedness
    long long r_star = kDefaultRStar;
    std::string out_dir = ".";
};

struct RunReport {
    json body;        // everything except timing
    double timing_ms = 0.0;
    bool ok = false;
    int exit_code = 1;

    json full() const
    {
        json o = body;
        o["timing_ms"] = timing_ms;
        return o;
    }
};

// ---------------------------------------------------------------------------
// Execution.
// ---------------------------------------------------------------------------

namespace detail {

struct Env {
    std::map<std::string, std::shared_ptr<const ManifoldModel>> models;
    std::map<std::string, FamilyElement> families;

    std::shared_ptr<const ManifoldModel> model(const std::string& name) const
    {
        auto it = models.find(name);
        if (it == models.end()) fail(ErrorCode::Precondition, "unbound model '" + name + "'");
        return it->second;
    }
    const FamilyElement& family(const std::string& name) const
    {
        auto it = families.find(name);
        if (it == families.end()) fail(ErrorCode::Precondition, "unbound family '" + name + "'");
        return it->second;
    }
};

inline json homeo_json(const HomeoType& h)
{
    return {{"b2", h.b2}, {"sigma", h.sigma}, {"parity", std::string(parity_name(h.parity))}};
}

inline ManifoldModel eval_model_expr(const script::ModelExpr& e, const Env& env)
{
    using Kind = script::ModelExpr::Kind;
    switch (e.kind) {
        case Kind::elliptic:
            return make_elliptic(e.n);
        case Kind::standard: {
            if (e.piece == "S2xS2") return make_standard(StandardPiece::s2xs2);
            if (e.piece == "CP2") return make_standard(StandardPiece::cp2);
            if (e.piece == "CP2bar") return make_standard(StandardPiece::cp2bar);
            return make_standard(StandardPiece::s4);
        }
        case Kind::logt:
            return log_transform(*env.model(e.arg0), static_cast<int>(e.nucleus), e.multiplicity);
        case Kind::csum:
            return connected_sum(*env.model(e.arg0), *env.model(e.arg1));
        case Kind::fsum:
            return fiber_sum(*env.model(e.arg0), *env.model(e.arg1),
                             static_cast<int>(e.nucleus_left), static_cast<int>(e.nucleus_right));
        case Kind::zbuild:
            return build_Z(static_cast<int>(e.zp), static_cast<int>(e.zr),
                           static_cast<int>(e.zs));
    }
    fail(ErrorCode::Precondition, "corrupt model expression");
}

inline FamilyElement eval_fam_expr(const script::FamExpr& e, const Env& env)
{
    using Kind = script::FamExpr::Kind;
    switch (e.kind) {
        case Kind::base:
            return base_family(e.q, env.model(e.on));
        case Kind::suspend:
            return suspend(env.family(e.arg0));
        case Kind::commstep: {
            const FamilyElement& f = env.family(e.arg0);
            if (!f.host->z)
                fail(ErrorCode::Precondition, "commstep needs a family on a Z(p,r,s) host");
            const ZInfo& z = *f.host->z;
            if (z.s < 1)
                fail(ErrorCode::Precondition,
                     "commstep needs a transformed block to absorb (host has s = 0)");
            return commutator_step(f, z.level, z.r, z.s - 1);
        }
        case Kind::compose:
            return compose(env.family(e.arg0), env.family(e.arg1));
    }
    fail(ErrorCode::Precondition, "corrupt family expression");
}

} // namespace detail

inline RunReport execute(const script::Script& script, const std::string& source,
                         const RunConfig& config = {})
{
    auto t0 = std::chrono::steady_clock::now();
    RunReport report;
    json& body = report.body;
    body["engine"] = "fourfold";
    body["version"] = std::string(kVersion);
    body["input_hash"] = io::fnv1a_hex(source);
    body["config"] = {{"mod2", config.mod2},
                      {"show_int_flags", config.show_int_flags},
                      {"r_star", config.r_star}};

    detail::Env env;
    json statements = json::array();
    bool exec_error = false;
    long long total_violations = 0;
    bool all_certificates_true = true;

    for (size_t idx = 0; idx < script.statements.size(); ++idx) {
        const script::Statement& st = script.statements[idx];
        json entry;
        entry["index"] = idx;
        entry["line"] = st.span.line;
        try {
            using Kind = script::Statement::Kind;
            switch (st.kind) {
                case Kind::let_model: {
                    ManifoldModel m = detail::eval_model_expr(st.model, env);
                    entry["kind"] = "let";
                    entry["name"] = st.name;
                    entry["model"] = m.name;
                    entry["homeo"] = detail::homeo_json(m.homeo);
                    entry["sw_support"] = m.sw.support.size();
                    env.models.emplace(st.name, std::make_shared<const ManifoldModel>(std::move(m)));
                    break;
                }
                case Kind::let_family: {
                    FamilyElement f = detail::eval_fam_expr(st.family, env);
                    entry["kind"] = "fam";
                    entry["name"] = st.name;
                    entry["host"] = f.host->name;
                    entry["k"] = f.k;
                    entry["support"] = f.invariant.size();
                    entry["construction"] = family_construction_text(f.construction);
                    env.families.emplace(st.name, std::move(f));
                    break;
                }
                case Kind::eval: {
                    entry["kind"] = "eval";
                    entry["family"] = st.name;
                    json rows = json::array();
                    if (env.families.count(st.name)) {
                        const FamilyElement& f = env.family(st.name);
                        for (long long l = st.ell_lo; l <= st.ell_hi; ++l) {
                            EvalResult r = evaluate(f, f.probe(l));
                            json row = {{"ell", l},
                                        {"class", f.probe(l).to_string()},
                                        {"value", r.value}};
                            if (config.show_int_flags) row["integer_defined"] = r.integer_defined;
                            rows.push_back(row);
                        }
                    } else {
                        // Model table: basic-class values along the first
                        // marked torus, indexed by the integer l.
                        auto m = env.model(st.name);
                        if (m->nuclei.empty())
                            fail(ErrorCode::Precondition,
                                 "model '" + st.name + "' has no marked torus to index by");
                        int label = m->nuclei.front().label;
                        for (const auto& nu : m->nuclei) label = std::min(label, nu.label);
                        CohClass t = CohClass::unit(m->nucleus(label).torus);
                        for (long long l = st.ell_lo; l <= st.ell_hi; ++l) {
                            CohClass c = t * (2 * l);
                            rows.push_back({{"ell", l},
                                            {"class", c.to_string()},
                                            {"value", m->sw.at(c)}});
                        }
                    }
                    entry["rows"] = rows;
                    break;
                }
                case Kind::certify: {
                    std::vector<FamilyElement> fams;
                    for (const auto& id : st.ids) fams.push_back(env.family(id));
                    IndependenceCertificate cert = independence_certificate(fams);
                    entry["kind"] = "certify";
                    entry["families"] = st.ids;
                    entry["certificate"] = io::to_json(cert);
                    if (!cert.verdict) all_certificates_true = false;
                    break;
                }
                case Kind::check: {
                    entry["kind"] = "check";
                    entry["name"] = st.name;
                    json vio = json::array();
                    if (env.models.count(st.name)) {
                        for (const auto& v : validate_model(*env.model(st.name)))
                            vio.push_back({{"kind", v.kind}, {"detail", v.detail}});
                    } else {
                        for (const auto& v : validate_family(env.family(st.name)))
                            vio.push_back({{"kind", v.kind}, {"detail", v.detail}});
                    }
                    total_violations += static_cast<long long>(vio.size());
                    entry["violations"] = vio;
                    break;
                }
                case Kind::rewrite: {
                    auto m = env.model(st.name);
                    entry["kind"] = "rewrite";
                    entry["name"] = st.name;
                    TreePtr rewritten = mm_rewrite(m->construction);
                    ManifoldModel after = evaluate_tree(rewritten);
                    entry["rule"] = rewritten->rule;
                    entry["tree"] = tree_to_text(rewritten);
                    entry["homeo_before"] = detail::homeo_json(m->homeo);
                    entry["homeo_after"] = detail::homeo_json(after.homeo);
                    if (!(after.homeo == m->homeo))
                        fail(ErrorCode::Precondition, "rewrite changed the homeomorphism data");
                    break;
                }
                case Kind::export_: {
                    entry["kind"] = "export";
                    entry["name"] = st.name;
                    std::string path = config.out_dir + "/" + st.path;
                    json payload = env.models.count(st.name)
                                       ? io::to_json(*env.model(st.name))
                                       : io::to_json(env.family(st.name));
                    std::ofstream os(path);
                    if (!os) fail(ErrorCode::IoError, "cannot write '" + path + "'");
                    os << payload.dump(2) << "\n";
                    entry["path"] = st.path;
                    break;
                }
            }
        } catch (const EngineError& e) {
            entry["error"] = {{"code", std::string(error_code_name(e.code()))},
                              {"message", e.what()},
                              {"line", st.span.line},
                              {"col", st.span.col}};
            statements.push_back(entry);
            exec_error = true;
            break;
        }
        statements.push_back(entry);
    }

    body["statements"] = statements;
    body["violations"] = total_violations;
    body["certificates_all_true"] = all_certificates_true;
    report.ok = !exec_error && total_violations == 0 && all_certificates_true;
    body["ok"] = report.ok;
    body["report_hash"] = io::fnv1a_hex(body.dump());
    report.exit_code = report.ok ? 0 : 1;
    report.timing_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

// ---------------------------------------------------------------------------
// Plain-text emitter.
// ---------------------------------------------------------------------------

inline std::string render_table(const RunReport& report)
{
    const json& body = report.body;
    std::ostringstream os;
    os << "fourfold " << body["version"].get<std::string>() << "  input "
       << body["input_hash"].get<std::string>() << "\n";
    for (const auto& st : body["statements"]) {
        std::string kind = st.contains("kind") ? st["kind"].get<std::string>() : "error";
        if (st.contains("error")) {
            const json& e = st["error"];
            os << "error at line " << e["line"] << ": " << e["message"].get<std::string>() << "\n";
            continue;
        }
        if (kind == "let") {
            const json& h = st["homeo"];
            os << "let " << st["name"].get<std::string>() << " = " << st["model"].get<std::string>()
               << "   (b2=" << h["b2"] << ", sigma=" << h["sigma"] << ", "
               << h["parity"].get<std::string>() << ")  |sw|=" << st["sw_support"] << "\n";
        } else if (kind == "fam") {
            os << "fam " << st["name"].get<std::string>() << " on " << st["host"].get<std::string>()
               << "   k=" << st["k"] << "  support=" << st["support"] << "\n";
        } else if (kind == "eval") {
            os << "eval " << st["family"].get<std::string>() << "\n";
            os << "  " << std::setw(6) << "ell" << "  " << std::setw(5) << "value" << "  class\n";
            for (const auto& row : st["rows"]) {
                os << "  " << std::setw(6) << row["ell"].get<long long>() << "  " << std::setw(5)
                   << row["value"].get<int>() << "  " << row["class"].get<std::string>() << "\n";
            }
        } else if (kind == "certify") {
            const json& cert = st["certificate"];
            os << "certify";
            for (const auto& id : st["families"]) os << " " << id.get<std::string>();
            os << "\n";
            for (const auto& row : cert["matrix"]) {
                os << "  ";
                for (const auto& v : row) os << v.get<int>() << " ";
                os << "\n";
            }
            os << "  verdict: " << (cert["verdict"].get<bool>() ? "unitriangular" : "FAILED")
               << (cert["integer_defined"].get<bool>() ? " (integer-defined)" : "") << "\n";
        } else if (kind == "check") {
            os << "check " << st["name"].get<std::string>() << ": " << st["violations"].size()
               << " violation(s)\n";
            for (const auto& v : st["violations"])
                os << "  " << v["kind"].get<std::string>() << ": " << v["detail"].get<std::string>()
                   << "\n";
        } else if (kind == "rewrite") {
            os << "rewrite " << st["name"].get<std::string>() << " via "
               << st["rule"].get<std::string>() << "  -> " << st["tree"].get<std::string>() << "\n";
        } else if (kind == "export") {
            os << "export " << st["name"].get<std::string>() << " -> " << st["path"].get<std::string>()
               << "\n";
        }
    }
    os << (report.ok ? "ok" : "FAILED") << "\n";
    return os.str();
}

} // namespace fourfold::engine

#endif
