#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fourfold/engine.hpp"
#include "fourfold/json_io.hpp"

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream is(path);
    if (!is) {
        std::cerr << "cannot read '" << path << "'\n";
        std::exit(2);
    }
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

int run_script(const std::string& path, bool as_json, const fourfold::engine::RunConfig& config)
{
    std::string source = slurp(path);
    fourfold::script::Script script;
    try {
        script = fourfold::script::parse(source);
    } catch (const fourfold::script::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    }
    fourfold::engine::RunReport report = fourfold::engine::execute(script, source, config);
    if (as_json)
        std::cout << report.full().dump(2) << "\n";
    else
        std::cout << fourfold::engine::render_table(report);
    return report.exit_code;
}

int check_model(const std::string& path)
{
    nlohmann::json doc = nlohmann::json::parse(slurp(path));
    fourfold::ManifoldModel m = fourfold::io::model_from_json(doc);
    auto violations = fourfold::validate_model(m);
    for (const auto& v : violations) std::cout << v.kind << ": " << v.detail << "\n";
    std::cout << m.name << ": " << violations.size() << " violation(s)\n";
    return violations.empty() ? 0 : 1;
}

int run_walls(const std::string& path, bool as_json)
{
    using namespace fourfold;
    io::WallScenario sc = io::scenario_from_json(nlohmann::json::parse(slurp(path)));
    nlohmann::json results = nlohmann::json::array();
    for (size_t w = 0; w < sc.walls.size(); ++w) {
        for (size_t c = 0; c < sc.chains.size(); ++c) {
            const walls::Wall& wall = sc.walls[w];
            const walls::Chain& chain = sc.chains[c];
            nlohmann::json row = {{"wall", w}, {"chain", c}};
            if (chain.dim() == wall.codim()) {
                row["op"] = "crossing-count";
                row["value"] = walls::signed_crossing_count(chain, wall);
            } else if (chain.dim() + 1 == wall.codim() && walls::is_cycle(chain)) {
                row["op"] = "cycle-invariant";
                row["value"] = walls::invariant_of_cycle(chain, wall);
            } else {
                continue;
            }
            results.push_back(row);
        }
    }
    if (as_json) {
        std::cout << nlohmann::json({{"dimension", sc.dimension()}, {"results", results}}).dump(2)
                  << "\n";
    } else {
        std::cout << "wall  chain  op               value\n";
        for (const auto& row : results) {
            std::ostringstream line;
            line << row["wall"].get<int>() << "     " << row["chain"].get<int>() << "      "
                 << row["op"].get<std::string>();
            std::string s = line.str();
            s.resize(s.size() < 30 ? 30 : s.size(), ' ');
            std::cout << s << " " << row["value"].get<long long>() << "\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"fourfold: a calculus for tracked 4-manifold data and mod-2 family invariants"};
    app.require_subcommand(1);

    // Read and ignored: the core engine has no randomness.
    if (std::getenv("FOURFOLD_SEED") != nullptr) {
        // nothing to seed
    }

    std::string script_path;
    bool json_out = false, table_out = false;
    fourfold::engine::RunConfig config;
    bool mod2 = true;

    CLI::App* run = app.add_subcommand("run", "run a construction script");
    run->add_option("script", script_path, "script file")->required();
    run->add_flag("--json", json_out, "emit the run report as JSON");
    run->add_flag("--table", table_out, "emit the run report as plain text (default)");
    run->add_flag("--mod2,!--no-mod2", mod2, "display mod-2 values (default)");
    run->add_flag("--show-int-flags", config.show_int_flags, "annotate integer-definedness");
    run->add_option("--r-star", config.r_star, "realizability threshold");
    run->add_option("--out", config.out_dir, "directory for exported files");

    std::string model_path;
    CLI::App* check = app.add_subcommand("check", "validate an exported model file");
    check->add_option("model", model_path, "model JSON file")->required();

    std::string scenario_path;
    bool walls_json = false;
    CLI::App* walls = app.add_subcommand("walls", "exact crossing counts for a wall scenario");
    walls->add_option("scenario", scenario_path, "scenario JSON file")->required();
    walls->add_flag("--json", walls_json, "emit results as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            config.mod2 = mod2;
            return run_script(script_path, json_out && !table_out, config);
        }
        if (check->parsed()) return check_model(model_path);
        if (walls->parsed()) return run_walls(scenario_path, walls_json);
    } catch (const fourfold::EngineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "json error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
