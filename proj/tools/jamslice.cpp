// jamslice: validate configs and manifests, run experiments, report results.

#include "jamslice/errors.hpp"
#include "jamslice/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace jamslice;
namespace fs = std::filesystem;

namespace {

nlohmann::json read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read " + path);
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

// A scenario config has a "run" or "topology" section; a manifest has
// "scenarios", "recipes" or "seeds".
bool looks_like_manifest(const nlohmann::json& j) {
    return j.is_object() && (j.contains("scenarios") || j.contains("recipes") || j.contains("seeds") || j.contains("base"));
}

int cmd_validate(const std::string& path) {
    const auto j = read_file(path);
    std::vector<std::string> errs;
    if (looks_like_manifest(j)) {
        try {
            errs = validate_manifest(manifest_from_json(j));
        } catch (const ConfigError& e) {
            errs = e.issues();
        }
    } else {
        try {
            errs = validate(config_from_json(j));
        } catch (const ConfigError& e) {
            errs = e.issues();
        }
    }
    if (errs.empty()) {
        std::cout << path << ": ok\n";
        return 0;
    }
    for (const auto& e : errs) std::cerr << path << ": " << e << "\n";
    return 1;
}

int cmd_run(const std::string& manifest_path, const std::vector<std::string>& recipe_names,
            const std::optional<std::string>& out, int parallel, std::uint64_t offset) {
    ExperimentManifest m;
    if (!manifest_path.empty()) {
        m = load_manifest(manifest_path);
    } else {
        m.name = recipe_names.empty() ? "experiment" : recipe_names.front();
    }
    for (const auto& r : recipe_names) m.recipes.push_back(r);
    if (m.scenarios.empty() && m.recipes.empty()) throw ConfigError("run: give --manifest or --recipe");
    RunOptions opt;
    opt.out = output_dir(m, out);
    opt.parallel = parallel;
    opt.seed_offset = offset;
    opt.log = [](const std::string& s) { std::cerr << s << "\n"; };
    const RunOutcome r = run_experiment(m, opt);
    std::cout << r.completed << " runs written to " << opt.out.string() << "\n";
    for (const auto& f : r.failures) std::cerr << "failed: " << f << "\n";
    return r.failures.empty() ? 0 : 2;
}

int cmd_report(const std::string& dir, bool write) {
    const ResultSet res = load_results(dir);
    const std::string text = report_text(res);
    if (write) {
        std::ofstream os(fs::path(dir) / "report.md", std::ios::binary);
        os << text;
    }
    std::cout << text;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jamming attacks and defenses on DTRL network slicing"};
    app.require_subcommand(1);

    std::string validate_path;
    auto* v = app.add_subcommand("validate", "check a scenario config or an experiment manifest");
    v->add_option("path", validate_path, "config or manifest file")->required();

    std::string manifest;
    std::vector<std::string> recipe_names;
    std::optional<std::string> out;
    int parallel = 1;
    std::uint64_t offset = 0;
    auto* r = app.add_subcommand("run", "execute a manifest and/or recipes");
    r->add_option("--manifest", manifest, "experiment manifest (JSON)");
    r->add_option("--recipe", recipe_names, "recipe to run, repeatable");
    r->add_option("--out", out, "output directory (default $JAMSLICE_OUT/<name> or the manifest's output)");
    r->add_option("--parallel", parallel, "concurrent runs")->check(CLI::Range(1, 256));
    r->add_option("--seed-offset", offset, "added to every manifest seed");

    std::string results;
    bool no_write = false;
    auto* rep = app.add_subcommand("report", "summarize a results directory");
    rep->add_option("dir", results, "results directory")->required();
    rep->add_flag("--no-write", no_write, "print only, leave report.md untouched");

    app.add_subcommand("list-recipes", "list the figure and table recipes");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*v) return cmd_validate(validate_path);
        if (*r) return cmd_run(manifest, recipe_names, out, parallel, offset);
        if (*rep) return cmd_report(results, !no_write);
        for (const auto& x : recipes())
            std::cout << x.name << "  " << x.description << " (" << x.scenarios.size() << " scenarios)\n";
        return 0;
    } catch (const ConfigError& e) {
        for (const auto& i : e.issues()) std::cerr << "error: " << i << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
