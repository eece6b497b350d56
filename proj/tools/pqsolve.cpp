#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pqs/artifacts.hpp"
#include "pqs/runner.hpp"

namespace {

// --section.key=value flags override the configuration file
bool apply_overrides(pqs::KeyTree& tree, const std::vector<std::string>& overrides,
                     std::string& bad) {
    for (const auto& item : overrides) {
        std::string body = item;
        if (body.rfind("--", 0) == 0) body.erase(0, 2);
        const auto eq = body.find('=');
        if (eq == std::string::npos || eq == 0) {
            bad = item;
            return false;
        }
        tree.set(body.substr(0, eq), body.substr(eq + 1));
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"solver and verification harness for the singular (p,q)-Laplacian "
                 "Dirichlet problem -div(|Du|^{p-2}Du + |Du|^{q-2}Du) = f(x) u^{-delta}"};
    app.require_subcommand(1);

    static const std::vector<std::string> commands = {
        "solve",          "continue",      "direct",
        "oracle-torsion", "oracle-theta",  "probe-regime",
        "probe-sobolev",  "probe-compare", "probe-nonexistence",
        "verify-all"};

    std::string config_path;
    std::vector<std::string> overrides;
    for (const auto& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("-c,--config", config_path, "run configuration file");
        sub->allow_extras();  // --section.key=value overrides
    }
    CLI::App* plot = app.add_subcommand("plot-data", "rebuild the CSV bundle of a finished run");
    std::string run_dir;
    plot->add_option("run_dir", run_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : pqs::kExitError;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (sub->get_name() == "plot-data") {
            const pqs::PlotBundle bundle = pqs::emit_plot_data(run_dir);
            for (const auto& rel : bundle.written) std::cout << "wrote " << rel << "\n";
            for (const auto& msg : bundle.warnings) std::cerr << "warning: " << msg << "\n";
            return pqs::kExitPass;
        }
        pqs::KeyTree tree = config_path.empty() ? pqs::KeyTree{}
                                                : pqs::KeyTree::parse_file(config_path);
        std::string bad;
        if (!apply_overrides(tree, sub->remaining(), bad)) {
            std::cerr << "error: malformed override '" << bad << "' (expected --section.key=value)\n";
            return pqs::kExitError;
        }
        const pqs::RunConfig cfg = pqs::RunConfig::from_tree(tree);
        return pqs::run_command(sub->get_name(), cfg, std::cout);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return pqs::kExitError;
    }
}
