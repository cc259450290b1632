#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "loewner/errors.hpp"
#include "loewner/scenario.hpp"
#include "loewner/trace.hpp"

using namespace loewner;

namespace {

struct Globals {
    std::string out;
    bool json = false;
    unsigned parallel = 1;
    double tol_scale = 0.0;
};

struct OpArgs {
    std::string config;
    std::string field;
    std::string id;
    std::string plot;
};

int run_op(Operation op, const OpArgs& a, const Globals& g) {
    ScenarioConfig c;
    try {
        c = a.config.empty() ? default_config(op) : load_config(a.config);
        if (a.config.empty()) {
            if (!a.field.empty()) {
                (void)make_gallery_field(a.field);
                c.field = a.field;
            }
        } else if (c.operation != op) {
            std::cerr << "config " << a.config << " describes operation " << to_string(c.operation) << ", not "
                      << to_string(op) << "\n";
            return exit_code::config;
        }
        if (!a.id.empty()) c.id = a.id;
        if (!a.plot.empty()) {
            (void)parse_plot_kind(a.plot);
            c.plot = a.plot;
        }
        if (!g.out.empty()) c.out_dir = g.out;
        if (g.tol_scale > 0.0) c.scale = g.tol_scale;
    } catch (const LoewnerError& e) {
        std::cerr << e.what() << "\n";
        return exit_code::config;
    }

    const auto res = run_scenario(c, RunOptions{g.parallel, true});
    for (const auto& m : res.messages) std::cerr << m << "\n";
    if (g.json && res.exit_status != exit_code::config && res.exit_status != exit_code::solver) {
        std::cout << res.trace.to_json().dump(2) << "\n";
    } else {
        for (const auto& p : res.artifacts) std::cout << p << "\n";
        if (res.trace.verdicts.contains("classification")) {
            std::cout << "verdict: " << res.trace.verdicts["classification"].get<std::string>() << "\n";
        }
    }
    return res.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Loewner evolution scenarios: flows, spectral functions, boundary classification"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--out", g.out, "Output directory (overrides output.dir)");
    app.add_flag("--json", g.json, "Print the JSON trace (or gallery) on stdout");
    app.add_option("--parallel", g.parallel, "Worker threads for grid sweeps")->check(CLI::PositiveNumber);
    app.add_option("--tol-scale", g.tol_scale, "Multiply the integrator tolerances")->check(CLI::PositiveNumber);

    struct Sub {
        Operation op;
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {Operation::evolve, "evolve", "Integrate phi_{s,t} on a disc grid and the real slice"},
        {Operation::spectral, "spectral", "Spectral function at a boundary fixed point by two routes"},
        {Operation::classify, "classify", "Classify the boundary behaviour at a point"},
        {Operation::chain_check, "chain-check", "Loewner chain residuals and condition C"},
        {Operation::embed, "embed", "Embed phi_{0,t0} with a prescribed spectral function"},
        {Operation::product_formula, "product-formula", "Product formula against the frozen semigroup"},
    };
    std::vector<std::pair<CLI::App*, Operation>> op_apps;
    OpArgs args;
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", args.config, "Scenario file")->check(CLI::ExistingFile);
        sub->add_option("--field", args.field, "Gallery field id when no config is given");
        sub->add_option("--id", args.id, "Scenario id (artifact base name)");
        sub->add_option("--plot", args.plot, "Plot kind: lambda, fan, trajectory");
        op_apps.emplace_back(sub, s.op);
    }

    auto* gallery = app.add_subcommand("gallery", "List the field gallery");

    std::string trace_path, kind, svg_path;
    auto* plot = app.add_subcommand("plot", "Render a JSON trace as SVG");
    plot->add_option("--trace", trace_path, "JSON trace")->required()->check(CLI::ExistingFile);
    plot->add_option("--kind", kind, "lambda, fan or trajectory")->required();
    plot->add_option("--svg", svg_path, "Output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help and version keep their zero status; usage errors are configuration errors.
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code::config;
    }

    if (gallery->parsed()) {
        if (g.json) {
            std::cout << gallery_json().dump(2) << "\n";
        } else {
            std::cout << gallery_text();
        }
        return 0;
    }
    if (plot->parsed()) {
        try {
            std::ifstream in(trace_path, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            const auto tr = TraceRecord::from_json(nlohmann::ordered_json::parse(ss.str()));
            emit_plot(tr, parse_plot_kind(kind), svg_path);
            std::cout << svg_path << "\n";
            return 0;
        } catch (const std::exception& e) {
            std::cerr << "plot: " << e.what() << "\n";
            return exit_code::config;
        }
    }
    for (const auto& [sub, op] : op_apps) {
        if (sub->parsed()) return run_op(op, args, g);
    }
    return exit_code::config;
}
