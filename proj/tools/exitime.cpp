#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "exitime/commands.hpp"

namespace {

void add_common(CLI::App* sub, exitime::RunConfig& c, std::string& config_file) {
    sub->add_option("--config", config_file, "read settings from a JSON config or an output file carrying one");
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--jobs", c.jobs, "worker threads (0 = all cores)");
}

void add_output(CLI::App* sub, exitime::RunConfig& c) {
    sub->add_option("--out", c.out, "output path");
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

} // namespace

int main(int argc, char** argv) {
    exitime::RunConfig c;
    std::string config_file;

    CLI::App app{"Exit and transit time statistics for volume-preserving maps"};
    app.require_subcommand(1);

    auto* verify = app.add_subcommand("verify", "check the closed-form examples and identities");
    add_common(verify, c, config_file);

    auto* decompose = app.add_subcommand("decompose", "sampled transit-time decomposition of a region");
    add_common(decompose, c, config_file);
    add_output(decompose, c);
    decompose->add_option("--map", c.map, "linear, diag, shear or henon")
        ->check(CLI::IsMember({"linear", "diag", "shear", "henon"}));
    decompose->add_option("--lambda", c.lambda, "expansion rate of the linear map");
    decompose->add_option("--eigenvalues", c.eigenvalues, "diagonal map spectrum, expanding first")->delimiter(',');
    decompose->add_option("--k", c.k, "Henon parameter");
    decompose->add_option("--n-pixels", c.n_pixels, "zone resolution for --map henon");
    decompose->add_option("--t-max", c.t_max, "iteration budget");
    decompose->add_option("--bins", c.bins, "number of j bins (0 = up to the largest observed)");
    decompose->add_option("--samples", c.samples, "number of samples of the entry box");
    decompose->add_option("--mode", c.mode, "stratified or random")->check(CLI::IsMember({"stratified", "random"}));

    auto* zone = app.add_subcommand("henon-zone", "resonance zone boundary and areas of the Henon map");
    add_common(zone, c, config_file);
    add_output(zone, c);
    zone->add_option("--k", c.k, "Henon parameter");
    zone->add_option("--n-pixels", c.n_pixels, "boundary resolution");

    auto* sweep = app.add_subcommand("sweep", "lobe-quadrature sweep over the Henon parameter");
    add_common(sweep, c, config_file);
    add_output(sweep, c);
    sweep->add_option("--k-min", c.k_min, "first k");
    sweep->add_option("--k-max", c.k_max, "last k");
    sweep->add_option("--steps", c.steps, "number of k values");
    sweep->add_option("--n-pixels", c.n_pixels, "fibers across the lobe");
    sweep->add_option("--t-max", c.t_max, "iteration budget");
    sweep->add_option("--tol", c.tol, "relative exit-time tolerance for fiber refinement");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        CLI::App* chosen = app.get_subcommands().front();
        if (!config_file.empty()) {
            // file values are the base, flags given on the command line win
            exitime::RunConfig base = exitime::read_embedded_config(exitime::read_file(config_file));
            app.clear();
            c = base;
            app.parse(argc, argv);
        }
        c.subcommand = chosen->get_name();
        const exitime::CommandOutput out = exitime::run_command(c);
        std::cout << out.report;
        out.write_all();
        for (const auto& f : out.files) std::cout << "wrote " << f.path << "\n";
        return out.status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
