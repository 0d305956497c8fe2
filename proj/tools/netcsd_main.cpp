#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "netcsd/errors.hpp"
#include "netcsd/runner.hpp"

namespace {

int dispatch(const std::string& name, const std::string& scenario_path,
             const netcsd::RunOptions& options) {
    try {
        const netcsd::Subcommand cmd = netcsd::subcommand_from_name(name);
        netcsd::Scenario scenario = netcsd::load_scenario(scenario_path);
        netcsd::run(cmd, std::move(scenario), options);
        return 0;
    } catch (const netcsd::Error& e) {
        nlohmann::json err{{"error", {{"kind", e.kind()}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", {{"kind", "Internal"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation, bifurcation analysis and critical-transition detection "
                 "for nonlinear networks"};
    app.require_subcommand(1);

    std::string scenario_path;
    netcsd::RunOptions options;
    std::string out_dir;
    std::uint64_t seed = 0;
    double dt = 0.0;

    for (const char* name : {"simulate", "analyze", "detect", "sweep"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
        sub->add_option("--out", out_dir, "Override the scenario's output directory");
        sub->add_option("--seed", seed, "Override the noise seed");
        sub->add_option("--dt", dt, "Override the integrator step");
    }

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--out")) options.out = out_dir;
    if (sub->count("--seed")) options.seed = seed;
    if (sub->count("--dt")) options.dt = dt;

    return dispatch(sub->get_name(), scenario_path, options);
}
