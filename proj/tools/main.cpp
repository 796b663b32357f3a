// fvep: fractional visco-elasto-plastic experiments.
//
//   fvep relax       step-strain relaxation against closed-form moduli
//   fvep monotone    ramp loading, self-refined or analytic reference
//   fvep cyclic      cyclic visco-elasto-plastic convergence
//   fvep convergence SB device under cubic loading, per-beta error table
//   fvep bench       CPU time of the new and legacy return maps

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "fvep/commands.hpp"
#include "fvep/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Fractional visco-elasto-plastic experiments"};
    app.require_subcommand(1);

    fvep::CommandOptions opts;
    std::string config, out = ".", model, algorithm;
    std::vector<double> dt;

    const std::map<std::string, std::string> about = {
        {"relax", "step-strain relaxation against closed-form moduli"},
        {"monotone", "ramp loading, self-refined or analytic reference"},
        {"cyclic", "cyclic visco-elasto-plastic convergence"},
        {"convergence", "SB device under cubic loading, per-beta error table"},
        {"bench", "CPU time of the new and legacy return maps"},
    };
    for (const auto& name : fvep::command_names()) {
        auto* sub = app.add_subcommand(name, about.at(name));
        sub->add_option("--config", config, "JSON config file");
        sub->add_option("--out", out, "output directory")->capture_default_str();
        sub->add_option("--model", model, "model tag override (SB, FKV, FM, FKZ, FPT, FQLV)");
        sub->add_option("--dt", dt, "time steps, comma separated")->delimiter(',');
        sub->add_option("--algorithm", algorithm, "return map")
            ->check(CLI::IsMember({"new", "legacy", "both"}));
    }

    CLI11_PARSE(app, argc, argv);

    opts.command = app.get_subcommands().front()->get_name();
    if (!config.empty()) opts.config = config;
    opts.out = out;
    if (!model.empty()) opts.model = model;
    opts.dt = dt;
    if (!algorithm.empty()) opts.algorithm = fvep::parse_algorithm(algorithm);

    return fvep::run_command(opts, std::cout, std::cerr).exit_code;
}
