#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "axilab/commands.hpp"

using namespace axilab;

int main(int argc, char** argv) {
    CLI::App app{"axisymmetric flow regularity laboratory"};
    app.require_subcommand(1);

    std::string manifest_path, out_dir = "out", history_dir;
    std::string seed_override;
    bool rebaseline = false;

    auto add_common = [&](CLI::App* sub, bool with_history) {
        sub->add_option("--manifest", manifest_path, "run manifest (key = value)")
            ->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed_override,
                        "override the manifest seed (decimal or 0x hex)");
        if (with_history)
            sub->add_option("--history", history_dir,
                            "reuse snapshots written by 'simulate'");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run the scenario");
    add_common(sim, false);
    CLI::App* diag =
        app.add_subcommand("diagnose", "cylinder quantity sweep and h sanity");
    add_common(diag, true);
    CLI::App* decay =
        app.add_subcommand("decay-fit", "oscillation ladder and envelope fit");
    add_common(decay, true);
    CLI::App* ineq = app.add_subcommand("verify-inequalities",
                                        "randomized inequality corpora");
    add_common(ineq, false);
    ineq->add_flag("--rebaseline", rebaseline, "replace the locked baseline");

    CLI11_PARSE(app, argc, argv);

    RunManifest m;
    try {
        m = RunManifest::parse_file(manifest_path);
        if (!seed_override.empty())
            m.seed = std::stoull(seed_override, nullptr, 0);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitPrecondition;
    }

    try {
        if (sim->parsed()) return cmd_simulate(m, out_dir);
        if (diag->parsed()) return cmd_diagnose(m, out_dir, history_dir);
        if (decay->parsed()) return cmd_decay_fit(m, out_dir, history_dir);
        return cmd_verify_inequalities(m, out_dir, rebaseline);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitPrecondition;
    }
}
