// bvlab: bias/variance sweeps from the command line.
//
//   bvlab theory     --config sweep.cfg --out theory.csv
//   bvlab simulate   --set d=64 --set n=6400 --set p=32,64 --set lambda0=1
//   bvlab mlp-sweep  --config mlp.cfg --format json --threads 4
//   bvlab decompose  --set input=dump.json
//
// Settings come from the flat key-value config file, then `--set key=value`
// overrides, then the dedicated flags; later sources win.

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "bvlab/config.hpp"
#include "bvlab/parallel.hpp"
#include "bvlab/records.hpp"
#include "bvlab/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Random-design bias/variance laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_path, format;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    int threads = 0;
    bool timing = false;

    const std::pair<const char*, const char*> modes[] = {
        {"theory", "Closed-form limits over a lambda0 x gamma grid"},
        {"simulate", "Monte Carlo of the two-layer linear model"},
        {"mlp-sweep", "Width sweep of split-trained MLP ensembles"},
        {"decompose", "Decompose a JSON dump of ensemble predictions"},
    };
    for (const auto& [name, about] : modes) {
        auto* sub = app.add_subcommand(name, about);
        sub->add_option("--config", config_path, "Flat key = value config file")->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "Output path (stdout when omitted)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", seed, "Master seed");
        sub->add_option("--threads", threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
        sub->add_option("--set", overrides, "Override a config key: key=value");
        sub->add_flag("--timing", timing, "Fill the wall_time_s column");
    }
    CLI11_PARSE(app, argc, argv);

    try {
        const auto* sub = app.get_subcommands().front();
        bvlab::KeyValues values;
        if (!config_path.empty()) values = bvlab::load_key_values(config_path);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw bvlab::ConfigError("--set expects key=value, got '" + kv + "'");
            values[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
        values["mode"] = sub->get_name();
        if (sub->count("--out")) values["out"] = out_path;
        if (sub->count("--format")) values["format"] = format;
        if (sub->count("--seed")) values["seed"] = std::to_string(seed);
        if (sub->count("--threads")) values["threads"] = std::to_string(threads);
        if (timing) values["timing"] = "true";

        const bvlab::SweepConfig config = bvlab::config_from_key_values(values);
        bvlab::set_thread_count(config.threads);
        const auto records = bvlab::run_config(config);
        if (config.out.empty()) {
            std::cout << bvlab::render(records, config.format);
        } else {
            bvlab::emit(records, config.out, config.format);
        }
    } catch (const std::exception& e) {
        std::cerr << "bvlab: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
