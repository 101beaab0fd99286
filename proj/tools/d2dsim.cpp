// d2dsim: Monte Carlo runner for D2D underlay resource and power control.

#include "d2d/config.hpp"
#include "d2d/results.hpp"
#include "d2d/sim.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

namespace {

enum Exit { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

int run(int argc, char** argv)
{
    CLI::App app{"D2D underlay system simulator"};
    app.set_version_flag("--version", std::string(d2d::cli::kToolVersion));

    std::string config_path, preset_name, format = "both", out_dir = "results";
    std::optional<std::uint64_t> seed;
    std::optional<int> drops;
    auto* cfg_opt = app.add_option("--config", config_path, "JSON config file or run manifest")->check(CLI::ExistingFile);
    app.add_option("--preset", preset_name, "named experiment preset")->excludes(cfg_opt);
    app.add_option("--seed", seed, "base seed (drop i uses seed + i)");
    app.add_option("--drops", drops, "number of drops")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    std::vector<d2d::cli::NamedRun> runs;
    try {
        if (!preset_name.empty())
            runs = d2d::cli::preset(preset_name);
        else if (!config_path.empty())
            runs.push_back({"", d2d::cli::parse_config(config_path)});
        else
            runs.push_back({"", d2d::sim::ExperimentConfig{}});
        for (auto& r : runs) {
            if (seed)
                r.config.seed = *seed;
            if (drops)
                r.config.num_drops = *drops;
            r.config.validate();
        }
    } catch (const d2d::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    const auto fmt = d2d::cli::parse_format(format);
    const bool multi = runs.size() > 1;
    try {
        for (const auto& r : runs) {
            const std::filesystem::path dir = multi ? std::filesystem::path(out_dir) / r.label : std::filesystem::path(out_dir);
            const auto result = d2d::sim::run_experiment(r.config);
            for (const auto& p : d2d::cli::emit_results(result, fmt, dir, r.label))
                std::cout << p.string() << '\n';
            std::cerr << (r.label.empty() ? "run" : r.label) << ": mean sum rate " << result.mean_sum_rate_bps() / 1e6
                      << " Mbit/s, mean sum power " << result.mean_sum_power_w() << " W\n";
        }
    } catch (const d2d::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
