#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"
#include "presets.hpp"

#include "abcid/error.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::string out;
    std::string preset;
};

using abcid::cli::Config;
using abcid::cli::ConfigError;

Config resolve_config(const GlobalOptions& g, const std::string& default_preset, const Config& flag_overrides) {
    Config cfg;
    const std::string preset = g.preset.empty() ? default_preset : g.preset;
    if (!preset.empty()) {
        const auto text = abcid::cli::preset_text(preset);
        if (!text) throw ConfigError("unknown preset '" + preset + "'");
        cfg = Config::parse_text(*text, "preset " + preset);
    }
    if (!g.config_path.empty()) cfg.merge(Config::load(g.config_path));
    cfg.merge(flag_overrides);
    return cfg;
}

int run(const std::string& command, const GlobalOptions& g, const std::string& default_preset,
        const Config& overrides, const std::function<void(const abcid::cli::RunContext&)>& body) {
    const auto start = std::chrono::steady_clock::now();
    try {
        abcid::cli::RunContext ctx;
        ctx.config = resolve_config(g, default_preset, overrides);
        if (g.seed) {
            ctx.seed = *g.seed;
        } else if (ctx.config.has("seed")) {
            const auto s = ctx.config.get_int("seed");
            if (s < 0) ctx.config.fail("seed", "must be non-negative");
            ctx.seed = static_cast<std::uint64_t>(s);
        } else {
            throw ConfigError("a seed is required (--seed or 'seed = ...'); runs never default to the clock");
        }
        ctx.config.set("seed", std::to_string(ctx.seed), "resolved");
        if (g.workers) {
            ctx.workers = *g.workers;
        } else {
            const auto w = ctx.config.get_int("workers", 1);
            if (w < 1) ctx.config.fail("workers", "must be >= 1");
            ctx.workers = static_cast<unsigned>(w);
        }
        const std::string out_dir = g.out.empty() ? ctx.config.get_string("out", "abcid-out") : g.out;
        abcid::cli::OutputDirectory out(out_dir);
        ctx.out = &out;
        body(ctx);
        // Workers and output location do not affect the data, so the echo omits them.
        auto echo = ctx.config.echo();
        echo.erase("workers");
        echo.erase("out");
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.write_manifest(command, echo, seconds);
        std::cout << command << ": wrote " << out.files().size() << " files to " << out.root().string() << " in "
                  << seconds << " s\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximate Bayesian computation with identification diagnostics"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config_path, "Configuration file (key = value sections, or JSON)");
    app.add_option("--seed", g.seed, "Master seed (required here or in the config)");
    app.add_option("--workers", g.workers, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--preset", g.preset, "Built-in configuration to start from");

    std::function<int()> action;
    Config overrides;

    auto* abc = app.add_subcommand("abc", "ABC runs")->require_subcommand(1);
    auto* abc_run = abc->add_subcommand("run", "Rejection or kernel ABC, or a consistency sweep");
    std::string experiment;
    abc_run->add_option("--experiment", experiment, "ma2-figure1 | gauss-kernel");
    abc_run->callback([&] { action = [&] { return run("abc run", g, experiment, overrides, abcid::cli::cmd_abc_run); }; });

    auto* diagnose = app.add_subcommand("diagnose", "Identification diagnostics")->require_subcommand(1);
    auto* augment = diagnose->add_subcommand("augment", "Statistic-augmentation jump diagnostic");
    std::string plan;
    augment->add_option("--plan", plan, "figure2 | figure4 | figure5");
    augment->callback([&] {
        action = [&] { return run("diagnose augment", g, plan, overrides, abcid::cli::cmd_diagnose_augment); };
    });

    auto* injectivity = diagnose->add_subcommand("injectivity", "Binding-function injectivity");
    std::string model, stats_name, inj_mode;
    injectivity->add_option("--model", model, "ar1 | ma2");
    injectivity->add_option("--stats", stats_name, "Statistic set, e.g. eta1 or acov1");
    injectivity->add_option("--mode", inj_mode, "analytic | simulated");
    injectivity->callback([&] {
        if (!model.empty()) overrides.set("model.name", model);
        if (!stats_name.empty()) overrides.set("statistics.set", stats_name);
        if (!inj_mode.empty()) overrides.set("injectivity.mode", inj_mode);
        action = [&] { return run("diagnose injectivity", g, "injectivity", overrides, abcid::cli::cmd_diagnose_injectivity); };
    });

    auto* analytic = app.add_subcommand("analytic", "Closed-form Gaussian-mean example")->require_subcommand(1);
    auto* sweep = analytic->add_subcommand("sweep", "Sequential-limit sweep in both orders");
    sweep->callback([&] {
        action = [&] { return run("analytic sweep", g, "analytic-sweep", overrides, abcid::cli::cmd_analytic_sweep); };
    });

    auto* lv = app.add_subcommand("lv-study", "Lotka-Volterra deterministic vs noise-matched simulation");
    std::string lv_mode;
    lv->add_option("--mode", lv_mode, "deterministic | noise_matched");
    lv->callback([&] {
        action = [&] {
            return run("lv-study", g, lv_mode.empty() ? "noise_matched" : lv_mode, overrides, abcid::cli::cmd_lv_study);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    return action ? action() : kExitConfig;
}
