#include "pcpd/cli.hpp"
#include "pcpd/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Change-point detection for periodic random objects"};
    app.set_version_flag("--version", "pcpd 0.1.0");

    std::string command;
    std::string data;
    std::size_t period = 0;
    double alpha = 0.0;
    double b = 0.0;
    std::size_t max_perms = 0;
    bool no_early_stop = false;
    std::size_t enn = 0;
    std::uint64_t seed = 0;
    std::string metric;
    std::string config;
    std::string out;
    std::string format;
    std::size_t threads = 0;

    auto* o_command =
        app.add_option("command", command, "detect | localize | segment | simulate | ingest | scan-curve (or set in config)");
    auto* o_data = app.add_option("data", data, "dataset manifest (.json), vector/distance CSV, or trip CSV for ingest");
    auto* o_period = app.add_option("--period", period, "period M (observations per block)");
    auto* o_alpha = app.add_option("--alpha", alpha, "significance level");
    auto* o_b = app.add_option("--b", b, "trimming fraction of the candidate splits");
    auto* o_perms = app.add_option("--max-perms", max_perms, "maximum number of permutations");
    app.add_flag("--no-early-stop", no_early_stop, "evaluate every permutation");
    auto* o_enn = app.add_option("--enn", enn, "neighbours used by the within-block classifier");
    auto* o_seed = app.add_option("--seed", seed, "master seed");
    auto* o_metric = app.add_option("--metric", metric, "frobenius | euclidean | precomputed");
    auto* o_config = app.add_option("--config", config, "JSON config file (default: $PCPD_CONFIG)");
    auto* o_out = app.add_option("--out", out, "report path (directory for ingest)");
    auto* o_format = app.add_option("--format", format, "json | csv");
    auto* o_threads = app.add_option("--threads", threads, "worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    pcpd::FlagOverrides flags;
    if (o_command->count() > 0) {
        flags.command = command;
    }
    if (o_data->count() > 0) {
        flags.data = data;
    }
    if (o_period->count() > 0) {
        flags.period = period;
    }
    if (o_alpha->count() > 0) {
        flags.alpha = alpha;
    }
    if (o_b->count() > 0) {
        flags.b = b;
    }
    if (o_perms->count() > 0) {
        flags.max_perms = max_perms;
    }
    flags.no_early_stop = no_early_stop;
    if (o_enn->count() > 0) {
        flags.enn = enn;
    }
    if (o_seed->count() > 0) {
        flags.seed = seed;
    }
    if (o_metric->count() > 0) {
        flags.metric = metric;
    }
    if (o_out->count() > 0) {
        flags.out = out;
    }
    if (o_format->count() > 0) {
        flags.format = format;
    }
    if (o_threads->count() > 0) {
        flags.threads = threads;
    }

    pcpd::RunConfig cfg;
    try {
        std::optional<std::filesystem::path> file;
        if (o_config->count() > 0) {
            file = config;
        }
        cfg = pcpd::load_config(file, flags);
    } catch (const pcpd::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return pcpd::run_pipeline(cfg, std::cout, std::cerr);
}
