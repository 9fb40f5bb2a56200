#include "catch_amalgamated.hpp"

#include "pcpd/blocking.hpp"
#include "pcpd/cli.hpp"
#include "pcpd/delta_tensor.hpp"
#include "pcpd/errors.hpp"
#include "pcpd/io.hpp"
#include "pcpd/mdf.hpp"

#include <json.hpp>

#include <filesystem>
#include <sstream>

using namespace pcpd;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = PCPD_DATA_DIR;

RunConfig toy_config(Command command) {
    RunConfig cfg = parse_run_config("{}");
    cfg.command = command;
    cfg.data = (kData / "toy_detect" / "manifest.json").string();
    cfg.seed = 1;
    return cfg;
}

fs::path write_config(const std::string& name, const std::string& text) {
    const auto path = fs::temp_directory_path() / ("pcpd_cli_" + name + ".json");
    write_text_file(path, text);
    return path;
}

} // namespace

TEST_CASE("empty config gives the defaults", "[cli]") {
    const auto cfg = parse_run_config("{}");
    CHECK(cfg.detector.b == 0.1);
    CHECK(cfg.detector.alpha == 0.05);
    CHECK(cfg.detector.max_perms == 500);
    CHECK(cfg.detector.early_stop);
    CHECK(cfg.command == Command::detect);
    CHECK(cfg.resolved_format() == ReportFormat::json);
}

TEST_CASE("flags override the file", "[cli]") {
    const auto path = write_config("prec", R"({"alpha": 0.05, "b": 0.2, "seed": 9})");
    FlagOverrides flags;
    flags.alpha = 0.01;
    const auto cfg = load_config(path, flags);
    CHECK(cfg.detector.alpha == 0.01);
    CHECK(cfg.detector.b == 0.2);
    CHECK(cfg.seed == 9);

    // A bad file value is fine when a flag replaces it.
    const auto bad = write_config("badalpha", R"({"alpha": 1.5})");
    CHECK(load_config(bad, flags).detector.alpha == 0.01);
}

TEST_CASE("invalid configs name the key", "[cli]") {
    const auto message = [](const std::string& text) {
        try {
            (void)parse_run_config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message(R"({"alpha": 1.5})").find("alpha") != std::string::npos);
    CHECK(message(R"({"alhpa": 0.1})").find("alhpa") != std::string::npos);
    CHECK(message(R"({"segment": {"decay": 0.2}})").find("decay") != std::string::npos);
    CHECK(message(R"({"simulate": {"bogus": 1}})").find("simulate.bogus") != std::string::npos);
    CHECK(message(R"({"command": "explode"})").find("explode") != std::string::npos);
    CHECK(message(R"({"max_perms": -3})").find("max_perms") != std::string::npos);
    CHECK(message("{not json").find("no error") == std::string::npos);
}

TEST_CASE("detect on the toy fixture", "[cli]") {
    const auto text = run_command(toy_config(Command::detect));
    const auto r = json::parse(text);
    CHECK(r["decision"] == "reject");
    CHECK(r["t_hat"] == 20);
    CHECK(r["blocks"] == 40);
    CHECK(r["period"] == 4);
    CHECK(r["config_echo"]["alpha"] == 0.05);
    // Same config, same bytes.
    CHECK(run_command(toy_config(Command::detect)) == text);
}

TEST_CASE("localize on the toy fixture", "[cli]") {
    const auto r = json::parse(run_command(toy_config(Command::localize)));
    CHECK(r["t_hat"] == 20);
    CHECK(r["nu_hat"] == 1);
    CHECK(r["l_F_hat"] == 81);
    CHECK(r["tau_F_hat"] == 81.0 / 160.0);
}

TEST_CASE("scan-curve CSV matches the in-process curve", "[cli]") {
    const auto cfg = toy_config(Command::scan_curve);
    CHECK(cfg.resolved_format() == ReportFormat::csv);
    const auto csv = run_command(cfg);
    const auto blocks = blockify(load_series(cfg), 4);
    const auto curve = scan_statistic_curve(DeltaTensor::build_joint(blocks), WeightSpec{}, 0.1);
    std::ostringstream want;
    write_scan_curve_csv(want, curve);
    CHECK(csv == want.str());
    CHECK(csv.rfind("t,u,B_hat\n", 0) == 0);
}

TEST_CASE("segment on the null fixture", "[cli]") {
    auto cfg = toy_config(Command::segment);
    cfg.data = (kData / "null_segment" / "manifest.json").string();
    const auto r = json::parse(run_command(cfg));
    CHECK(r["change_points"].is_array());
    CHECK(r["change_points"].empty());
}

TEST_CASE("pipeline exit codes", "[cli]") {
    std::ostringstream out;
    std::ostringstream err;
    auto cfg = toy_config(Command::detect);
    cfg.data = (kData / "missing.json").string();
    CHECK(run_pipeline(cfg, out, err) == 3);
    CHECK(err.str().find("missing.json") != std::string::npos);

    cfg = toy_config(Command::detect);
    cfg.period = 200;
    err.str("");
    CHECK(run_pipeline(cfg, out, err) != 0);

    cfg = toy_config(Command::detect);
    out.str("");
    CHECK(run_pipeline(cfg, out, err) == 0);
    CHECK(json::parse(out.str())["decision"] == "reject");
}

TEST_CASE("vector csv input", "[cli]") {
    auto cfg = toy_config(Command::detect);
    cfg.data = (kData / "toy_detect" / "vectors.csv").string();
    CHECK(cfg.period == 0);
    CHECK_THROWS_AS(run_command(cfg), ConfigError);
    cfg.period = 4;
    CHECK(json::parse(run_command(cfg))["t_hat"] == 20);
}

TEST_CASE("simulate report", "[cli]") {
    auto cfg = parse_run_config(R"({"command": "simulate", "seed": 3, "max_perms": 50,
        "simulate": {"runs": 2, "blocks": 12, "nodes": 6, "etas": [0.0, 1.0]}})");
    const auto r = json::parse(run_command(cfg));
    REQUIRE(r["results"].size() == 2);
    CHECK(r["results"][1]["runs"] == 2);
    CHECK(r["results"][0]["nu_histogram"].size() == 14);
    cfg.format = ReportFormat::csv;
    const auto csv = run_command(cfg);
    CHECK(csv.rfind("eta,power,mad\n", 0) == 0);
}

TEST_CASE("ingest command writes a loadable dataset", "[cli]") {
    const auto out = fs::temp_directory_path() / "pcpd_cli_ingest";
    fs::remove_all(out);
    auto cfg = parse_run_config(R"({"command": "ingest",
        "ingest": {"window_start": "2019-10-01", "window_end": "2019-10-04", "top_n_stations": 5}})");
    cfg.data = (kData / "trips_sample.csv").string();
    cfg.out = out.string();
    const auto r = json::parse(run_command(cfg));
    CHECK(r["n"] == 72);
    const auto loaded = load_dataset(out / "manifest.json");
    CHECK(loaded.series.size() == 72);
    CHECK(loaded.period_hint == 24);
}
