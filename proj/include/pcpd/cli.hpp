#pragma once

#include "pcpd/blocking.hpp"
#include "pcpd/detector.hpp"
#include "pcpd/ingest.hpp"
#include "pcpd/segmenter.hpp"
#include "pcpd/simgen.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcpd {

enum class Command { detect, localize, segment, simulate, ingest, scan_curve };
std::string_view to_string(Command c);
Command parse_command(std::string_view name);

enum class ReportFormat { json, csv };
std::string_view to_string(ReportFormat f);
ReportFormat parse_report_format(std::string_view name);

struct RunConfig {
    Command command = Command::detect;
    std::string data;   // manifest (.json), vector or distance CSV, or trip CSV for ingest
    std::string metric; // empty = taken from the data
    std::size_t period = 0; // 0 = manifest period_hint
    RemainderPolicy remainder = RemainderPolicy::drop;
    std::uint64_t seed = 0;
    DetectorConfig detector;
    SegmentationConfig segmentation;
    SimConfig sim;
    std::vector<double> etas{0.0, 0.1, 0.25};
    IngestConfig ingest;
    ExportFormat export_format = ExportFormat::adjacency_csv;
    std::string out; // report file; for ingest the dataset directory; empty = stdout
    std::optional<ReportFormat> format; // default json, csv for scan-curve
    std::string config_path; // echoed only

    ReportFormat resolved_format() const;
};

// Values given on the command line; each one present replaces the file value.
struct FlagOverrides {
    std::optional<std::string> command;
    std::optional<std::string> data;
    std::optional<std::size_t> period;
    std::optional<double> alpha;
    std::optional<double> b;
    std::optional<std::size_t> max_perms;
    bool no_early_stop = false;
    std::optional<std::size_t> enn;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> metric;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::size_t> threads;
};

// Name of the environment variable holding a default config file path.
inline constexpr const char* kConfigEnvVar = "PCPD_CONFIG";

// Strict JSON reader: unknown keys and out-of-range values raise ConfigError
// naming the key.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_config(const std::optional<std::filesystem::path>& file, const FlagOverrides& flags = {});
std::string config_echo(const RunConfig& cfg);

// Series and blocks described by the config's data/metric/period fields.
ObjectSeries load_series(const RunConfig& cfg, std::size_t* period_hint = nullptr);

// Runs the command and returns the report text. Throws on operational errors.
std::string run_command(const RunConfig& cfg);

// Runs the command, writes the report to cfg.out (or `out`), and maps
// errors to a nonzero status with a message on `err`.
int run_pipeline(const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace pcpd
