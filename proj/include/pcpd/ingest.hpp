#pragma once

#include "pcpd/metric.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcpd {

// Seconds since 1970-01-01 00:00:00 on the wall clock, no zone applied.
// Accepts "YYYY-MM-DD", "YYYY-MM-DD HH:MM[:SS[.fff]]" (space or 'T'), and
// "M/D/YYYY[ H:MM[:SS]]".
std::optional<std::int64_t> parse_civil_time(std::string_view text);
std::string format_civil_time(std::int64_t seconds);

struct IngestConfig {
    std::string time_column = "starttime";
    std::string start_station_column = "start station id";
    std::string end_station_column = "end station id";
    std::string window_start; // civil time, inclusive
    std::string window_end;   // civil time, exclusive
    std::size_t top_n_stations = 90;
    std::int64_t bucket_seconds = 3600;
    // Recorded only: trip timestamps are read as local wall-clock times and
    // buckets are wall-clock hours of that zone.
    std::string timezone = "America/New_York";
    bool self_loops = false;
    double max_bad_fraction = 0.01;

    void validate() const;
    std::int64_t window_start_seconds() const;
    std::int64_t window_end_seconds() const;
    std::size_t bucket_count() const;
};

struct TripRecord {
    std::int64_t start = 0;
    std::string origin;
    std::string destination;
};

struct TripTable {
    std::vector<TripRecord> trips;
    std::size_t rows = 0;     // data rows read
    std::size_t bad_rows = 0; // unparseable time or missing station
};

TripTable read_trips_csv(std::istream& in, const IngestConfig& cfg);
TripTable read_trips_csv(const std::filesystem::path& path, const IngestConfig& cfg);

// Orders station ids numerically when both parse as integers, else as text.
bool station_id_less(const std::string& a, const std::string& b);

std::vector<std::string> select_top_stations(const std::vector<TripRecord>& trips, const IngestConfig& cfg);

struct IngestResult {
    ObjectSeries series;
    std::vector<std::string> stations;
    std::vector<std::int64_t> bucket_starts;
    std::size_t retained_trips = 0;
    std::size_t rows = 0;
    std::size_t bad_rows = 0;
};

IngestResult ingest_trips(const TripTable& table, const IngestConfig& cfg);

enum class ExportFormat { adjacency_csv, edge_jsonl };
std::string_view to_string(ExportFormat f);
ExportFormat parse_export_format(std::string_view name);

// Writes manifest.json plus data files into `dir`. Laplacian series are stored
// as adjacency matrices; vectors and precomputed distances as one CSV each.
void export_dataset(const ObjectSeries& series, const std::filesystem::path& dir, ExportFormat format,
                    std::size_t period_hint = 0);

struct LoadedDataset {
    ObjectSeries series;
    std::size_t period_hint = 0;
};

LoadedDataset load_dataset(const std::filesystem::path& manifest);

} // namespace pcpd
