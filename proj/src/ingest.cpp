#include "pcpd/ingest.hpp"

#include "pcpd/errors.hpp"
#include "pcpd/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace pcpd {

namespace {

struct Cursor {
    std::string_view s;
    std::size_t pos = 0;

    bool done() const { return pos >= s.size(); }
    bool eat(char c) {
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    // Reads between min_digits and max_digits decimal digits.
    std::optional<int> number(std::size_t min_digits, std::size_t max_digits) {
        int v = 0;
        std::size_t k = 0;
        while (pos < s.size() && k < max_digits && s[pos] >= '0' && s[pos] <= '9') {
            v = v * 10 + (s[pos] - '0');
            ++pos;
            ++k;
        }
        if (k < min_digits) {
            return std::nullopt;
        }
        return v;
    }
};

std::optional<std::int64_t> civil_seconds(int y, int mo, int d, int h, int mi, int sec) {
    using namespace std::chrono;
    if (mo < 1 || mo > 12 || d < 1 || d > 31) {
        return std::nullopt;
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0 || sec > 59) {
        return std::nullopt;
    }
    const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
    return days * 86400 + h * 3600 + mi * 60 + sec;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

// Optional "[ T]HH:MM[:SS[.fff]]" tail.
bool clock_tail(Cursor& c, int& h, int& mi, int& sec) {
    h = mi = sec = 0;
    if (c.done()) {
        return true;
    }
    if (!c.eat(' ') && !c.eat('T')) {
        return false;
    }
    const auto hh = c.number(1, 2);
    if (!hh || !c.eat(':')) {
        return false;
    }
    const auto mm = c.number(2, 2);
    if (!mm) {
        return false;
    }
    h = *hh;
    mi = *mm;
    if (c.eat(':')) {
        const auto ss = c.number(2, 2);
        if (!ss) {
            return false;
        }
        sec = *ss;
        if (c.eat('.') && !c.number(1, 9)) {
            return false;
        }
    }
    return c.done();
}

} // namespace

std::optional<std::int64_t> parse_civil_time(std::string_view text) {
    text = trim(text);
    Cursor c{text};
    int y = 0;
    int mo = 0;
    int d = 0;
    if (text.size() >= 5 && text[4] == '-') {
        const auto yy = c.number(4, 4);
        if (!yy || !c.eat('-')) {
            return std::nullopt;
        }
        const auto mm = c.number(2, 2);
        if (!mm || !c.eat('-')) {
            return std::nullopt;
        }
        const auto dd = c.number(2, 2);
        if (!dd) {
            return std::nullopt;
        }
        y = *yy;
        mo = *mm;
        d = *dd;
    } else {
        const auto mm = c.number(1, 2);
        if (!mm || !c.eat('/')) {
            return std::nullopt;
        }
        const auto dd = c.number(1, 2);
        if (!dd || !c.eat('/')) {
            return std::nullopt;
        }
        const auto yy = c.number(4, 4);
        if (!yy) {
            return std::nullopt;
        }
        y = *yy;
        mo = *mm;
        d = *dd;
    }
    int h = 0;
    int mi = 0;
    int sec = 0;
    if (!clock_tail(c, h, mi, sec)) {
        return std::nullopt;
    }
    return civil_seconds(y, mo, d, h, mi, sec);
}

std::string format_civil_time(std::int64_t seconds) {
    using namespace std::chrono;
    std::int64_t days = seconds / 86400;
    std::int64_t rem = seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                  static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
    return buf;
}

void IngestConfig::validate() const {
    if (top_n_stations < 2) {
        throw ConfigError("ingest: top_n_stations must be at least 2");
    }
    if (bucket_seconds < 1) {
        throw ConfigError("ingest: bucket must be at least one second");
    }
    if (self_loops) {
        throw ConfigError("ingest: self_loops=true is not supported (Laplacian input must be hollow)");
    }
    if (!(max_bad_fraction >= 0.0 && max_bad_fraction <= 1.0)) {
        throw ConfigError("ingest: max_bad_fraction must lie in [0, 1]");
    }
    if (window_start_seconds() >= window_end_seconds()) {
        throw ConfigError("ingest: window is empty");
    }
}

std::int64_t IngestConfig::window_start_seconds() const {
    const auto t = parse_civil_time(window_start);
    if (!t) {
        throw ConfigError("ingest: cannot parse window_start '" + window_start + "'");
    }
    return *t;
}

std::int64_t IngestConfig::window_end_seconds() const {
    const auto t = parse_civil_time(window_end);
    if (!t) {
        throw ConfigError("ingest: cannot parse window_end '" + window_end + "'");
    }
    return *t;
}

std::size_t IngestConfig::bucket_count() const {
    const std::int64_t span = window_end_seconds() - window_start_seconds();
    return static_cast<std::size_t>((span + bucket_seconds - 1) / bucket_seconds);
}

TripTable read_trips_csv(std::istream& in, const IngestConfig& cfg) {
    std::vector<std::string> fields;
    if (!read_csv_record(in, fields)) {
        throw InputError("trip csv: missing header");
    }
    auto column = [&](const std::string& name) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (trim(fields[i]) == name) {
                return i;
            }
        }
        throw InputError("trip csv: no column named '" + name + "'");
    };
    const std::size_t tc = column(cfg.time_column);
    const std::size_t oc = column(cfg.start_station_column);
    const std::size_t dc = column(cfg.end_station_column);
    const std::size_t need = std::max({tc, oc, dc}) + 1;

    TripTable table;
    while (read_csv_record(in, fields)) {
        if (fields.size() == 1 && trim(fields[0]).empty()) {
            continue;
        }
        ++table.rows;
        if (fields.size() < need) {
            ++table.bad_rows;
            continue;
        }
        const auto t = parse_civil_time(fields[tc]);
        const auto o = trim(fields[oc]);
        const auto d = trim(fields[dc]);
        if (!t || o.empty() || d.empty() || o == "NULL" || d == "NULL") {
            ++table.bad_rows;
            continue;
        }
        table.trips.push_back({*t, std::string(o), std::string(d)});
    }
    return table;
}

TripTable read_trips_csv(const std::filesystem::path& path, const IngestConfig& cfg) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    return read_trips_csv(in, cfg);
}

bool station_id_less(const std::string& a, const std::string& b) {
    const auto x = parse_integer(a);
    const auto y = parse_integer(b);
    if (x && y) {
        if (*x != *y) {
            return *x < *y;
        }
        return a < b;
    }
    if (x.has_value() != y.has_value()) {
        return x.has_value(); // numeric ids before text ids
    }
    return a < b;
}

std::vector<std::string> select_top_stations(const std::vector<TripRecord>& trips, const IngestConfig& cfg) {
    const std::int64_t lo = cfg.window_start_seconds();
    const std::int64_t hi = cfg.window_end_seconds();
    std::unordered_map<std::string, std::size_t> involvement;
    std::size_t in_window = 0;
    for (const auto& t : trips) {
        if (t.start < lo || t.start >= hi) {
            continue;
        }
        ++in_window;
        ++involvement[t.origin];
        ++involvement[t.destination];
    }
    if (in_window == 0) {
        throw InputError("select_top_stations: no trips inside the window");
    }
    if (involvement.size() < cfg.top_n_stations) {
        throw InputError("select_top_stations: only " + std::to_string(involvement.size()) +
                         " distinct stations in the window, " + std::to_string(cfg.top_n_stations) +
                         " requested (short by " + std::to_string(cfg.top_n_stations - involvement.size()) + ")");
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(involvement.begin(), involvement.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return station_id_less(a.first, b.first);
    });
    std::vector<std::string> out;
    out.reserve(cfg.top_n_stations);
    for (std::size_t i = 0; i < cfg.top_n_stations; ++i) {
        out.push_back(ranked[i].first);
    }
    return out;
}

IngestResult ingest_trips(const TripTable& table, const IngestConfig& cfg) {
    cfg.validate();
    if (table.rows > 0 &&
        static_cast<double>(table.bad_rows) > cfg.max_bad_fraction * static_cast<double>(table.rows)) {
        throw InputError("ingest: " + std::to_string(table.bad_rows) + " of " + std::to_string(table.rows) +
                         " rows unparseable, above max_bad_fraction");
    }
    IngestResult res;
    res.rows = table.rows;
    res.bad_rows = table.bad_rows;
    res.stations = select_top_stations(table.trips, cfg);
    std::unordered_map<std::string, Eigen::Index> node;
    for (std::size_t i = 0; i < res.stations.size(); ++i) {
        node.emplace(res.stations[i], static_cast<Eigen::Index>(i));
    }
    const std::int64_t lo = cfg.window_start_seconds();
    const std::int64_t hi = cfg.window_end_seconds();
    const std::size_t buckets = cfg.bucket_count();
    const auto p = static_cast<Eigen::Index>(res.stations.size());

    // Sparse counts first; dense matrices only when building Laplacians.
    std::vector<std::map<std::pair<Eigen::Index, Eigen::Index>, double>> counts(buckets);
    for (const auto& t : table.trips) {
        if (t.start < lo || t.start >= hi) {
            continue;
        }
        const auto a = node.find(t.origin);
        const auto b = node.find(t.destination);
        if (a == node.end() || b == node.end() || a->second == b->second) {
            continue;
        }
        const auto bucket = static_cast<std::size_t>((t.start - lo) / cfg.bucket_seconds);
        const auto u = std::min(a->second, b->second);
        const auto v = std::max(a->second, b->second);
        counts[bucket][{u, v}] += 1.0;
        ++res.retained_trips;
    }
    std::vector<GraphLaplacian> laplacians;
    laplacians.reserve(buckets);
    for (std::size_t k = 0; k < buckets; ++k) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
        for (const auto& [uv, w] : counts[k]) {
            a(uv.first, uv.second) = w;
            a(uv.second, uv.first) = w;
        }
        auto l = build_laplacian(a);
        l.node_labels = res.stations;
        laplacians.push_back(std::move(l));
        res.bucket_starts.push_back(lo + static_cast<std::int64_t>(k) * cfg.bucket_seconds);
    }
    res.series = ObjectSeries::from_laplacians(laplacians);
    return res;
}

std::string_view to_string(ExportFormat f) {
    return f == ExportFormat::adjacency_csv ? "adjacency_csv" : "edge_jsonl";
}

ExportFormat parse_export_format(std::string_view name) {
    if (name == "adjacency_csv" || name == "csv") {
        return ExportFormat::adjacency_csv;
    }
    if (name == "edge_jsonl" || name == "jsonl") {
        return ExportFormat::edge_jsonl;
    }
    throw ConfigError("unknown export format '" + std::string(name) + "' (expected adjacency_csv or edge_jsonl)");
}

namespace {

std::string bucket_file_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "bucket_%06zu.csv", i);
    return buf;
}

bool all_laplacians(const ObjectSeries& s) {
    return std::all_of(s.matrices().begin(), s.matrices().end(),
                       [](const Eigen::MatrixXd& m) { return is_graph_laplacian(m); });
}

} // namespace

void export_dataset(const ObjectSeries& series, const std::filesystem::path& dir, ExportFormat format,
                    std::size_t period_hint) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw InputError("cannot create " + dir.string() + ": " + ec.message());
    }
    nlohmann::ordered_json manifest;
    manifest["n"] = series.size();
    manifest["period_hint"] = period_hint;
    manifest["p"] = series.dimension();
    manifest["metric_id"] = std::string(to_string(series.metric()));
    std::string kind;
    std::vector<std::string> files;

    if (series.metric() == MetricId::frobenius) {
        const bool laplacian = all_laplacians(series);
        kind = laplacian ? "laplacian" : "matrix";
        auto stored = [&](std::size_t i) {
            return laplacian ? adjacency_from_laplacian(series.matrices()[i]) : series.matrices()[i];
        };
        if (format == ExportFormat::adjacency_csv) {
            for (std::size_t i = 0; i < series.size(); ++i) {
                files.push_back(bucket_file_name(i));
                write_matrix_csv(dir / files.back(), stored(i));
            }
        } else {
            std::ostringstream out;
            for (std::size_t i = 0; i < series.size(); ++i) {
                const auto a = stored(i);
                nlohmann::json edges = nlohmann::json::array();
                for (Eigen::Index u = 0; u < a.rows(); ++u) {
                    for (Eigen::Index v = laplacian ? u + 1 : 0; v < a.cols(); ++v) {
                        if (a(u, v) != 0.0) {
                            edges.push_back({u, v, a(u, v)});
                        }
                    }
                }
                out << nlohmann::json{{"index", i}, {"edges", edges}}.dump() << '\n';
            }
            files.push_back("edges.jsonl");
            write_text_file(dir / files.back(), out.str());
        }
    } else if (series.metric() == MetricId::euclidean) {
        kind = "vectors";
        Eigen::MatrixXd m(static_cast<Eigen::Index>(series.size()), static_cast<Eigen::Index>(series.dimension()));
        for (std::size_t i = 0; i < series.size(); ++i) {
            m.row(static_cast<Eigen::Index>(i)) = series.vectors()[i].transpose();
        }
        files.push_back("vectors.csv");
        write_matrix_csv(dir / files.back(), m);
    } else {
        kind = "distances";
        files.push_back("distances.csv");
        write_matrix_csv(dir / files.back(), series.distance_matrix());
    }
    manifest["object_kind"] = kind;
    manifest["format"] = std::string(to_string(format));
    manifest["labels"] = series.node_labels();
    manifest["files"] = files;
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

LoadedDataset load_dataset(const std::filesystem::path& manifest_path) {
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(read_text_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(manifest_path.string() + ": " + e.what());
    }
    const auto base = manifest_path.parent_path();
    auto require = [&](const char* key) -> const nlohmann::json& {
        if (!m.contains(key)) {
            throw InputError(manifest_path.string() + ": manifest lacks '" + key + "'");
        }
        return m.at(key);
    };
    LoadedDataset out;
    try {
        const auto n = require("n").get<std::size_t>();
        const auto p = require("p").get<std::size_t>();
        out.period_hint = m.value("period_hint", std::size_t{0});
        const auto metric = parse_metric(require("metric_id").get<std::string>());
        const auto files = require("files").get<std::vector<std::string>>();
        const auto labels = m.value("labels", std::vector<std::string>{});
        const auto kind = m.value("object_kind", std::string(metric == MetricId::euclidean     ? "vectors"
                                                             : metric == MetricId::precomputed ? "distances"
                                                                                               : "laplacian"));
        if (files.empty()) {
            throw InputError(manifest_path.string() + ": manifest lists no files");
        }
        const auto check_shape = [&](const Eigen::MatrixXd& a, std::size_t rows, std::size_t cols,
                                     const std::string& what) {
            if (static_cast<std::size_t>(a.rows()) != rows || static_cast<std::size_t>(a.cols()) != cols) {
                throw InputError(what + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                                 std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
            }
        };
        if (kind == "laplacian" || kind == "matrix") {
            std::vector<Eigen::MatrixXd> mats;
            mats.reserve(n);
            const bool jsonl = files.size() == 1 && files.front().ends_with(".jsonl");
            if (jsonl) {
                std::istringstream in(read_text_file(base / files.front()));
                std::string line;
                while (std::getline(in, line)) {
                    if (line.empty()) {
                        continue;
                    }
                    const auto rec = nlohmann::json::parse(line);
                    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
                    for (const auto& e : rec.at("edges")) {
                        const auto u = e.at(0).get<std::size_t>();
                        const auto v = e.at(1).get<std::size_t>();
                        if (u >= p || v >= p) {
                            throw InputError(files.front() + ": node index out of range");
                        }
                        const double w = e.at(2).get<double>();
                        a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = w;
                        if (kind == "laplacian") {
                            a(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = w;
                        }
                    }
                    mats.push_back(std::move(a));
                }
            } else {
                for (const auto& f : files) {
                    auto a = read_matrix_csv(base / f);
                    check_shape(a, p, p, f);
                    mats.push_back(std::move(a));
                }
            }
            if (mats.size() != n) {
                throw InputError(manifest_path.string() + ": manifest says n=" + std::to_string(n) + " but files hold " +
                                 std::to_string(mats.size()) + " objects");
            }
            if (kind == "laplacian") {
                std::vector<GraphLaplacian> ls;
                ls.reserve(n);
                for (auto& a : mats) {
                    auto l = build_laplacian(a);
                    l.node_labels = labels;
                    ls.push_back(std::move(l));
                }
                out.series = ObjectSeries::from_laplacians(ls);
            } else {
                out.series = ObjectSeries::from_matrices(std::move(mats), labels);
            }
        } else if (kind == "vectors") {
            const auto a = read_matrix_csv(base / files.front());
            check_shape(a, n, p, files.front());
            std::vector<Eigen::VectorXd> v;
            v.reserve(n);
            for (Eigen::Index i = 0; i < a.rows(); ++i) {
                v.push_back(a.row(i).transpose());
            }
            out.series = ObjectSeries::from_vectors(std::move(v));
        } else if (kind == "distances") {
            auto a = read_matrix_csv(base / files.front());
            check_shape(a, n, n, files.front());
            out.series = ObjectSeries::from_distance_matrix(std::move(a));
        } else {
            throw InputError(manifest_path.string() + ": unknown object_kind '" + kind + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(manifest_path.string() + ": " + e.what());
    }
    return out;
}

} // namespace pcpd
