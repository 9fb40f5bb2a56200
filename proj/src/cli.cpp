#include "pcpd/cli.hpp"

#include "pcpd/errors.hpp"
#include "pcpd/io.hpp"
#include "pcpd/localizer.hpp"
#include "pcpd/mdf.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <ostream>
#include <set>
#include <sstream>

namespace pcpd {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string_view to_string(Command c) {
    switch (c) {
    case Command::detect:
        return "detect";
    case Command::localize:
        return "localize";
    case Command::segment:
        return "segment";
    case Command::simulate:
        return "simulate";
    case Command::ingest:
        return "ingest";
    case Command::scan_curve:
        return "scan-curve";
    }
    return "detect";
}

Command parse_command(std::string_view name) {
    for (const auto c : {Command::detect, Command::localize, Command::segment, Command::simulate, Command::ingest,
                         Command::scan_curve}) {
        if (name == to_string(c)) {
            return c;
        }
    }
    throw ConfigError("command: unknown command '" + std::string(name) +
                      "' (expected detect, localize, segment, simulate, ingest or scan-curve)");
}

std::string_view to_string(ReportFormat f) {
    return f == ReportFormat::json ? "json" : "csv";
}

ReportFormat parse_report_format(std::string_view name) {
    if (name == "json") {
        return ReportFormat::json;
    }
    if (name == "csv") {
        return ReportFormat::csv;
    }
    throw ConfigError("format: expected json or csv, got '" + std::string(name) + "'");
}

ReportFormat RunConfig::resolved_format() const {
    if (format) {
        return *format;
    }
    return command == Command::scan_curve ? ReportFormat::csv : ReportFormat::json;
}

namespace {

// Reads one JSON object section, remembering which keys were consumed.
class Section {
public:
    Section(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
        if (!obj_.is_object()) {
            throw ConfigError(prefix_.empty() ? "config: top level must be a JSON object"
                                              : prefix_ + ": must be a JSON object");
        }
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    std::string name(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

    void read(const std::string& key, std::string& dst) {
        if (const auto* v = find(key)) {
            if (!v->is_string()) {
                throw ConfigError(name(key) + ": expected a string");
            }
            dst = v->get<std::string>();
        }
    }
    void read(const std::string& key, double& dst) {
        if (const auto* v = find(key)) {
            if (!v->is_number()) {
                throw ConfigError(name(key) + ": expected a number");
            }
            dst = v->get<double>();
        }
    }
    void read(const std::string& key, bool& dst) {
        if (const auto* v = find(key)) {
            if (!v->is_boolean()) {
                throw ConfigError(name(key) + ": expected true or false");
            }
            dst = v->get<bool>();
        }
    }
    void read(const std::string& key, std::size_t& dst) {
        if (const auto* v = find(key)) {
            dst = count(key, *v);
        }
    }
    void read(const std::string& key, std::int64_t& dst) {
        if (const auto* v = find(key)) {
            if (!v->is_number_integer()) {
                throw ConfigError(name(key) + ": expected an integer");
            }
            dst = v->get<std::int64_t>();
        }
    }
    void read(const std::string& key, std::optional<std::size_t>& dst) {
        if (const auto* v = find(key)) {
            if (v->is_null()) {
                dst.reset();
            } else {
                dst = count(key, *v);
            }
        }
    }
    void read(const std::string& key, std::optional<double>& dst) {
        if (const auto* v = find(key)) {
            if (v->is_null()) {
                dst.reset();
            } else if (v->is_number()) {
                dst = v->get<double>();
            } else {
                throw ConfigError(name(key) + ": expected a number or null");
            }
        }
    }
    void read(const std::string& key, std::vector<double>& dst) {
        if (const auto* v = find(key)) {
            if (v->is_number()) {
                dst = {v->get<double>()};
                return;
            }
            if (!v->is_array()) {
                throw ConfigError(name(key) + ": expected a number or an array of numbers");
            }
            dst.clear();
            for (const auto& e : *v) {
                if (!e.is_number()) {
                    throw ConfigError(name(key) + ": expected an array of numbers");
                }
                dst.push_back(e.get<double>());
            }
        }
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (!seen_.contains(key)) {
                throw ConfigError("unknown config key '" + name(key) + "'");
            }
        }
    }

private:
    std::uint64_t count(const std::string& key, const json& v) const {
        if (!v.is_number_unsigned()) {
            throw ConfigError(name(key) + ": expected a nonnegative integer");
        }
        return v.get<std::uint64_t>();
    }

    const json& obj_;
    std::string prefix_;
    std::set<std::string> seen_;
};

void check(bool ok, const std::string& message) {
    if (!ok) {
        throw ConfigError(message);
    }
}

void validate_run_config(const RunConfig& c) {
    const auto& d = c.detector;
    check(d.b > 0.0 && d.b < 0.5, "b: must lie in (0, 1/2)");
    check(d.alpha > 0.0 && d.alpha < 1.0, "alpha: must lie in (0, 1)");
    check(d.max_perms >= 1, "max_perms: must be at least 1");
    check(!d.e_nn || *d.e_nn >= 1, "enn: must be at least 1");
    const auto& s = c.segmentation;
    check(s.decay >= 0.5 && s.decay < 1.0, "segment.decay: must lie in [0.5, 1)");
    check(!s.min_interval_len || *s.min_interval_len >= 4, "segment.min_interval_len: must be at least 4");
    check(!s.min_gap || *s.min_gap >= 1, "segment.min_gap: must be at least 1");
    check(!s.alpha_seg || (*s.alpha_seg > 0.0 && *s.alpha_seg < 1.0), "segment.alpha_seg: must lie in (0, 1)");
    check(!s.max_perms || *s.max_perms >= 1, "segment.max_perms: must be at least 1");
    check(c.sim.runs >= 1, "simulate.runs: must be at least 1");
    for (const double e : c.etas) {
        check(e >= 0.0, "simulate.etas: signal strengths must be nonnegative");
    }
    try {
        c.sim.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("simulate: ") + e.what());
    }
    if (c.command == Command::ingest) {
        c.ingest.validate();
    }
    if (!c.metric.empty()) {
        parse_metric(c.metric);
    }
}

RunConfig parse_unvalidated(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    if (root.is_null()) {
        root = json::object();
    }
    RunConfig c;
    Section top(root, "");
    std::string text;
    if (const auto* v = top.find("command")) {
        if (!v->is_string()) {
            throw ConfigError("command: expected a string");
        }
        c.command = parse_command(v->get<std::string>());
    }
    top.read("data", c.data);
    top.read("metric", c.metric);
    if (const auto* v = top.find("period")) {
        if (!v->is_number_unsigned() || v->get<std::uint64_t>() < 1) {
            throw ConfigError("period: must be an integer >= 1");
        }
        c.period = v->get<std::size_t>();
    }
    text.clear();
    top.read("remainder", text);
    if (!text.empty()) {
        c.remainder = parse_remainder_policy(text);
    }
    if (const auto* v = top.find("seed")) {
        if (!v->is_number_unsigned()) {
            throw ConfigError("seed: expected a nonnegative integer");
        }
        c.seed = v->get<std::uint64_t>();
    }
    top.read("b", c.detector.b);
    top.read("alpha", c.detector.alpha);
    top.read("max_perms", c.detector.max_perms);
    top.read("early_stop", c.detector.early_stop);
    top.read("enn", c.detector.e_nn);
    top.read("threads", c.detector.threads);
    top.read("bonferroni", c.detector.bonferroni);
    top.read("out", c.out);
    text.clear();
    top.read("format", text);
    if (!text.empty()) {
        c.format = parse_report_format(text);
    }
    if (const auto* v = top.find("segment")) {
        Section s(*v, "segment");
        s.read("decay", c.segmentation.decay);
        s.read("min_interval_len", c.segmentation.min_interval_len);
        s.read("min_gap", c.segmentation.min_gap);
        s.read("alpha_seg", c.segmentation.alpha_seg);
        s.read("max_perms", c.segmentation.max_perms);
        s.read("localize", c.segmentation.localize);
        s.finish();
    }
    if (const auto* v = top.find("simulate")) {
        Section s(*v, "simulate");
        s.read("nodes", c.sim.nodes);
        s.read("period", c.sim.period);
        s.read("blocks", c.sim.blocks);
        s.read("tau", c.sim.tau);
        s.read("nu_star", c.sim.nu_star);
        s.read("etas", c.etas);
        s.read("runs", c.sim.runs);
        s.read("size_schedule", c.sim.size_schedule);
        s.read("weight_low", c.sim.weight_low);
        s.read("weight_high", c.sim.weight_high);
        s.read("day_factor", c.sim.day_factor);
        text.clear();
        s.read("layout", text);
        if (!text.empty()) {
            c.sim.layout = parse_network_layout(text);
        }
        s.finish();
    }
    if (const auto* v = top.find("ingest")) {
        Section s(*v, "ingest");
        s.read("time_column", c.ingest.time_column);
        s.read("start_station_column", c.ingest.start_station_column);
        s.read("end_station_column", c.ingest.end_station_column);
        s.read("window_start", c.ingest.window_start);
        s.read("window_end", c.ingest.window_end);
        s.read("top_n_stations", c.ingest.top_n_stations);
        s.read("bucket_seconds", c.ingest.bucket_seconds);
        s.read("timezone", c.ingest.timezone);
        s.read("self_loops", c.ingest.self_loops);
        s.read("max_bad_fraction", c.ingest.max_bad_fraction);
        text.clear();
        s.read("export_format", text);
        if (!text.empty()) {
            c.export_format = parse_export_format(text);
        }
        s.finish();
    }
    top.finish();
    return c;
}

} // namespace

RunConfig parse_run_config(std::string_view json_text) {
    RunConfig c = parse_unvalidated(json_text);
    validate_run_config(c);
    return c;
}

RunConfig load_config(const std::optional<std::filesystem::path>& file, const FlagOverrides& flags) {
    std::optional<std::filesystem::path> path = file;
    if (!path) {
        if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') {
            path = env;
        }
    }
    RunConfig c = path ? parse_unvalidated(read_text_file(*path)) : RunConfig{};
    if (path) {
        c.config_path = path->string();
    }
    if (flags.command) {
        c.command = parse_command(*flags.command);
    }
    if (flags.data) {
        c.data = *flags.data;
    }
    if (flags.period) {
        check(*flags.period >= 1, "period: must be an integer >= 1");
        c.period = *flags.period;
    }
    if (flags.alpha) {
        c.detector.alpha = *flags.alpha;
    }
    if (flags.b) {
        c.detector.b = *flags.b;
    }
    if (flags.max_perms) {
        c.detector.max_perms = *flags.max_perms;
    }
    if (flags.no_early_stop) {
        c.detector.early_stop = false;
    }
    if (flags.enn) {
        c.detector.e_nn = *flags.enn;
    }
    if (flags.seed) {
        c.seed = *flags.seed;
    }
    if (flags.metric) {
        c.metric = *flags.metric;
    }
    if (flags.out) {
        c.out = *flags.out;
    }
    if (flags.format) {
        c.format = parse_report_format(*flags.format);
    }
    if (flags.threads) {
        c.detector.threads = *flags.threads;
    }
    validate_run_config(c);
    return c;
}

namespace {

ojson config_json(const RunConfig& c) {
    ojson j;
    j["command"] = std::string(to_string(c.command));
    j["data"] = c.data;
    j["metric"] = c.metric;
    j["period"] = c.period;
    j["remainder"] = std::string(to_string(c.remainder));
    j["seed"] = c.seed;
    j["b"] = c.detector.b;
    j["alpha"] = c.detector.alpha;
    j["max_perms"] = c.detector.max_perms;
    j["early_stop"] = c.detector.early_stop;
    j["enn"] = c.detector.e_nn ? ojson(*c.detector.e_nn) : ojson(nullptr);
    j["bonferroni"] = c.detector.bonferroni;
    j["format"] = std::string(to_string(c.resolved_format()));
    if (c.command == Command::segment) {
        const auto& s = c.segmentation;
        ojson seg;
        seg["decay"] = s.decay;
        seg["min_interval_len"] = s.min_interval_len ? ojson(*s.min_interval_len) : ojson(nullptr);
        seg["min_gap"] = s.min_gap ? ojson(*s.min_gap) : ojson(nullptr);
        seg["alpha_seg"] = s.alpha_seg ? ojson(*s.alpha_seg) : ojson(nullptr);
        seg["max_perms"] = s.max_perms ? ojson(*s.max_perms) : ojson(nullptr);
        seg["localize"] = s.localize;
        j["segment"] = seg;
    }
    if (c.command == Command::simulate) {
        ojson sim;
        sim["nodes"] = c.sim.nodes;
        sim["period"] = c.sim.period;
        sim["blocks"] = c.sim.blocks;
        sim["tau"] = c.sim.tau;
        sim["nu_star"] = c.sim.nu_star;
        sim["etas"] = c.etas;
        sim["runs"] = c.sim.runs;
        sim["size_schedule"] = c.sim.size_schedule;
        sim["weight_low"] = c.sim.weight_low;
        sim["weight_high"] = c.sim.weight_high;
        sim["layout"] = std::string(to_string(c.sim.layout));
        sim["day_factor"] = c.sim.day_factor;
        j["simulate"] = sim;
    }
    if (c.command == Command::ingest) {
        const auto& g = c.ingest;
        ojson ing;
        ing["time_column"] = g.time_column;
        ing["start_station_column"] = g.start_station_column;
        ing["end_station_column"] = g.end_station_column;
        ing["window_start"] = g.window_start;
        ing["window_end"] = g.window_end;
        ing["top_n_stations"] = g.top_n_stations;
        ing["bucket_seconds"] = g.bucket_seconds;
        ing["timezone"] = g.timezone;
        ing["self_loops"] = g.self_loops;
        ing["max_bad_fraction"] = g.max_bad_fraction;
        ing["export_format"] = std::string(to_string(c.export_format));
        j["ingest"] = ing;
    }
    return j;
}

ojson curve_json(std::span<const ScanPoint> curve) {
    ojson a = ojson::array();
    for (const auto& p : curve) {
        a.push_back(ojson{{"t", p.t}, {"u", p.u}, {"B_hat", p.value}});
    }
    return a;
}

void put_detection(ojson& j, const DetectionOutcome& o) {
    j["B_hat"] = o.B_hat;
    j["t_hat"] = o.t_hat;
    j["tau_b_hat"] = o.tau_b_hat;
    j["p_value"] = o.p_value;
    j["stopped_at"] = o.stopped_at;
    j["decision"] = std::string(to_string(o.decision));
    j["blocks"] = o.blocks;
}

ojson localization_json(const LocalizationResult& l) {
    ojson j;
    j["V_n"] = l.marginal.V_n;
    ojson per_m = ojson::array();
    for (const auto& t : l.marginal.per_m) {
        per_m.push_back(ojson{{"m", t.m},
                              {"S_hat", t.statistic},
                              {"p_value", t.p_value},
                              {"stopped_at", t.stopped_at},
                              {"rejected", t.rejected}});
    }
    j["per_m"] = per_m;
    ojson cls = ojson::array();
    for (const auto& c : l.classifications) {
        cls.push_back(ojson{{"m", c.m}, {"label", c.label}, {"c1", c.c1}, {"c2", c.c2}});
    }
    j["classifications"] = cls;
    j["nu_hat"] = l.nu_hat;
    j["l_F_hat"] = l.location.l_F_hat;
    j["tau_F_hat"] = l.location.tau_F_hat;
    j["e_nn"] = l.e_nn;
    return j;
}

std::string csv_line(std::initializer_list<std::string> cells) {
    std::string s;
    bool first = true;
    for (const auto& c : cells) {
        if (!first) {
            s += ',';
        }
        s += c;
        first = false;
    }
    s += '\n';
    return s;
}

std::string num(double x) {
    return format_double(x);
}

std::string num(std::size_t x) {
    return std::to_string(x);
}

std::size_t resolve_period(const RunConfig& c, std::size_t hint) {
    const std::size_t m = c.period != 0 ? c.period : hint;
    if (m == 0) {
        throw ConfigError("period: required (pass --period or use a manifest with period_hint)");
    }
    return m;
}

std::string finish_json(const RunConfig& c, ojson body) {
    ojson j;
    j["command"] = std::string(to_string(c.command));
    j["seed"] = c.seed;
    for (auto& [k, v] : body.items()) {
        j[k] = v;
    }
    j["config_echo"] = config_json(c);
    return j.dump(2) + "\n";
}

} // namespace

std::string config_echo(const RunConfig& cfg) {
    return config_json(cfg).dump(2) + "\n";
}

ObjectSeries load_series(const RunConfig& cfg, std::size_t* period_hint) {
    if (cfg.data.empty()) {
        throw InputError("data: no dataset given");
    }
    const std::filesystem::path path(cfg.data);
    if (!std::filesystem::exists(path)) {
        throw InputError("data: no such file " + cfg.data);
    }
    ObjectSeries series;
    std::size_t hint = 0;
    if (path.extension() == ".json") {
        auto loaded = load_dataset(path);
        series = std::move(loaded.series);
        hint = loaded.period_hint;
        if (!cfg.metric.empty() && parse_metric(cfg.metric) != series.metric()) {
            throw ConfigError("metric: '" + cfg.metric + "' does not match the dataset metric '" +
                              std::string(to_string(series.metric())) + "'");
        }
    } else {
        const MetricId metric = cfg.metric.empty() ? MetricId::euclidean : parse_metric(cfg.metric);
        auto m = read_matrix_csv(path);
        if (metric == MetricId::precomputed) {
            series = ObjectSeries::from_distance_matrix(std::move(m));
        } else if (metric == MetricId::euclidean) {
            std::vector<Eigen::VectorXd> v;
            v.reserve(static_cast<std::size_t>(m.rows()));
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                v.push_back(m.row(i).transpose());
            }
            series = ObjectSeries::from_vectors(std::move(v));
        } else {
            throw ConfigError("metric: frobenius input needs a dataset manifest (.json)");
        }
    }
    if (period_hint != nullptr) {
        *period_hint = hint;
    }
    return series;
}

std::string run_command(const RunConfig& cfg) {
    DetectorConfig det = cfg.detector;
    det.master_seed = cfg.seed;
    const bool csv = cfg.resolved_format() == ReportFormat::csv;

    if (cfg.command == Command::simulate) {
        SimConfig sim = cfg.sim;
        sim.seed = cfg.seed;
        std::string text = csv ? csv_line({"eta", "power", "mad"}) : std::string();
        ojson rows = ojson::array();
        for (const double eta : cfg.etas) {
            sim.eta = eta;
            const auto s = run_monte_carlo(sim, det);
            if (csv) {
                text += csv_line({num(eta), num(s.power), num(s.mad)});
                continue;
            }
            ojson r;
            r["eta"] = eta;
            r["runs"] = s.runs;
            r["rejections"] = s.rejections;
            r["power"] = s.power;
            r["mad"] = s.mad;
            r["nu_histogram"] = s.nu_histogram;
            r["nu_histogram_at_truth"] = s.nu_histogram_at_truth;
            r["case_histogram"] = ojson{{"I", s.cases[0]}, {"II", s.cases[1]}, {"III", s.cases[2]}};
            rows.push_back(r);
        }
        if (csv) {
            return text;
        }
        ojson body;
        body["true_tau"] = sim.true_tau();
        body["change_index"] = sim.change_index();
        body["results"] = rows;
        return finish_json(cfg, body);
    }

    if (cfg.command == Command::ingest) {
        if (cfg.data.empty()) {
            throw InputError("data: no trip file given");
        }
        if (cfg.out.empty()) {
            throw ConfigError("out: ingest needs an output directory");
        }
        const auto table = read_trips_csv(std::filesystem::path(cfg.data), cfg.ingest);
        const auto res = ingest_trips(table, cfg.ingest);
        const std::size_t per_day = 86400 % cfg.ingest.bucket_seconds == 0
                                        ? static_cast<std::size_t>(86400 / cfg.ingest.bucket_seconds)
                                        : 0;
        export_dataset(res.series, cfg.out, cfg.export_format, per_day);
        ojson body;
        body["n"] = res.series.size();
        body["p"] = res.stations.size();
        body["period_hint"] = per_day;
        body["stations"] = res.stations;
        body["rows"] = res.rows;
        body["bad_rows"] = res.bad_rows;
        body["retained_trips"] = res.retained_trips;
        body["first_bucket"] = res.bucket_starts.empty() ? "" : format_civil_time(res.bucket_starts.front());
        body["last_bucket"] = res.bucket_starts.empty() ? "" : format_civil_time(res.bucket_starts.back());
        body["manifest"] = (std::filesystem::path(cfg.out) / "manifest.json").string();
        return finish_json(cfg, body);
    }

    std::size_t hint = 0;
    const auto series = load_series(cfg, &hint);
    const std::size_t period = resolve_period(cfg, hint);
    const auto blocks = blockify(series, period, cfg.remainder);

    if (cfg.command == Command::scan_curve) {
        const auto tensor = DeltaTensor::build_joint(blocks, det.threads);
        const auto curve = scan_statistic_curve(tensor, WeightSpec::unit(), det.b);
        if (csv) {
            std::ostringstream out;
            write_scan_curve_csv(out, curve);
            return out.str();
        }
        ojson body;
        body["blocks"] = blocks.blocks();
        body["period"] = period;
        body["scan_curve"] = curve_json(curve);
        return finish_json(cfg, body);
    }

    if (cfg.command == Command::segment) {
        const auto res = segment_multiple(blocks, det, cfg.segmentation);
        if (csv) {
            std::string text = csv_line({"t_hat", "l_F_hat", "tau_F_hat", "p_value", "lo", "hi"});
            for (const auto& cp : res.change_points) {
                text += csv_line({num(cp.t_hat), num(cp.l_F_hat), num(cp.tau_F_hat), num(cp.p_value),
                                  num(cp.interval.lo), num(cp.interval.hi)});
            }
            return text;
        }
        ojson cps = ojson::array();
        for (const auto& cp : res.change_points) {
            ojson j;
            j["t_hat"] = cp.t_hat;
            j["l_F_hat"] = cp.l_F_hat;
            j["tau_F_hat"] = cp.tau_F_hat;
            j["p_value"] = cp.p_value;
            j["interval"] = {cp.interval.lo, cp.interval.hi};
            j["nu_hat"] = cp.localization ? cp.localization->nu_hat : period + 1;
            cps.push_back(j);
        }
        const auto& p = res.params;
        ojson params;
        params["decay"] = p.decay;
        params["min_interval_len"] = p.min_interval_len;
        params["min_gap"] = p.min_gap;
        params["alpha_seg"] = p.alpha_seg;
        params["max_perms"] = p.max_perms;
        params["intervals"] = p.intervals;
        ojson body;
        body["blocks"] = blocks.blocks();
        body["period"] = period;
        body["change_points"] = cps;
        body["params"] = params;
        return finish_json(cfg, body);
    }

    const auto outcome = detect_single(blocks, det);
    if (cfg.command == Command::detect) {
        if (csv) {
            return csv_line({"B_hat", "t_hat", "tau_b_hat", "p_value", "stopped_at", "decision"}) +
                   csv_line({num(outcome.B_hat), num(outcome.t_hat), num(outcome.tau_b_hat), num(outcome.p_value),
                             num(outcome.stopped_at), std::string(to_string(outcome.decision))});
        }
        ojson body;
        put_detection(body, outcome);
        body["period"] = period;
        body["scan_curve"] = curve_json(outcome.scan_curve);
        return finish_json(cfg, body);
    }

    // localize
    LocalizationResult loc;
    if (outcome.t_hat + 2 <= blocks.blocks()) {
        loc = localize(blocks, outcome.t_hat, det);
    } else {
        loc.nu_hat = period + 1;
        loc.location = final_location(outcome.t_hat, loc.nu_hat, period, series.size());
    }
    if (csv) {
        return csv_line({"B_hat", "t_hat", "tau_b_hat", "p_value", "stopped_at", "decision", "nu_hat", "l_F_hat",
                         "tau_F_hat"}) +
               csv_line({num(outcome.B_hat), num(outcome.t_hat), num(outcome.tau_b_hat), num(outcome.p_value),
                         num(outcome.stopped_at), std::string(to_string(outcome.decision)), num(loc.nu_hat),
                         num(loc.location.l_F_hat), num(loc.location.tau_F_hat)});
    }
    ojson body;
    put_detection(body, outcome);
    body["period"] = period;
    body["scan_curve"] = curve_json(outcome.scan_curve);
    const ojson loc_json = localization_json(loc);
    for (const auto& [k, v] : loc_json.items()) {
        body[k] = v;
    }
    return finish_json(cfg, body);
}

int run_pipeline(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const auto text = run_command(cfg);
        if (!cfg.out.empty() && cfg.command != Command::ingest) {
            write_text_file(cfg.out, text);
        } else {
            out << text;
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace pcpd
