#include "cosparse/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "cosparse/dataio.hpp"
#include "cosparse/errors.hpp"
#include "cosparse/linalg.hpp"

namespace cosparse {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Distinct streams for measurement matrices and synthetic signals.
constexpr std::uint64_t kPhiDomain = 0x7068692D73656564ULL;
constexpr std::uint64_t kSynthDomain = 0x73796E74682D7367ULL;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::size_t parse_count(const std::string& s, const std::string& what) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("invalid " + what + ": '" + s + "'");
    return v;
}

double parse_real(const std::string& s, const std::string& what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError("invalid " + what + ": '" + s + "'");
    return v;
}

}  // namespace

const char* to_string(Algorithm a) noexcept {
    switch (a) {
        case Algorithm::gap: return "gap";
        case Algorithm::sgap: return "sgap";
        case Algorithm::ommp: return "ommp";
        case Algorithm::sommp: return "sommp";
    }
    return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
    for (auto a : {Algorithm::gap, Algorithm::sgap, Algorithm::ommp, Algorithm::sommp})
        if (name == to_string(a)) return a;
    throw ConfigError("unknown algorithm '" + name + "' (expected gap, sgap, ommp or sommp)");
}

bool is_single_channel(Algorithm a) noexcept { return a == Algorithm::gap || a == Algorithm::ommp; }

InputSource parse_input(const std::string& text) {
    const std::string prefix = "synth:";
    if (text.rfind(prefix, 0) != 0) {
        if (text.empty()) throw ConfigError("empty input path");
        return std::filesystem::path(text);
    }
    const auto parts = split(text.substr(prefix.size()), ',');
    if (parts.size() != 4)
        throw ConfigError("synthetic input must be synth:<N>,<segments>,<channels>,<cosupport>");
    SyntheticSource s;
    s.n_signal = parse_count(parts[0], "synthetic N");
    s.segments = parse_count(parts[1], "synthetic segment count");
    s.channels = parse_count(parts[2], "synthetic channel count");
    s.cosupport = parse_count(parts[3], "synthetic co-support size");
    return s;
}

void ExperimentSpec::validate() const {
    if (cr_grid.empty()) throw ConfigError("empty compression-ratio grid");
    for (double cr : cr_grid)
        if (!(cr > 0.0 && cr <= 1.0)) throw ConfigError("compression ratio " + format_double(cr) + " is outside (0, 1]");
    if (t < 1) throw ConfigError("t must be >= 1");
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (atoms_per_iter < 1) throw ConfigError("atoms-per-iter must be >= 1");
    if (!(residual_tol > 0.0)) throw ConfigError("residual tolerance must be positive");
    if (!is_supported_wavelet_order(wavelet_order))
        throw ConfigError("unsupported wavelet order " + std::to_string(wavelet_order) + " (supported: 2, 4, 6)");
    if (const auto* path = std::get_if<std::filesystem::path>(&input)) {
        if (!std::filesystem::exists(*path)) throw ConfigError("input file does not exist: " + path->string());
    } else {
        const auto& s = std::get<SyntheticSource>(input);
        if (s.n_signal < 3 || s.channels < 1 || s.segments < 1)
            throw ConfigError("synthetic input needs N >= 3, segments >= 1 and channels >= 1");
        if (s.cosupport > s.n_signal - 2) throw ConfigError("synthetic co-support must be <= N - 2");
    }
}

std::vector<Segment> load_segments(const ExperimentSpec& spec) {
    std::vector<Segment> segments;
    if (const auto* path = std::get_if<std::filesystem::path>(&spec.input)) {
        segments = segment(load_csv(*path), spec.segment_seconds);
    } else {
        const auto& s = std::get<SyntheticSource>(spec.input);
        for (std::size_t i = 0; i < s.segments; ++i) {
            const std::uint64_t seed = splitmix64(splitmix64(spec.seed ^ kSynthDomain) + i);
            auto sample = synth_cosparse(s.n_signal, s.cosupport, s.channels, true, seed);
            sample.segment.subject_id = "synth";
            sample.segment.window_index = i;
            segments.push_back(std::move(sample.segment));
        }
    }
    if (spec.max_segments && segments.size() > spec.max_segments) segments.resize(spec.max_segments);
    return segments;
}

std::uint64_t measurement_seed(std::uint64_t run_seed, std::size_t n, std::optional<std::size_t> segment) {
    std::uint64_t s = splitmix64(splitmix64(run_seed ^ kPhiDomain) ^ n);
    if (segment) s = splitmix64(s + 1 + *segment);
    return s;
}

RunOutcome run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    return run_experiment(spec, load_segments(spec));
}

RunOutcome run_experiment(const ExperimentSpec& spec, const std::vector<Segment>& segments) {
    spec.validate();
    struct Operators {
        MeasurementMatrix phi;
        DenseMatrix sensing_dict;  // phi * psi, pursuits only
    };
    std::map<std::pair<std::size_t, std::size_t>, Operators> shared_ops;  // (N, n)
    std::map<std::size_t, AnalysisOperator> omegas;
    std::map<std::size_t, SynthesisDictionary> dictionaries;
    const bool synthesis = spec.algorithm == Algorithm::ommp || spec.algorithm == Algorithm::sommp;

    GapConfig gap_cfg;
    gap_cfg.t = spec.t;
    gap_cfg.lambda = spec.lambda;
    gap_cfg.aggregation = spec.aggregation;
    PursuitConfig pursuit_cfg;
    pursuit_cfg.atoms_per_iter = spec.atoms_per_iter;
    pursuit_cfg.residual_tol = spec.residual_tol;

    auto build_ops = [&](std::size_t n_signal, std::size_t n, std::optional<std::size_t> seg) {
        const auto seed = measurement_seed(spec.seed, n, seg);
        Operators ops{n == n_signal ? orthogonal_measurement(n_signal, seed)
                                    : make_measurement(spec.ensemble, n, n_signal, seed),
                      {}};
        if (synthesis) ops.sensing_dict = linalg::matmul(ops.phi.matrix, dictionaries.at(n_signal).matrix);
        return ops;
    };

    RunOutcome out;
    for (std::size_t si = 0; si < segments.size(); ++si) {
        const Segment& seg = segments[si];
        const std::string id = seg.subject_id + "/" + std::to_string(seg.window_index);
        std::vector<RunRecord> local;
        try {
            const std::size_t n_signal = seg.n_signal();
            if (!omegas.contains(n_signal)) omegas.emplace(n_signal, second_order_diff(n_signal));
            if (synthesis && !dictionaries.contains(n_signal)) {
                const int levels = spec.wavelet_levels.value_or(default_wavelet_levels(n_signal));
                dictionaries.emplace(n_signal, daubechies_dictionary(n_signal, spec.wavelet_order, levels));
            }
            const AnalysisOperator& omega = omegas.at(n_signal);

            for (double cr : spec.cr_grid) {
                const std::size_t n = measurements_for_ratio(cr, n_signal);
                Operators own;
                const Operators* ops = nullptr;
                if (spec.per_segment_phi) {
                    own = build_ops(n_signal, n, si);
                    ops = &own;
                } else {
                    const auto key = std::make_pair(n_signal, n);
                    if (!shared_ops.contains(key)) shared_ops.emplace(key, build_ops(n_signal, n, std::nullopt));
                    ops = &shared_ops.at(key);
                }
                const DenseMatrix y = linalg::matmul(ops->phi.matrix, seg.data);

                auto record = [&](std::size_t channel, const DenseMatrix& estimate_col,
                                  const ReconstructionResult& res) {
                    double value = prd(seg.data.col(channel), estimate_col);
                    if (spec.percent_prd) value *= 100.0;
                    local.push_back({id, channel, cr, spec.algorithm, value, res.iterations, res.solve_count,
                                     res.wall_time});
                };
                auto run_one = [&](const DenseMatrix& y_part) {
                    switch (spec.algorithm) {
                        case Algorithm::gap: return gap(y_part, ops->phi, omega, gap_cfg);
                        case Algorithm::sgap: return sgap(y_part, ops->phi, omega, gap_cfg);
                        case Algorithm::ommp:
                            return ommp(y_part, ops->sensing_dict, dictionaries.at(n_signal), pursuit_cfg);
                        case Algorithm::sommp:
                            return sommp(y_part, ops->sensing_dict, dictionaries.at(n_signal), pursuit_cfg);
                    }
                    throw ConfigError("unknown algorithm");
                };

                if (is_single_channel(spec.algorithm)) {
                    for (std::size_t c = 0; c < seg.channels(); ++c) {
                        const auto res = run_one(y.col(c));
                        record(c, res.estimate, res);
                    }
                } else {
                    const auto res = run_one(y);
                    for (std::size_t c = 0; c < seg.channels(); ++c) record(c, res.estimate.col(c), res);
                }
            }
        } catch (const std::exception& e) {
            out.failures.push_back("segment " + id + ": " + e.what());
            continue;
        }
        std::stable_sort(local.begin(), local.end(), [](const RunRecord& a, const RunRecord& b) {
            return std::tie(a.channel, a.cr) < std::tie(b.channel, b.cr);
        });
        out.records.insert(out.records.end(), local.begin(), local.end());
    }
    return out;
}

std::vector<GroupKey> parse_group_keys(const std::string& text) {
    std::vector<GroupKey> keys;
    for (const auto& raw : split(text, ',')) {
        if (raw == "cr") keys.push_back(GroupKey::cr);
        else if (raw == "algorithm") keys.push_back(GroupKey::algorithm);
        else if (raw == "channel") keys.push_back(GroupKey::channel);
        else throw ConfigError("unknown group key '" + raw + "' (expected cr, algorithm or channel)");
    }
    if (keys.empty()) throw ConfigError("no group keys given");
    return keys;
}

const char* to_string(Metric m) noexcept {
    switch (m) {
        case Metric::prd: return "prd";
        case Metric::iterations: return "iterations";
        case Metric::solve_count: return "solve_count";
        case Metric::wall_time: return "wall_time";
        case Metric::segment_wall_time: return "segment_wall_time";
        case Metric::segment_solve_count: return "segment_solve_count";
    }
    return "unknown";
}

Metric parse_metric(const std::string& name) {
    for (auto m : {Metric::prd, Metric::iterations, Metric::solve_count, Metric::wall_time,
                   Metric::segment_wall_time, Metric::segment_solve_count})
        if (name == to_string(m)) return m;
    throw ConfigError("unknown metric '" + name + "'");
}

namespace {

// Sort key part: numeric for cr/channel, textual for algorithm.
using KeyPart = std::pair<double, std::string>;

std::vector<KeyPart> group_key(const RunRecord& r, const std::vector<GroupKey>& keys) {
    std::vector<KeyPart> out;
    for (auto k : keys) {
        switch (k) {
            case GroupKey::cr: out.emplace_back(r.cr, "cr=" + format_double(r.cr)); break;
            case GroupKey::algorithm: out.emplace_back(0.0, std::string("algorithm=") + to_string(r.algorithm)); break;
            case GroupKey::channel:
                out.emplace_back(static_cast<double>(r.channel), "channel=" + std::to_string(r.channel));
                break;
        }
    }
    return out;
}

std::string group_label(const std::vector<KeyPart>& key) {
    std::string s;
    for (const auto& part : key) {
        if (!s.empty()) s += ';';
        s += part.second;
    }
    return s;
}

}  // namespace

std::vector<GroupSummary> summarize(const std::vector<RunRecord>& records,
                                    const std::vector<GroupKey>& group_by, Metric metric) {
    if (records.empty()) throw MetricError("summarize needs at least one record");
    const bool per_segment = metric == Metric::segment_wall_time || metric == Metric::segment_solve_count;
    const bool channel_grouped = std::find(group_by.begin(), group_by.end(), GroupKey::channel) != group_by.end();
    if (per_segment && channel_grouped)
        throw ConfigError(std::string(to_string(metric)) + " totals over channels and cannot be grouped by channel");

    std::map<std::vector<KeyPart>, std::vector<double>> groups;
    if (!per_segment) {
        for (const auto& r : records) {
            double v = 0.0;
            switch (metric) {
                case Metric::prd: v = r.prd; break;
                case Metric::iterations: v = static_cast<double>(r.iterations); break;
                case Metric::solve_count: v = static_cast<double>(r.solve_count); break;
                default: v = r.wall_time; break;
            }
            groups[group_key(r, group_by)].push_back(v);
        }
    } else {
        // (segment, cr, algorithm) -> total work
        std::map<std::tuple<std::string, double, Algorithm>, std::pair<double, const RunRecord*>> totals;
        for (const auto& r : records) {
            const double v = metric == Metric::segment_wall_time ? r.wall_time : static_cast<double>(r.solve_count);
            auto [it, fresh] = totals.try_emplace(std::make_tuple(r.segment, r.cr, r.algorithm), v, &r);
            if (!fresh && is_single_channel(r.algorithm)) it->second.first += v;
        }
        for (const auto& [key, entry] : totals) groups[group_key(*entry.second, group_by)].push_back(entry.first);
    }

    std::vector<GroupSummary> out;
    for (const auto& [key, values] : groups) {
        if (values.empty()) continue;
        out.push_back({group_label(key), boxplot_stats(values)});
    }
    return out;
}

OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw ConfigError("unknown output format '" + name + "' (expected csv or json)");
}

std::string format_records(const std::vector<RunRecord>& records, OutputFormat format) {
    if (format == OutputFormat::json) {
        nlohmann::ordered_json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["records"] = nlohmann::ordered_json::array();
        for (const auto& r : records) {
            doc["records"].push_back({{"segment", r.segment},
                                      {"channel", r.channel},
                                      {"cr", r.cr},
                                      {"algorithm", to_string(r.algorithm)},
                                      {"prd", r.prd},
                                      {"iterations", r.iterations},
                                      {"solve_count", r.solve_count},
                                      {"wall_time", r.wall_time}});
        }
        return doc.dump(2) + "\n";
    }
    std::string out = std::string(kRecordsCsvHeader) + "\n";
    for (const auto& r : records) {
        out += r.segment + ',' + std::to_string(r.channel) + ',' + format_double(r.cr) + ',' + to_string(r.algorithm) +
               ',' + format_double(r.prd) + ',' + std::to_string(r.iterations) + ',' +
               std::to_string(r.solve_count) + ',' + format_double(r.wall_time) + '\n';
    }
    return out;
}

std::string format_summaries(const std::vector<GroupSummary>& summaries, Metric metric, OutputFormat format) {
    if (format == OutputFormat::json) {
        nlohmann::ordered_json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["metric"] = to_string(metric);
        doc["groups"] = nlohmann::ordered_json::array();
        for (const auto& g : summaries) {
            doc["groups"].push_back({{"group", g.group},
                                     {"low", g.stats.low},
                                     {"p25", g.stats.p25},
                                     {"median", g.stats.median},
                                     {"p75", g.stats.p75},
                                     {"high", g.stats.high},
                                     {"w", g.stats.w},
                                     {"count", g.stats.count},
                                     {"outliers", g.stats.outliers}});
        }
        return doc.dump(2) + "\n";
    }
    std::string out = std::string(kSummaryCsvHeader) + "\n";
    for (const auto& g : summaries) {
        const auto& s = g.stats;
        out += g.group + ',' + format_double(s.low) + ',' + format_double(s.p25) + ',' + format_double(s.median) +
               ',' + format_double(s.p75) + ',' + format_double(s.high) + ',' + std::to_string(s.outliers.size()) +
               '\n';
    }
    return out;
}

std::vector<RunRecord> parse_records(const std::string& text, OutputFormat format) {
    std::vector<RunRecord> out;
    if (format == OutputFormat::json) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
            if (doc.at("schema_version").get<int>() != kSchemaVersion)
                throw ParseError("unsupported schema_version", 0);
            for (const auto& j : doc.at("records")) {
                RunRecord r;
                r.segment = j.at("segment").get<std::string>();
                r.channel = j.at("channel").get<std::size_t>();
                r.cr = j.at("cr").get<double>();
                r.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
                r.prd = j.at("prd").get<double>();
                r.iterations = j.at("iterations").get<std::size_t>();
                r.solve_count = j.at("solve_count").get<std::size_t>();
                r.wall_time = j.at("wall_time").get<double>();
                out.push_back(std::move(r));
            }
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid records JSON: ") + e.what(), 0);
        }
        return out;
    }

    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kRecordsCsvHeader)
        throw ParseError(std::string("expected header '") + kRecordsCsvHeader + "'", 1);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 8) throw ParseError("expected 8 fields, found " + std::to_string(f.size()), lineno);
        try {
            out.push_back({f[0], parse_count(f[1], "channel"), parse_real(f[2], "cr"), parse_algorithm(f[3]),
                           parse_real(f[4], "prd"), parse_count(f[5], "iterations"),
                           parse_count(f[6], "solve_count"), parse_real(f[7], "wall_time")});
        } catch (const ConfigError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
    if (!f) throw Error("write failed: " + path.string());
}

std::vector<RunRecord> read_records(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    const auto format = path.extension() == ".json" ? OutputFormat::json : OutputFormat::csv;
    try {
        return parse_records(ss.str(), format);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line());
    }
}

std::pair<std::filesystem::path, std::filesystem::path> emit(const std::vector<RunRecord>& records,
                                                             const std::vector<GroupSummary>& summaries,
                                                             Metric metric, const std::filesystem::path& dir,
                                                             OutputFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
    const std::string ext = format == OutputFormat::json ? ".json" : ".csv";
    const auto records_path = dir / ("records" + ext);
    const auto summary_path = dir / ("summary" + ext);
    write_text(records_path, format_records(records, format));
    write_text(summary_path, format_summaries(summaries, metric, format));
    return {records_path, summary_path};
}

}  // namespace cosparse
