#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cosparse/dataio.hpp"
#include "cosparse/metrics.hpp"
#include "cosparse/operators.hpp"
#include "cosparse/reconstruction.hpp"

namespace cosparse {

enum class Algorithm { gap, sgap, ommp, sommp };

const char* to_string(Algorithm a) noexcept;
Algorithm parse_algorithm(const std::string& name);
/// gap and ommp reconstruct one channel per call.
bool is_single_channel(Algorithm a) noexcept;

/// `synth:<N>,<segments>,<channels>,<cosupport>`
struct SyntheticSource {
    std::size_t n_signal = 240;
    std::size_t segments = 50;
    std::size_t channels = 2;
    std::size_t cosupport = 230;
    bool operator==(const SyntheticSource&) const = default;
};

using InputSource = std::variant<std::filesystem::path, SyntheticSource>;

/// Parses either a CSV path or a `synth:` descriptor.
InputSource parse_input(const std::string& text);

struct ExperimentSpec {
    Algorithm algorithm = Algorithm::sgap;
    std::vector<double> cr_grid{0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2};
    InputSource input = SyntheticSource{};
    std::uint64_t seed = 0;
    std::size_t t = 10;
    double lambda = 0.05;
    std::size_t atoms_per_iter = 4;
    double residual_tol = 1e-4;
    int wavelet_order = 4;
    std::optional<int> wavelet_levels;  // default_wavelet_levels(N) when unset
    double segment_seconds = 2.0;
    std::size_t max_segments = 0;       // 0 keeps every segment
    Ensemble ensemble = Ensemble::gaussian;
    bool per_segment_phi = false;
    RowAggregation aggregation = RowAggregation::signed_sum;
    bool percent_prd = false;
    std::filesystem::path output_path;

    /// Throws ConfigError on out-of-range values or missing input files.
    void validate() const;
};

/// One reconstructed channel of one segment at one compression ratio.
struct RunRecord {
    std::string segment;       // "<subject>/<window>"; no commas
    std::size_t channel = 0;
    double cr = 0.0;
    Algorithm algorithm = Algorithm::sgap;
    double prd = 0.0;
    std::size_t iterations = 0;
    std::size_t solve_count = 0;  // of the call that produced this channel
    double wall_time = 0.0;       // seconds, of the call that produced this channel

    bool operator==(const RunRecord&) const = default;
};

struct RunOutcome {
    std::vector<RunRecord> records;  // sorted by segment, channel, cr
    std::vector<std::string> failures;
};

/// Loads or generates the segments an experiment runs over.
std::vector<Segment> load_segments(const ExperimentSpec& spec);

/// Seed of the measurement matrix for a (run seed, measurement count, segment) triple.
std::uint64_t measurement_seed(std::uint64_t run_seed, std::size_t n, std::optional<std::size_t> segment);

RunOutcome run_experiment(const ExperimentSpec& spec);
RunOutcome run_experiment(const ExperimentSpec& spec, const std::vector<Segment>& segments);

enum class GroupKey { cr, algorithm, channel };
std::vector<GroupKey> parse_group_keys(const std::string& text);

// prd, iterations, solve_count and wall_time are per record. segment_wall_time
// and segment_solve_count total the work spent on all channels of a segment:
// summed for single-channel algorithms, taken once for joint ones.
enum class Metric { prd, iterations, solve_count, wall_time, segment_wall_time, segment_solve_count };
Metric parse_metric(const std::string& name);
const char* to_string(Metric m) noexcept;

struct GroupSummary {
    std::string group;  // "cr=0.5;algorithm=sgap"
    BoxplotSummary stats;
};

std::vector<GroupSummary> summarize(const std::vector<RunRecord>& records,
                                    const std::vector<GroupKey>& group_by, Metric metric = Metric::prd);

enum class OutputFormat { csv, json };
OutputFormat parse_format(const std::string& name);

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kRecordsCsvHeader =
    "segment,channel,cr,algorithm,prd,iterations,solve_count,wall_time";
inline constexpr const char* kSummaryCsvHeader = "group,low,p25,median,p75,high,n_outliers";

std::string format_records(const std::vector<RunRecord>& records, OutputFormat format);
std::string format_summaries(const std::vector<GroupSummary>& summaries, Metric metric, OutputFormat format);
std::vector<RunRecord> parse_records(const std::string& text, OutputFormat format);

void write_text(const std::filesystem::path& path, const std::string& text);
std::vector<RunRecord> read_records(const std::filesystem::path& path);

/// Writes records.<ext> and summary.<ext> into `dir`, creating it if needed.
/// Returns the two paths.
std::pair<std::filesystem::path, std::filesystem::path> emit(const std::vector<RunRecord>& records,
                                                             const std::vector<GroupSummary>& summaries,
                                                             Metric metric, const std::filesystem::path& dir,
                                                             OutputFormat format);

}  // namespace cosparse
