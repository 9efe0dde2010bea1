#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cosparse/matrix.hpp"
#include "cosparse/operators.hpp"

namespace cosparse {

/// Multi-channel recording, one row per sample and one column per channel.
/// `samples` is the empty matrix when the recording has no rows.
struct EcgRecording {
    double sample_rate = 0.0;
    std::size_t channels = 0;
    DenseMatrix samples;
    std::string subject_id;

    std::size_t total_samples() const noexcept { return samples.rows(); }
};

/// Fixed-length window of a recording (N x c).
struct Segment {
    DenseMatrix data;
    std::string subject_id;
    std::size_t window_index = 0;

    std::size_t n_signal() const noexcept { return data.rows(); }
    std::size_t channels() const noexcept { return data.cols(); }
};

/// Reads the two-line-header CSV export:
///   # sample_rate=<float>
///   # subject=<string>
///   v,v,...      (one row per sample, one column per channel)
EcgRecording load_csv(const std::filesystem::path& path);
EcgRecording parse_csv(const std::string& text);

void save_csv(const EcgRecording& rec, const std::filesystem::path& path);
std::string format_csv(const EcgRecording& rec);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Consecutive non-overlapping windows from sample 0; the trailing partial
/// window is dropped. seconds * sample_rate must be a whole number.
std::vector<Segment> segment(const EcgRecording& rec, double seconds);

/// Stacks segments back into one recording. All segments need equal channel counts.
EcgRecording concatenate(const std::vector<Segment>& segments, double sample_rate);

struct CosparseSample {
    Segment segment;
    // Per channel: interior rows of the second-order operator on which the
    // signal's second difference is exactly zero. Sorted.
    std::vector<std::vector<std::size_t>> cosupports;
};

/// Piecewise-linear signals with (n_signal - 2 - cosupport_size) slope changes.
/// All values are dyadic rationals, so the second difference is exactly zero
/// on the returned co-support. Requires cosupport_size <= n_signal - 2.
CosparseSample synth_cosparse(std::size_t n_signal, std::size_t cosupport_size, std::size_t channels,
                              bool shared, std::uint64_t seed);

struct SparseSample {
    Segment segment;
    DenseMatrix coefficients;                     // M x c
    std::vector<std::vector<std::size_t>> supports;  // per channel, sorted
};

/// x = Psi * s with exactly `sparsity` nonzero Gaussian coefficients per channel.
SparseSample synth_sparse(const SynthesisDictionary& psi, std::size_t sparsity, std::size_t channels,
                          bool shared, std::uint64_t seed);

}  // namespace cosparse
