#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cosparse/matrix.hpp"
#include "cosparse/operators.hpp"

namespace cosparse {

/// How SGAP collapses the p x c analysis representation into one score per row.
enum class RowAggregation {
    signed_sum,  // |sum_c alpha(i, c)|, as in the multi-channel algorithm
    abs_sum,     // sum_c |alpha(i, c)|, immune to cross-channel cancellation
};

/// How the per-channel residual ratio r_k is compared with r_{k-1}.
enum class RatioTest {
    magnitude,  // stop when |r_k| > |r_{k-1}|: the estimate moved more than last time
    signed_increase,  // stop when r_k > r_{k-1}, compared as signed numbers
};

struct GapConfig {
    std::size_t t = 10;          // co-support rows removed per iteration
    double lambda = 0.05;        // analysis regularization weight
    std::optional<std::size_t> k_max_override;
    RatioTest ratio_test = RatioTest::magnitude;
    // Return the estimate from before the step that tripped the ratio test.
    bool keep_previous_on_stop = false;
    RowAggregation aggregation = RowAggregation::signed_sum;
    // When false, phi^T phi and phi^T Y are recomputed before every solve.
    bool precalculate = true;
    // Keep every intermediate estimate in ReconstructionResult::estimate_history.
    bool record_history = false;

    /// floor((p - t) / t), or the override when set.
    std::size_t k_max(std::size_t p) const;
    void validate() const;
};

struct PursuitConfig {
    std::size_t atoms_per_iter = 4;
    double residual_tol = 1e-4;  // relative residual ||y - A s|| / ||y||
    std::optional<std::size_t> max_iter;  // default ceil(M / atoms_per_iter)

    std::size_t max_iterations(std::size_t n_atoms) const;
    void validate() const;
};

// Pursuit ridge used when the support submatrix is numerically rank deficient.
inline constexpr double kRidgeFallback = 1e-10;

enum class StopReason {
    max_iterations,   // k reached K_max (or max_iter)
    residual_ratio,   // some channel's r_k rose above r_{k-1}
    zero_estimate,    // initial estimate identically zero
    singular,         // system lost positive definiteness; previous estimate kept
    exhausted,        // co-support emptied (only possible with a K_max override)
    residual_tol,     // every channel's relative residual reached tolerance
    support_full,     // support reached min(n, M) atoms
};

const char* to_string(StopReason r) noexcept;

struct ReconstructionResult {
    DenseMatrix estimate;       // N x c
    DenseMatrix coefficients;   // M x c synthesis coefficients (pursuit only)
    std::size_t iterations = 0;
    // Co-support (GAP/SGAP) or support (OMMP/SOMMP) matching `estimate`, sorted.
    std::vector<std::size_t> index_set;
    // Index-set size after each successful solve; front() is the initial size.
    std::vector<std::size_t> index_set_sizes;
    // r_k per iteration, one entry per channel (GAP/SGAP).
    std::vector<std::vector<double>> residual_ratio_history;
    // ||y_i - A s_i|| / ||y_i|| per iteration (OMMP/SOMMP); front() is before any atom.
    std::vector<std::vector<double>> relative_residual_history;
    // Filled when GapConfig::record_history is set: one entry per successful solve.
    std::vector<DenseMatrix> estimate_history;
    std::vector<std::vector<std::size_t>> cosupport_history;
    std::size_t solve_count = 0;
    std::size_t product_count = 0;  // dense matrix products performed
    double wall_time = 0.0;         // seconds
    StopReason stop_reason = StopReason::max_iterations;
    bool ridge_fallback = false;
    bool zero_norm_ratio = false;   // some r_k hit a zero-norm previous column
};

struct ResidualRatio {
    std::vector<double> values;
    bool zero_previous = false;  // a previous column had zero norm; its ratio is 0
};

/// Per-column 1 - ||current_i|| / ||previous_i||.
ResidualRatio residual_ratio(const DenseMatrix& current, const DenseMatrix& previous);

/// Solves (phi^T phi + lambda * Omega_L^T Omega_L) X = phi^T Y, where Omega_L
/// keeps only the rows listed in `cosupport`.
DenseMatrix solve_estimate(const DenseMatrix& phi_gram, const DenseMatrix& phi_y,
                           const AnalysisOperator& omega, std::span<const std::size_t> cosupport,
                           double lambda);

/// Single-channel greedy analysis pursuit. y must be n x 1.
ReconstructionResult gap(const DenseMatrix& y, const MeasurementMatrix& phi,
                         const AnalysisOperator& omega, const GapConfig& cfg = {});

/// Multi-channel greedy analysis pursuit with one shared co-support and one
/// multi-RHS solve per iteration.
ReconstructionResult sgap(const DenseMatrix& y, const MeasurementMatrix& phi,
                          const AnalysisOperator& omega, const GapConfig& cfg = {});

/// Orthogonal multi-matching pursuit on a sensing dictionary A = phi * Psi.
/// The estimate is the coefficient vector.
ReconstructionResult ommp(const DenseMatrix& y, const DenseMatrix& sensing_dict,
                          const PursuitConfig& cfg = {});

/// Simultaneous OMMP: one support shared by every column of y.
ReconstructionResult sommp(const DenseMatrix& y, const DenseMatrix& sensing_dict,
                           const PursuitConfig& cfg = {});

/// Signal-domain variants: the estimate is Psi * s. `sensing_dict` must equal
/// phi * psi; the overloads taking a MeasurementMatrix build it.
ReconstructionResult ommp(const DenseMatrix& y, const DenseMatrix& sensing_dict,
                          const SynthesisDictionary& psi, const PursuitConfig& cfg = {});
ReconstructionResult sommp(const DenseMatrix& y, const DenseMatrix& sensing_dict,
                           const SynthesisDictionary& psi, const PursuitConfig& cfg = {});
ReconstructionResult ommp(const DenseMatrix& y, const MeasurementMatrix& phi,
                          const SynthesisDictionary& psi, const PursuitConfig& cfg = {});
ReconstructionResult sommp(const DenseMatrix& y, const MeasurementMatrix& phi,
                           const SynthesisDictionary& psi, const PursuitConfig& cfg = {});

}  // namespace cosparse
