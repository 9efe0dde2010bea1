#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cosparse/matrix.hpp"

namespace cosparse {

inline constexpr double kDefaultWhisker = 1.5;

/// Five-number boxplot summary with whiskers at P25 - w*IQR and P75 + w*IQR.
struct BoxplotSummary {
    double low = 0.0;
    double p25 = 0.0;
    double median = 0.0;
    double p75 = 0.0;
    double high = 0.0;
    std::vector<double> outliers;  // values strictly outside [low, high], input order
    double w = kDefaultWhisker;
    std::size_t count = 0;
};

/// ||x - x_hat||_2 / ||x||_2 as a ratio (not percent). Throws MetricError when
/// x is zero.
double prd(const DenseMatrix& x, const DenseMatrix& x_hat);

/// n / N.
double compression_ratio(std::size_t n, std::size_t n_signal);

/// Measurement count for a target compression ratio, rounded to nearest.
std::size_t measurements_for_ratio(double cr, std::size_t n_signal);

/// Percentile q in [0, 1] by linear interpolation between closest ranks.
/// `sorted` must be ascending and non-empty.
double percentile_sorted(std::span<const double> sorted, double q);

BoxplotSummary boxplot_stats(std::span<const double> values, double w = kDefaultWhisker);

}  // namespace cosparse
