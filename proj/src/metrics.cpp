#include "cosparse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cosparse/errors.hpp"

namespace cosparse {

double prd(const DenseMatrix& x, const DenseMatrix& x_hat) {
    if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols()) throw ShapeError("prd: shape mismatch");
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x.data()[i] - x_hat.data()[i];
        err += d * d;
        ref += x.data()[i] * x.data()[i];
    }
    if (ref == 0.0) throw MetricError("prd is undefined for a zero reference signal");
    return std::sqrt(err) / std::sqrt(ref);
}

double compression_ratio(std::size_t n, std::size_t n_signal) {
    if (n == 0 || n > n_signal)
        throw ConfigError("compression ratio needs 0 < n <= N, got n=" + std::to_string(n) +
                          " N=" + std::to_string(n_signal));
    return static_cast<double>(n) / static_cast<double>(n_signal);
}

std::size_t measurements_for_ratio(double cr, std::size_t n_signal) {
    if (!(cr > 0.0 && cr <= 1.0)) throw ConfigError("compression ratio must lie in (0, 1]");
    const auto n = static_cast<std::size_t>(std::llround(cr * static_cast<double>(n_signal)));
    return std::clamp<std::size_t>(n, 1, n_signal);
}

double percentile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw MetricError("percentile of an empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxplotSummary boxplot_stats(std::span<const double> values, double w) {
    if (values.empty()) throw MetricError("boxplot_stats needs a non-empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    BoxplotSummary s;
    s.w = w;
    s.count = sorted.size();
    s.p25 = percentile_sorted(sorted, 0.25);
    s.median = percentile_sorted(sorted, 0.5);
    s.p75 = percentile_sorted(sorted, 0.75);
    const double iqr = s.p75 - s.p25;
    s.low = s.p25 - w * iqr;
    s.high = s.p75 + w * iqr;
    for (double v : values)
        if (v < s.low || v > s.high) s.outliers.push_back(v);
    return s;
}

}  // namespace cosparse
