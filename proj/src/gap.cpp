#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "cosparse/errors.hpp"
#include "cosparse/linalg.hpp"
#include "cosparse/reconstruction.hpp"

namespace cosparse {

const char* to_string(StopReason r) noexcept {
    switch (r) {
        case StopReason::max_iterations: return "max_iterations";
        case StopReason::residual_ratio: return "residual_ratio";
        case StopReason::zero_estimate: return "zero_estimate";
        case StopReason::singular: return "singular";
        case StopReason::exhausted: return "exhausted";
        case StopReason::residual_tol: return "residual_tol";
        case StopReason::support_full: return "support_full";
    }
    return "unknown";
}

std::size_t GapConfig::k_max(std::size_t p) const {
    if (k_max_override) return *k_max_override;
    return p >= t ? (p - t) / t : 0;
}

void GapConfig::validate() const {
    if (t < 1) throw ConfigError("GAP removal count t must be >= 1");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw ConfigError("GAP lambda must be a positive finite number");
}

ResidualRatio residual_ratio(const DenseMatrix& current, const DenseMatrix& previous) {
    if (current.rows() != previous.rows() || current.cols() != previous.cols())
        throw ShapeError("residual_ratio: shape mismatch");
    const auto now = linalg::l2_norm_columns(current);
    const auto before = linalg::l2_norm_columns(previous);
    ResidualRatio out;
    out.values.resize(now.size());
    for (std::size_t i = 0; i < now.size(); ++i) {
        if (before[i] == 0.0) {
            out.values[i] = 0.0;
            out.zero_previous = true;
        } else {
            out.values[i] = 1.0 - now[i] / before[i];
        }
    }
    return out;
}

DenseMatrix solve_estimate(const DenseMatrix& phi_gram, const DenseMatrix& phi_y,
                           const AnalysisOperator& omega, std::span<const std::size_t> cosupport,
                           double lambda) {
    const std::size_t n = omega.n_signal();
    if (phi_gram.rows() != n || phi_gram.cols() != n)
        throw ShapeError("solve_estimate: phi^T phi must be " + std::to_string(n) + "x" +
                         std::to_string(n));
    if (phi_y.rows() != n) throw ShapeError("solve_estimate: phi^T y has wrong row count");

    DenseMatrix system = phi_gram;
    std::vector<std::size_t> nz;
    for (std::size_t row : cosupport) {
        if (row >= omega.p()) throw ConfigError("solve_estimate: co-support index out of range");
        auto w = omega.matrix.row(row);
        nz.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (w[j] != 0.0) nz.push_back(j);
        for (std::size_t a : nz) {
            const double wa = lambda * w[a];
            auto sys_row = system.row(a);
            for (std::size_t b : nz) sys_row[b] += wa * w[b];
        }
    }
    return linalg::solve_spd(system, phi_y);
}

namespace {

bool ratio_rose(double now, double before, RatioTest test) {
    return test == RatioTest::magnitude ? std::abs(now) > std::abs(before) : now > before;
}

bool all_zero(const DenseMatrix& m) {
    return std::all_of(m.data().begin(), m.data().end(), [](double v) { return v == 0.0; });
}

std::vector<std::size_t> members(const std::vector<bool>& in_set) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < in_set.size(); ++i)
        if (in_set[i]) out.push_back(i);
    return out;
}

// Rows of `alpha` scored by the configured aggregation; only co-support rows
// are candidates. Highest score first, lowest index on ties.
std::vector<std::size_t> rank_rows(const DenseMatrix& alpha, const std::vector<std::size_t>& cosupport,
                                   RowAggregation mode) {
    std::vector<double> score(alpha.rows(), 0.0);
    for (std::size_t i : cosupport) {
        double s = 0.0;
        for (double v : alpha.row(i)) s += mode == RowAggregation::signed_sum ? v : std::abs(v);
        score[i] = std::abs(s);
    }
    std::vector<std::size_t> order = cosupport;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    return order;
}

ReconstructionResult analysis_pursuit(const DenseMatrix& y, const MeasurementMatrix& phi,
                                      const AnalysisOperator& omega, const GapConfig& cfg) {
    cfg.validate();
    if (phi.n_signal() != omega.n_signal())
        throw ShapeError("measurement matrix has " + std::to_string(phi.n_signal()) +
                         " columns but the analysis operator expects " +
                         std::to_string(omega.n_signal()));
    if (y.rows() != phi.n())
        throw ShapeError("measurements have " + std::to_string(y.rows()) + " rows, expected " +
                         std::to_string(phi.n()));

    const auto start = std::chrono::steady_clock::now();
    ReconstructionResult res;
    const std::size_t p = omega.p();
    const std::size_t k_max = cfg.k_max(p);

    DenseMatrix phi_gram, phi_y;
    auto solve = [&](const std::vector<std::size_t>& cosupport) {
        if (!cfg.precalculate || phi_gram.empty()) {
            phi_gram = linalg::gram(phi.matrix);
            phi_y = linalg::matmul_at(phi.matrix, y);
            res.product_count += 2;
        }
        auto x = solve_estimate(phi_gram, phi_y, omega, cosupport, cfg.lambda);
        ++res.product_count;  // Omega_L^T Omega_L
        ++res.solve_count;
        res.index_set_sizes.push_back(cosupport.size());
        if (cfg.record_history) {
            res.estimate_history.push_back(x);
            res.cosupport_history.push_back(cosupport);
        }
        return x;
    };

    std::vector<bool> in_cosupport(p, true);
    std::vector<std::size_t> cosupport = members(in_cosupport);
    DenseMatrix estimate = solve(cosupport);
    std::vector<double> previous_ratio;

    if (all_zero(estimate)) {
        res.stop_reason = StopReason::zero_estimate;
    } else {
        res.stop_reason = StopReason::max_iterations;
        for (std::size_t k = 1; k <= k_max; ++k) {
            const DenseMatrix alpha = linalg::matmul(omega.matrix, estimate);
            ++res.product_count;

            const auto ranked = rank_rows(alpha, cosupport, cfg.aggregation);
            const bool exhausting = ranked.size() <= cfg.t;
            const std::size_t take = std::min(cfg.t, ranked.size());
            std::vector<bool> next_in = in_cosupport;
            for (std::size_t i = 0; i < take; ++i) next_in[ranked[i]] = false;
            auto next_cosupport = members(next_in);

            DenseMatrix next;
            try {
                next = solve(next_cosupport);
            } catch (const SingularMatrixError&) {
                res.stop_reason = StopReason::singular;
                break;
            }
            auto ratio = residual_ratio(next, estimate);
            res.zero_norm_ratio = res.zero_norm_ratio || ratio.zero_previous;
            res.residual_ratio_history.push_back(ratio.values);
            res.iterations = k;

            bool rose = false;
            if (!previous_ratio.empty())
                for (std::size_t c = 0; c < ratio.values.size(); ++c)
                    rose = rose || ratio_rose(ratio.values[c], previous_ratio[c], cfg.ratio_test);
            if (rose) {
                res.stop_reason = StopReason::residual_ratio;
                if (!cfg.keep_previous_on_stop) {
                    estimate = std::move(next);
                    in_cosupport = std::move(next_in);
                    cosupport = std::move(next_cosupport);
                }
                break;
            }
            estimate = std::move(next);
            in_cosupport = std::move(next_in);
            cosupport = std::move(next_cosupport);
            previous_ratio = std::move(ratio.values);
            if (exhausting) {
                res.stop_reason = StopReason::exhausted;
                break;
            }
        }
    }

    res.estimate = std::move(estimate);
    res.index_set = std::move(cosupport);
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace

ReconstructionResult gap(const DenseMatrix& y, const MeasurementMatrix& phi,
                         const AnalysisOperator& omega, const GapConfig& cfg) {
    if (y.cols() != 1)
        throw ShapeError("gap expects a single measurement column, got " + std::to_string(y.cols()));
    return analysis_pursuit(y, phi, omega, cfg);
}

ReconstructionResult sgap(const DenseMatrix& y, const MeasurementMatrix& phi,
                          const AnalysisOperator& omega, const GapConfig& cfg) {
    if (y.empty()) throw ShapeError("sgap needs at least one channel");
    return analysis_pursuit(y, phi, omega, cfg);
}

}  // namespace cosparse
