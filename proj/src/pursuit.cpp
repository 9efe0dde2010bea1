#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "cosparse/errors.hpp"
#include "cosparse/linalg.hpp"
#include "cosparse/reconstruction.hpp"

namespace cosparse {

std::size_t PursuitConfig::max_iterations(std::size_t n_atoms) const {
    if (max_iter) return *max_iter;
    return (n_atoms + atoms_per_iter - 1) / atoms_per_iter;
}

void PursuitConfig::validate() const {
    if (atoms_per_iter < 1) throw ConfigError("atoms_per_iter must be >= 1");
    if (!(residual_tol > 0.0)) throw ConfigError("residual_tol must be positive");
}

namespace {

// Columns of `a` picked by `support`, in support order.
DenseMatrix gather_columns(const DenseMatrix& a, const std::vector<std::size_t>& support) {
    DenseMatrix out(a.rows(), support.size());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto src = a.row(r);
        auto dst = out.row(r);
        for (std::size_t j = 0; j < support.size(); ++j) dst[j] = src[support[j]];
    }
    return out;
}

std::vector<double> relative_residuals(const DenseMatrix& residual, const std::vector<double>& y_norms) {
    auto norms = linalg::l2_norm_columns(residual);
    for (std::size_t c = 0; c < norms.size(); ++c) norms[c] = y_norms[c] > 0.0 ? norms[c] / y_norms[c] : 0.0;
    return norms;
}

ReconstructionResult matching_pursuit(const DenseMatrix& y, const DenseMatrix& dict,
                                      const PursuitConfig& cfg) {
    cfg.validate();
    if (y.empty() || dict.empty()) throw ShapeError("pursuit: empty input");
    if (y.rows() != dict.rows())
        throw ShapeError("pursuit: measurements have " + std::to_string(y.rows()) +
                         " rows but the sensing dictionary has " + std::to_string(dict.rows()));

    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = dict.rows();
    const std::size_t m = dict.cols();
    const std::size_t channels = y.cols();

    // Unit-norm atoms make raw and normalized correlation scoring identical.
    const auto atom_norms = linalg::l2_norm_columns(dict);
    DenseMatrix atoms = dict;
    for (std::size_t j = 0; j < m; ++j)
        if (atom_norms[j] == 0.0) throw ConfigError("sensing dictionary column " + std::to_string(j) + " is zero");
    for (std::size_t r = 0; r < n; ++r) {
        auto row = atoms.row(r);
        for (std::size_t j = 0; j < m; ++j) row[j] /= atom_norms[j];
    }

    ReconstructionResult res;
    const auto y_norms = linalg::l2_norm_columns(y);
    DenseMatrix residual = y;
    DenseMatrix coef;  // |support| x c, normalized-atom scale
    std::vector<std::size_t> support;
    std::vector<bool> chosen(m, false);
    const std::size_t capacity = std::min(n, m);
    const std::size_t max_iter = cfg.max_iterations(m);

    auto rel = relative_residuals(residual, y_norms);
    res.relative_residual_history.push_back(rel);
    auto converged = [&] {
        return std::all_of(rel.begin(), rel.end(), [&](double v) { return v <= cfg.residual_tol; });
    };

    res.stop_reason = StopReason::max_iterations;
    while (true) {
        if (converged()) {
            res.stop_reason = StopReason::residual_tol;
            break;
        }
        if (support.size() >= capacity) {
            res.stop_reason = StopReason::support_full;
            break;
        }
        if (res.iterations >= max_iter) break;

        const DenseMatrix corr = linalg::matmul_at(atoms, residual);
        ++res.product_count;
        std::vector<double> score(m, 0.0);
        std::vector<std::size_t> candidates;
        for (std::size_t j = 0; j < m; ++j) {
            if (chosen[j]) continue;
            for (double v : corr.row(j)) score[j] += std::abs(v);
            candidates.push_back(j);
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
        const std::size_t take = std::min({cfg.atoms_per_iter, candidates.size(), capacity - support.size()});
        for (std::size_t i = 0; i < take; ++i) {
            chosen[candidates[i]] = true;
            support.push_back(candidates[i]);
        }

        const DenseMatrix sub = gather_columns(atoms, support);
        DenseMatrix normal = linalg::gram(sub);
        const DenseMatrix rhs = linalg::matmul_at(sub, y);
        res.product_count += 2;
        try {
            coef = linalg::solve_spd(normal, rhs);
        } catch (const SingularMatrixError&) {
            for (std::size_t i = 0; i < normal.rows(); ++i) normal(i, i) += kRidgeFallback;
            coef = linalg::solve_spd(normal, rhs);
            res.ridge_fallback = true;
        }
        ++res.solve_count;
        ++res.iterations;

        const DenseMatrix fit = linalg::matmul(sub, coef);
        ++res.product_count;
        residual = y;
        for (std::size_t i = 0; i < residual.size(); ++i) residual.data()[i] -= fit.data()[i];
        rel = relative_residuals(residual, y_norms);
        res.relative_residual_history.push_back(rel);
        res.index_set_sizes.push_back(support.size());
    }

    DenseMatrix s(m, channels);
    for (std::size_t j = 0; j < support.size(); ++j)
        for (std::size_t c = 0; c < channels; ++c) s(support[j], c) = coef(j, c) / atom_norms[support[j]];
    res.coefficients = s;
    res.estimate = std::move(s);
    std::sort(support.begin(), support.end());
    res.index_set = std::move(support);
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

void synthesize(ReconstructionResult& res, const SynthesisDictionary& psi,
                std::chrono::steady_clock::time_point start) {
    res.estimate = linalg::matmul(psi.matrix, res.coefficients);
    ++res.product_count;
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void require_dict_matches(const DenseMatrix& sensing_dict, const SynthesisDictionary& psi) {
    if (sensing_dict.cols() != psi.matrix.cols())
        throw ShapeError("sensing dictionary and synthesis dictionary disagree on atom count");
}

}  // namespace

ReconstructionResult ommp(const DenseMatrix& y, const DenseMatrix& sensing_dict, const PursuitConfig& cfg) {
    if (y.cols() != 1) throw ShapeError("ommp expects a single measurement column, got " + std::to_string(y.cols()));
    return matching_pursuit(y, sensing_dict, cfg);
}

ReconstructionResult sommp(const DenseMatrix& y, const DenseMatrix& sensing_dict, const PursuitConfig& cfg) {
    return matching_pursuit(y, sensing_dict, cfg);
}

ReconstructionResult ommp(const DenseMatrix& y, const DenseMatrix& sensing_dict,
                          const SynthesisDictionary& psi, const PursuitConfig& cfg) {
    require_dict_matches(sensing_dict, psi);
    const auto start = std::chrono::steady_clock::now();
    auto res = ommp(y, sensing_dict, cfg);
    synthesize(res, psi, start);
    return res;
}

ReconstructionResult sommp(const DenseMatrix& y, const DenseMatrix& sensing_dict,
                           const SynthesisDictionary& psi, const PursuitConfig& cfg) {
    require_dict_matches(sensing_dict, psi);
    const auto start = std::chrono::steady_clock::now();
    auto res = sommp(y, sensing_dict, cfg);
    synthesize(res, psi, start);
    return res;
}

ReconstructionResult ommp(const DenseMatrix& y, const MeasurementMatrix& phi,
                          const SynthesisDictionary& psi, const PursuitConfig& cfg) {
    return ommp(y, linalg::matmul(phi.matrix, psi.matrix), psi, cfg);
}

ReconstructionResult sommp(const DenseMatrix& y, const MeasurementMatrix& phi,
                           const SynthesisDictionary& psi, const PursuitConfig& cfg) {
    return sommp(y, linalg::matmul(phi.matrix, psi.matrix), psi, cfg);
}

}  // namespace cosparse
