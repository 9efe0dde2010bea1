#include "cosparse/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cosparse/errors.hpp"
#include "cosparse/linalg.hpp"

namespace cosparse {

const char* to_string(Ensemble e) noexcept {
    switch (e) {
        case Ensemble::gaussian: return "gaussian";
        case Ensemble::bernoulli: return "bernoulli";
        case Ensemble::orthogonal: return "orthogonal";
    }
    return "unknown";
}

AnalysisOperator first_order_diff(std::size_t n_signal) {
    if (n_signal < 2) throw ConfigError("first_order_diff needs n_signal >= 2");
    DenseMatrix m(n_signal, n_signal);
    for (std::size_t i = 0; i < n_signal; ++i) {
        m(i, i) = 1.0;
        if (i + 1 < n_signal) m(i, i + 1) = -1.0;
    }
    return {std::move(m), 1};
}

AnalysisOperator second_order_diff(std::size_t n_signal) {
    if (n_signal < 3) throw ConfigError("second_order_diff needs n_signal >= 3");
    const auto d1 = first_order_diff(n_signal);
    return {linalg::matmul(d1.matrix, d1.matrix), 2};
}

namespace {

void require_compressive(std::size_t n, std::size_t n_signal) {
    if (n < 1 || n >= n_signal)
        throw ConfigError("measurement count " + std::to_string(n) +
                          " must satisfy 1 <= n < N = " + std::to_string(n_signal));
}

}  // namespace

MeasurementMatrix gaussian_measurement(std::size_t n, std::size_t n_signal, std::uint64_t seed) {
    require_compressive(n, n_signal);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
    DenseMatrix m(n, n_signal);
    for (double& v : m.data()) v = dist(rng);
    return {std::move(m), seed, Ensemble::gaussian};
}

MeasurementMatrix bernoulli_measurement(std::size_t n, std::size_t n_signal, std::uint64_t seed) {
    require_compressive(n, n_signal);
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    DenseMatrix m(n, n_signal);
    for (double& v : m.data()) v = coin(rng) ? amp : -amp;
    return {std::move(m), seed, Ensemble::bernoulli};
}

MeasurementMatrix orthogonal_measurement(std::size_t n_signal, std::uint64_t seed) {
    if (n_signal < 1) throw ConfigError("orthogonal_measurement needs n_signal >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    DenseMatrix q(n_signal, n_signal);
    for (double& v : q.data()) v = dist(rng);
    // Modified Gram-Schmidt over rows, twice for numerical orthogonality.
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < n_signal; ++i) {
            auto ri = q.row(i);
            for (std::size_t j = 0; j < i; ++j) {
                auto rj = q.row(j);
                double dot = 0.0;
                for (std::size_t k = 0; k < n_signal; ++k) dot += ri[k] * rj[k];
                for (std::size_t k = 0; k < n_signal; ++k) ri[k] -= dot * rj[k];
            }
            double norm = 0.0;
            for (double v : ri) norm += v * v;
            norm = std::sqrt(norm);
            for (double& v : ri) v /= norm;
        }
    }
    return {std::move(q), seed, Ensemble::orthogonal};
}

MeasurementMatrix make_measurement(Ensemble kind, std::size_t n, std::size_t n_signal,
                                   std::uint64_t seed) {
    switch (kind) {
        case Ensemble::gaussian: return gaussian_measurement(n, n_signal, seed);
        case Ensemble::bernoulli: return bernoulli_measurement(n, n_signal, seed);
        case Ensemble::orthogonal:
            if (n != n_signal) throw ConfigError("orthogonal ensemble is square only");
            return orthogonal_measurement(n_signal, seed);
    }
    throw ConfigError("unknown ensemble");
}

bool is_supported_wavelet_order(int order) noexcept {
    return order == 2 || order == 4 || order == 6;
}

std::vector<double> daubechies_filter(int order) {
    const double r2 = std::sqrt(2.0);
    switch (order) {
        case 2: return {1.0 / r2, 1.0 / r2};
        case 4: {
            const double r3 = std::sqrt(3.0);
            const double d = 4.0 * r2;
            return {(1 + r3) / d, (3 + r3) / d, (3 - r3) / d, (1 - r3) / d};
        }
        case 6: {
            const double a = std::sqrt(10.0);
            const double b = std::sqrt(5.0 + 2.0 * a);
            const double d = 16.0 * r2;
            return {(1 + a + b) / d,           (5 + a + 3 * b) / d,      (10 - 2 * a + 2 * b) / d,
                    (10 - 2 * a - 2 * b) / d, (5 + a - 3 * b) / d,      (1 + a - b) / d};
        }
        default: throw ConfigError("unsupported Daubechies order " + std::to_string(order));
    }
}

int default_wavelet_levels(std::size_t n_signal) {
    const int cap = static_cast<int>(std::floor(std::log2(static_cast<double>(n_signal)))) - 2;
    int levels = 0;
    while (levels < cap && n_signal % (std::size_t{1} << (levels + 1)) == 0) ++levels;
    return levels;
}

namespace {

std::vector<double> wavelet_filter(const std::vector<double>& h) {
    const std::size_t m = h.size();
    std::vector<double> g(m);
    for (std::size_t k = 0; k < m; ++k) g[k] = (k % 2 ? -1.0 : 1.0) * h[m - 1 - k];
    return g;
}

void check_levels(std::size_t n, int order, int levels) {
    if (!is_supported_wavelet_order(order))
        throw ConfigError("unsupported Daubechies order " + std::to_string(order));
    if (levels < 0 || levels > 62) throw ConfigError("invalid level count " + std::to_string(levels));
    if (n == 0 || n % (std::size_t{1} << levels) != 0)
        throw ConfigError("signal length " + std::to_string(n) + " is not divisible by 2^" +
                          std::to_string(levels));
}

}  // namespace

std::vector<double> dwt(std::span<const double> signal, int order, int levels) {
    const std::size_t n = signal.size();
    check_levels(n, order, levels);
    const auto h = daubechies_filter(order);
    const auto g = wavelet_filter(h);
    std::vector<double> out(signal.begin(), signal.end());
    std::vector<double> tmp(n);
    for (std::size_t len = n, lvl = 0; lvl < static_cast<std::size_t>(levels); ++lvl, len /= 2) {
        const std::size_t half = len / 2;
        for (std::size_t k = 0; k < half; ++k) {
            double a = 0.0, d = 0.0;
            for (std::size_t m = 0; m < h.size(); ++m) {
                const double v = out[(2 * k + m) % len];
                a += h[m] * v;
                d += g[m] * v;
            }
            tmp[k] = a;
            tmp[half + k] = d;
        }
        std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(len), out.begin());
    }
    return out;
}

std::vector<double> idwt(std::span<const double> coeffs, int order, int levels) {
    const std::size_t n = coeffs.size();
    check_levels(n, order, levels);
    const auto h = daubechies_filter(order);
    const auto g = wavelet_filter(h);
    std::vector<double> out(coeffs.begin(), coeffs.end());
    std::vector<double> tmp(n);
    for (int lvl = levels - 1; lvl >= 0; --lvl) {
        const std::size_t len = n >> lvl;
        const std::size_t half = len / 2;
        std::fill(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(len), 0.0);
        for (std::size_t k = 0; k < half; ++k) {
            const double a = out[k];
            const double d = out[half + k];
            for (std::size_t m = 0; m < h.size(); ++m) tmp[(2 * k + m) % len] += h[m] * a + g[m] * d;
        }
        std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(len), out.begin());
    }
    return out;
}

SynthesisDictionary daubechies_dictionary(std::size_t n_signal, int wavelet_order, int levels) {
    check_levels(n_signal, wavelet_order, levels);
    DenseMatrix psi(n_signal, n_signal);
    std::vector<double> impulse(n_signal, 0.0);
    for (std::size_t j = 0; j < n_signal; ++j) {
        impulse[j] = 1.0;
        psi.set_column(j, idwt(impulse, wavelet_order, levels));
        impulse[j] = 0.0;
    }
    return {std::move(psi), wavelet_order, levels};
}

}  // namespace cosparse
