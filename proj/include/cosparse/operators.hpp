#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cosparse/matrix.hpp"

namespace cosparse {

/// Square finite-difference analysis operator (p == N).
struct AnalysisOperator {
    DenseMatrix matrix;
    int order = 0;

    std::size_t p() const noexcept { return matrix.rows(); }
    std::size_t n_signal() const noexcept { return matrix.cols(); }
};

enum class Ensemble { gaussian, bernoulli, orthogonal };

const char* to_string(Ensemble e) noexcept;

struct MeasurementMatrix {
    DenseMatrix matrix;
    std::uint64_t seed = 0;
    Ensemble kind = Ensemble::gaussian;

    std::size_t n() const noexcept { return matrix.rows(); }
    std::size_t n_signal() const noexcept { return matrix.cols(); }
};

/// Square orthogonal wavelet synthesis basis; column j is the inverse
/// transform of the j-th unit coefficient vector.
struct SynthesisDictionary {
    DenseMatrix matrix;
    int wavelet_order = 0;
    int levels = 0;
};

/// Upper-bidiagonal operator: 1 on the diagonal, -1 above it, last row e_N.
AnalysisOperator first_order_diff(std::size_t n_signal);

/// Product of two first-order operators. Interior rows carry (1, -2, 1).
AnalysisOperator second_order_diff(std::size_t n_signal);

/// i.i.d. N(0, 1/n) entries. Requires 1 <= n < n_signal.
MeasurementMatrix gaussian_measurement(std::size_t n, std::size_t n_signal, std::uint64_t seed);

/// i.i.d. +-1/sqrt(n) entries. Requires 1 <= n < n_signal.
MeasurementMatrix bernoulli_measurement(std::size_t n, std::size_t n_signal, std::uint64_t seed);

/// Random square orthogonal matrix (Gram-Schmidt on a Gaussian draw). This is
/// the CR = 1 sanity configuration; it is not compressive.
MeasurementMatrix orthogonal_measurement(std::size_t n_signal, std::uint64_t seed);

MeasurementMatrix make_measurement(Ensemble kind, std::size_t n, std::size_t n_signal,
                                   std::uint64_t seed);

// Daubechies filters are indexed by tap count: 2 is Haar, 4 is D4, 6 is D6.
bool is_supported_wavelet_order(int order) noexcept;

/// Scaling (low-pass) filter for the given tap count.
std::vector<double> daubechies_filter(int order);

/// Deepest level count <= floor(log2 N) - 2 that still divides N.
int default_wavelet_levels(std::size_t n_signal);

/// Periodized multi-level forward transform. Output layout is
/// [approx_L, detail_L, detail_{L-1}, ..., detail_1].
std::vector<double> dwt(std::span<const double> signal, int order, int levels);

/// Inverse of dwt().
std::vector<double> idwt(std::span<const double> coeffs, int order, int levels);

SynthesisDictionary daubechies_dictionary(std::size_t n_signal, int wavelet_order, int levels);

}  // namespace cosparse
