#include "cosparse/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cosparse/errors.hpp"

namespace cosparse::linalg {

namespace {

std::string dims(const DenseMatrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_symmetric(const DenseMatrix& a) {
    double scale = 0.0;
    for (double v : a.data()) scale = std::max(scale, std::abs(v));
    const double tol = kSymmetryRelTol * scale;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > tol)
                throw Error("solve_spd: matrix is not symmetric at (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
}

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("matmul: " + dims(a) + " times " + dims(b));
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto out_row = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto b_row = b.row(k);
            for (std::size_t j = 0; j < b_row.size(); ++j) out_row[j] += aik * b_row[j];
        }
    }
    return out;
}

DenseMatrix matmul_at(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) throw ShapeError("matmul_at: " + dims(a) + "^T times " + dims(b));
    DenseMatrix out(a.cols(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto a_row = a.row(r);
        auto b_row = b.row(r);
        for (std::size_t i = 0; i < a_row.size(); ++i) {
            const double ari = a_row[i];
            if (ari == 0.0) continue;
            auto out_row = out.row(i);
            for (std::size_t j = 0; j < b_row.size(); ++j) out_row[j] += ari * b_row[j];
        }
    }
    return out;
}

DenseMatrix gram(const DenseMatrix& a) {
    const std::size_t n = a.cols();
    DenseMatrix g(n, n);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto a_row = a.row(r);
        for (std::size_t i = 0; i < n; ++i) {
            const double ari = a_row[i];
            if (ari == 0.0) continue;
            auto g_row = g.row(i);
            for (std::size_t j = i; j < n; ++j) g_row[j] += ari * a_row[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
    return g;
}

Cholesky::Cholesky(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw ShapeError("cholesky: matrix is " + dims(a));
    const std::size_t n = a.rows();
    lower_ = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        auto lj = lower_.row(j);
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= lj[k] * lj[k];
        if (!(d > kPivotRelTol * std::abs(a(j, j)))) throw SingularMatrixError(j, d);
        const double pivot = std::sqrt(d);
        lj[j] = pivot;
        for (std::size_t i = j + 1; i < n; ++i) {
            auto li = lower_.row(i);
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
            li[j] = s / pivot;
        }
    }
}

DenseMatrix Cholesky::solve(const DenseMatrix& b) const {
    const std::size_t n = lower_.rows();
    if (b.rows() != n) throw ShapeError("cholesky solve: rhs is " + dims(b) + ", factor is " + dims(lower_));
    // Work on b^T so each right-hand side is contiguous.
    DenseMatrix x = b.transpose();
    for (std::size_t c = 0; c < x.rows(); ++c) {
        auto v = x.row(c);
        for (std::size_t i = 0; i < n; ++i) {
            auto li = lower_.row(i);
            double s = v[i];
            for (std::size_t k = 0; k < i; ++k) s -= li[k] * v[k];
            v[i] = s / li[i];
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = v[i];
            for (std::size_t k = i + 1; k < n; ++k) s -= lower_(k, i) * v[k];
            v[i] = s / lower_(i, i);
        }
    }
    return x.transpose();
}

DenseMatrix solve_spd(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != a.cols()) throw ShapeError("solve_spd: matrix is " + dims(a));
    if (b.rows() != a.rows()) throw ShapeError("solve_spd: " + dims(a) + " with rhs " + dims(b));
    require_symmetric(a);
    return Cholesky(a).solve(b);
}

std::vector<double> l2_norm_columns(const DenseMatrix& m) {
    std::vector<double> sq(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) sq[c] += row[c] * row[c];
    }
    for (double& v : sq) v = std::sqrt(v);
    return sq;
}

double frobenius_norm(const DenseMatrix& m) {
    double s = 0.0;
    for (double v : m.data()) s += v * v;
    return std::sqrt(s);
}

}  // namespace cosparse::linalg
