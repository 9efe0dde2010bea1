#pragma once

#include <vector>

#include "cosparse/matrix.hpp"

namespace cosparse::linalg {

// Relative tolerance for the symmetry precondition of solve_spd.
inline constexpr double kSymmetryRelTol = 1e-10;
// A Cholesky pivot below this fraction of its original diagonal entry is
// treated as a loss of positive definiteness.
inline constexpr double kPivotRelTol = 1e-12;

/// a * b. Throws ShapeError unless a.cols() == b.rows().
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// a^T * b without materializing the transpose. Requires a.rows() == b.rows().
DenseMatrix matmul_at(const DenseMatrix& a, const DenseMatrix& b);

/// a^T * a, exactly symmetric.
DenseMatrix gram(const DenseMatrix& a);

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
class Cholesky {
  public:
    /// Factors a. Throws SingularMatrixError naming the first failing pivot.
    explicit Cholesky(const DenseMatrix& a);

    /// Solves (L L^T) X = b for every column of b.
    DenseMatrix solve(const DenseMatrix& b) const;

    const DenseMatrix& lower() const noexcept { return lower_; }

  private:
    DenseMatrix lower_;
};

/// Solves a X = b for symmetric positive definite a. b may hold several
/// right-hand sides. Never forms an inverse.
DenseMatrix solve_spd(const DenseMatrix& a, const DenseMatrix& b);

/// Euclidean norm of every column.
std::vector<double> l2_norm_columns(const DenseMatrix& m);

double frobenius_norm(const DenseMatrix& m);

}  // namespace cosparse::linalg
