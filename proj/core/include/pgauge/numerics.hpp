#pragma once

#include <Eigen/Core>

#include <vector>

namespace pgauge {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative singular-value cutoff used for every rank decision in the library.
inline constexpr double kRankRelTol = 1e-10;

/// Orthonormal basis of a linear subspace of R^p, stored as the columns of a
/// p x d matrix. d may be zero.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;
  explicit SubspaceBasis(Index ambient) : basis_(ambient, 0) {}
  /// Takes ownership of `columns`; the caller guarantees orthonormality.
  explicit SubspaceBasis(Matrix columns) : basis_(std::move(columns)) {}

  [[nodiscard]] Index ambient() const { return basis_.rows(); }
  [[nodiscard]] Index dim() const { return basis_.cols(); }
  [[nodiscard]] const Matrix& matrix() const { return basis_; }
  [[nodiscard]] Vector vector(Index i) const { return basis_.col(i); }

  /// Orthogonal projection of v onto the subspace.
  [[nodiscard]] Vector project(const Vector& v) const;
  /// max_ij |B'B - I|.
  [[nodiscard]] double orthonormality_error() const;

 private:
  Matrix basis_;
};

/// Singular values of A in decreasing order.
[[nodiscard]] Vector singular_values(const Matrix& a);

/// Numerical rank with cutoff kRankRelTol * sigma_max.
[[nodiscard]] Index rank(const Matrix& a);

/// Moore-Penrose pseudoinverse via SVD; singular values below
/// kRankRelTol * sigma_max are treated as zero.
[[nodiscard]] Matrix pseudoinverse(const Matrix& a);

/// Orthonormal basis of ker(A); dim = cols(A) - rank(A).
[[nodiscard]] SubspaceBasis null_space_basis(const Matrix& a);

/// Orthonormal basis of row(A) = col(A').
[[nodiscard]] SubspaceBasis row_space_basis(const Matrix& a);

/// Orthonormal basis of the span of the columns of `vectors` (p x m).
[[nodiscard]] SubspaceBasis span_basis(const Matrix& vectors, Index ambient);

/// Orthogonal complement of a subspace inside R^ambient.
[[nodiscard]] SubspaceBasis orthogonal_complement(const SubspaceBasis& s);

/// True iff || A'(A')^+ v - v ||_inf <= tol, i.e. v lies in row(A).
[[nodiscard]] bool in_row_space(const Matrix& a, const Vector& v, double tol = 1e-9);

/// Distance (sup-norm) between v and its projection onto row(A).
[[nodiscard]] double row_space_residual(const Matrix& a, const Vector& v);

/// Columns of A with the given indices, in order.
[[nodiscard]] Matrix select_columns(const Matrix& a, const std::vector<Index>& cols);

/// Entries of v with the given indices, in order.
[[nodiscard]] Vector select_entries(const Vector& v, const std::vector<Index>& idx);

/// Largest eigenvalue of A'A estimated by power iteration.
[[nodiscard]] double spectral_norm_squared(const Matrix& a, int iterations = 50);

/// True when every entry is finite.
[[nodiscard]] bool all_finite(const Matrix& a);

}  // namespace pgauge
