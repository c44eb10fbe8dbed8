#include "pgauge/numerics.hpp"

#include "pgauge/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace pgauge {

namespace {

struct Svd {
  Matrix u;
  Vector s;
  Matrix v;
  Index rank = 0;
};

// Full U and V so null spaces are available.
Svd full_svd(const Matrix& a) {
  Svd out;
  if (a.rows() == 0 || a.cols() == 0) {
    out.u = Matrix::Identity(a.rows(), a.rows());
    out.v = Matrix::Identity(a.cols(), a.cols());
    out.s = Vector(0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.u = svd.matrixU();
  out.v = svd.matrixV();
  out.s = svd.singularValues();
  const double smax = out.s.size() > 0 ? out.s(0) : 0.0;
  const double cut = kRankRelTol * smax;
  for (Index i = 0; i < out.s.size(); ++i) {
    if (out.s(i) > cut && out.s(i) > 0.0) ++out.rank;
  }
  return out;
}

}  // namespace

Vector SubspaceBasis::project(const Vector& v) const {
  if (v.size() != ambient()) throw DimensionMismatch("project: vector length differs from ambient dimension");
  if (dim() == 0) return Vector::Zero(ambient());
  return basis_ * (basis_.transpose() * v);
}

double SubspaceBasis::orthonormality_error() const {
  if (dim() == 0) return 0.0;
  Matrix g = basis_.transpose() * basis_;
  g -= Matrix::Identity(dim(), dim());
  return g.cwiseAbs().maxCoeff();
}

Vector singular_values(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return Vector(0);
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();
}

Index rank(const Matrix& a) { return full_svd(a).rank; }

Matrix pseudoinverse(const Matrix& a) {
  Matrix out = Matrix::Zero(a.cols(), a.rows());
  if (a.rows() == 0 || a.cols() == 0) return out;
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cut = kRankRelTol * (s.size() > 0 ? s(0) : 0.0);
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut && s(i) > 0.0) {
      out.noalias() += svd.matrixV().col(i) * (svd.matrixU().col(i).transpose() / s(i));
    }
  }
  return out;
}

SubspaceBasis null_space_basis(const Matrix& a) {
  const Svd svd = full_svd(a);
  const Index n = a.cols();
  return SubspaceBasis(Matrix(svd.v.rightCols(n - svd.rank)));
}

SubspaceBasis row_space_basis(const Matrix& a) {
  const Svd svd = full_svd(a);
  return SubspaceBasis(Matrix(svd.v.leftCols(svd.rank)));
}

SubspaceBasis span_basis(const Matrix& vectors, Index ambient) {
  if (vectors.cols() == 0) return SubspaceBasis(ambient);
  if (vectors.rows() != ambient) throw DimensionMismatch("span_basis: row count differs from ambient dimension");
  const Svd svd = full_svd(vectors);
  return SubspaceBasis(Matrix(svd.u.leftCols(svd.rank)));
}

SubspaceBasis orthogonal_complement(const SubspaceBasis& s) {
  const Index p = s.ambient();
  if (s.dim() == 0) return SubspaceBasis(Matrix::Identity(p, p));
  // Left null space of the basis matrix.
  return null_space_basis(s.matrix().transpose());
}

double row_space_residual(const Matrix& a, const Vector& v) {
  if (v.size() != a.cols()) throw DimensionMismatch("in_row_space: vector length must equal cols(A)");
  const Matrix at = a.transpose();
  const Vector proj = at * (pseudoinverse(at) * v);
  return v.size() == 0 ? 0.0 : (proj - v).cwiseAbs().maxCoeff();
}

bool in_row_space(const Matrix& a, const Vector& v, double tol) {
  return row_space_residual(a, v) <= tol;
}

Matrix select_columns(const Matrix& a, const std::vector<Index>& cols) {
  Matrix out(a.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = a.col(cols[j]);
  return out;
}

Vector select_entries(const Vector& v, const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out(static_cast<Index>(j)) = v(idx[j]);
  return out;
}

double spectral_norm_squared(const Matrix& a, int iterations) {
  const Index p = a.cols();
  if (p == 0 || a.rows() == 0) return 0.0;
  // Deterministic start with no structural zeros.
  Vector v(p);
  for (Index i = 0; i < p; ++i) v(i) = 1.0 + 0.01 * static_cast<double>(i % 7);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = a.transpose() * (a * v);
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    lambda = v.dot(w);
    v = w / nrm;
  }
  return std::max(lambda, (a * v).squaredNorm());
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace pgauge
