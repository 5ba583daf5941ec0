#ifndef NULLITYLAB_SUBSPACE_HPP
#define NULLITYLAB_SUBSPACE_HPP

#include <algorithm>

#include "nullitylab/common.hpp"

namespace nullitylab {

/**
 * Tolerance-aware linear subspace of R^n, stored as an orthonormal basis
 * (columns of `basis`). The zero subspace (zero columns) is a first-class
 * value. Rank decisions use singular values against
 * tol * max(sigma_max, scale): the relative threshold of the global rank
 * policy, with an optional absolute scale floor so that numerically-zero
 * operators (sigma_max itself at noise level) get rank 0 instead of full rank.
 */
class Subspace {
 public:
  Subspace() = default;
  Subspace(int ambient_dim, Mat orthonormal_basis, double tol)
      : ambient_(ambient_dim), basis_(std::move(orthonormal_basis)), tol_(tol) {}

  static Subspace zero(int ambient_dim, double tol = default_tol()) {
    return Subspace(ambient_dim, Mat::Zero(ambient_dim, 0), tol);
  }
  static Subspace full(int ambient_dim, double tol = default_tol()) {
    return Subspace(ambient_dim, Mat::Identity(ambient_dim, ambient_dim), tol);
  }

  int ambient_dim() const { return ambient_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Mat& basis() const { return basis_; }
  double tol() const { return tol_; }

  /** Orthogonal projection of x onto the subspace. */
  Vec project(const Vec& x) const {
    if (x.size() != ambient_) throw dimension_mismatch("project: ambient mismatch");
    if (dim() == 0) return Vec::Zero(ambient_);
    return basis_ * (basis_.transpose() * x);
  }

  /** Membership up to relative residual tol (or the given override). */
  bool contains(const Vec& x, double tol = -1) const {
    if (x.size() != ambient_) throw dimension_mismatch("contains: ambient mismatch");
    double t = tol > 0 ? tol : tol_;
    double nx = x.norm();
    if (nx == 0) return true;
    return (x - project(x)).norm() <= t * nx;
  }
  bool contains(const Subspace& other, double tol = -1) const {
    for (int j = 0; j < other.dim(); ++j)
      if (!contains(Vec(other.basis().col(j)), tol)) return false;
    return true;
  }

  /** Largest membership residual over the columns of M (relative). */
  double containment_residual(const Mat& M) const {
    double worst = 0;
    for (int j = 0; j < M.cols(); ++j) {
      Vec x = M.col(j);
      double nx = x.norm();
      if (nx == 0) continue;
      worst = std::max(worst, (x - project(x)).norm() / nx);
    }
    return worst;
  }

  /** Orthogonal complement in the ambient space. */
  Subspace complement() const;

 private:
  int ambient_ = 0;
  Mat basis_;
  double tol_ = default_tol();
};

/**
 * Span of a set of vectors (given as matrix columns). `scale` is the optional
 * absolute floor for the rank decision; <= 0 means purely relative.
 */
inline Subspace span_of(const Mat& columns, double tol = default_tol(),
                        double scale = 0.0) {
  const int n = static_cast<int>(columns.rows());
  if (columns.cols() == 0) return Subspace::zero(n, tol);
  Eigen::JacobiSVD<Mat> svd(columns, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  double thr = tol * std::max(s.size() ? s(0) : 0.0, scale);
  int r = 0;
  while (r < s.size() && s(r) > thr) ++r;
  return Subspace(n, svd.matrixU().leftCols(r), tol);
}

inline Subspace span_of(const std::vector<Vec>& vectors, double tol = default_tol(),
                        double scale = 0.0) {
  if (vectors.empty())
    throw invalid_input("span_of: empty vector list needs an ambient dimension");
  const int n = static_cast<int>(vectors[0].size());
  Mat M(n, static_cast<int>(vectors.size()));
  for (size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != n)
      throw dimension_mismatch("span_of: mixed ambient dimensions");
    M.col(static_cast<int>(j)) = vectors[j];
  }
  return span_of(M, tol, scale);
}

/**
 * Null space of a (possibly stacked, m x n) operator. `scale` floors the rank
 * threshold so an operator that is zero up to noise yields the full kernel.
 */
inline Subspace kernel_of(const Mat& op, double tol = default_tol(),
                          double scale = 0.0) {
  const int n = static_cast<int>(op.cols());
  if (op.rows() == 0) return Subspace::full(n, tol);
  Eigen::JacobiSVD<Mat> svd(op, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double thr = tol * std::max(s.size() ? s(0) : 0.0, scale);
  int r = 0;
  while (r < s.size() && s(r) > thr) ++r;
  return Subspace(n, svd.matrixV().rightCols(n - r), tol);
}

inline Subspace Subspace::complement() const {
  // Kernel of the projector's adjoint rows: vectors orthogonal to the basis.
  if (dim() == 0) return Subspace::full(ambient_, tol_);
  return kernel_of(Mat(basis_.transpose()), tol_, 1.0);
}

inline Subspace sum(const Subspace& A, const Subspace& B) {
  if (A.ambient_dim() != B.ambient_dim())
    throw dimension_mismatch("sum: ambient mismatch");
  Mat M(A.ambient_dim(), A.dim() + B.dim());
  M << A.basis(), B.basis();
  return span_of(M, std::min(A.tol(), B.tol()), 1.0);
}

/** Intersection via orthogonal-complement duality: (A^c + B^c)^c. */
inline Subspace intersect(const Subspace& A, const Subspace& B) {
  if (A.ambient_dim() != B.ambient_dim())
    throw dimension_mismatch("intersect: ambient mismatch");
  return sum(A.complement(), B.complement()).complement();
}

inline bool contains(const Subspace& A, const Vec& x, double tol = -1) {
  return A.contains(x, tol);
}
inline bool contains(const Subspace& A, const Subspace& B, double tol = -1) {
  return A.contains(B, tol);
}
inline Vec project(const Subspace& A, const Vec& x) { return A.project(x); }

}  // namespace nullitylab

#endif
