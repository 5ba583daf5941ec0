#ifndef NULLITYLAB_LIE_HPP
#define NULLITYLAB_LIE_HPP

#include <array>
#include <cmath>
#include <map>

#include "nullitylab/subspace.hpp"

namespace nullitylab {

/**
 * Finite-dimensional real Lie algebra as a structure-constant tensor:
 * [e_i, e_j] = sum_k c(i,j,k) e_k, with labeled basis.
 */
struct LieAlgebraData {
  int dim = 0;
  Tensor3 c;
  std::vector<std::string> labels;
};

inline Vec bracket(const LieAlgebraData& alg, const Vec& x, const Vec& y) {
  if (x.size() != alg.dim || y.size() != alg.dim)
    throw dimension_mismatch("bracket: vector length != algebra dim");
  Vec out = Vec::Zero(alg.dim);
  for (int i = 0; i < alg.dim; ++i) {
    if (x(i) == 0) continue;
    for (int j = 0; j < alg.dim; ++j) {
      if (y(j) == 0) continue;
      for (int k = 0; k < alg.dim; ++k) out(k) += x(i) * y(j) * alg.c(i, j, k);
    }
  }
  return out;
}

/** Basis bracket [e_i, e_j] without building the unit vectors. */
inline Vec basis_bracket(const LieAlgebraData& alg, int i, int j) {
  Vec out(alg.dim);
  for (int k = 0; k < alg.dim; ++k) out(k) = alg.c(i, j, k);
  return out;
}

/** Max over i<j,k of the antisymmetry defect |c(i,j,k)+c(j,i,k)|. */
inline double antisymmetry_residual(const LieAlgebraData& alg) {
  double r = 0;
  for (int i = 0; i < alg.dim; ++i)
    for (int j = 0; j < alg.dim; ++j)
      for (int k = 0; k < alg.dim; ++k)
        r = std::max(r, std::abs(alg.c(i, j, k) + alg.c(j, i, k)));
  return r;
}

/** Max-norm of the Jacobi cyclic sum over all basis triples. */
inline double check_jacobi(const LieAlgebraData& alg) {
  double r = 0;
  for (int i = 0; i < alg.dim; ++i)
    for (int j = 0; j < alg.dim; ++j)
      for (int k = 0; k < alg.dim; ++k) {
        Vec ek(alg.dim), ei(alg.dim), ej(alg.dim);
        ek = Vec::Unit(alg.dim, k);
        ei = Vec::Unit(alg.dim, i);
        ej = Vec::Unit(alg.dim, j);
        Vec v = bracket(alg, basis_bracket(alg, i, j), ek) +
                bracket(alg, basis_bracket(alg, j, k), ei) +
                bracket(alg, basis_bracket(alg, k, i), ej);
        r = std::max(r, v.lpNorm<Eigen::Infinity>());
      }
  return r;
}

/** so3 with [X_i, X_j] = eps_ijk X_k. */
inline LieAlgebraData so3_algebra() {
  LieAlgebraData alg;
  alg.dim = 3;
  alg.c = Tensor3(3);
  static const int perm[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  for (auto& p : perm) {
    alg.c(p[0], p[1], p[2]) = 1;
    alg.c(p[1], p[0], p[2]) = -1;
  }
  alg.labels = {"X1", "X2", "X3"};
  return alg;
}

/** Abelian algebra of the given dimension (all brackets zero). */
inline LieAlgebraData abelian_algebra(int dim) {
  LieAlgebraData alg;
  alg.dim = dim;
  alg.c = Tensor3(dim);
  for (int i = 0; i < dim; ++i) alg.labels.push_back("e" + std::to_string(i + 1));
  return alg;
}

/**
 * Orthogonal representation of a Lie algebra on R^n: one skew generator per
 * basis element of k_algebra.
 */
struct RepresentationData {
  LieAlgebraData k_algebra;
  int n = 0;
  std::vector<Mat> generators;
};

/** Dimension of the commutant {M : [M, G_a] = 0 for all a}; 1 <=> irreducible
 * over R for the odd-dimensional so3 modules used here. */
inline int commutant_dimension(const RepresentationData& rep,
                               double tol = default_tol()) {
  const int n = rep.n;
  const int ng = static_cast<int>(rep.generators.size());
  Mat sys(ng * n * n, n * n);
  for (int a = 0; a < ng; ++a) {
    const Mat& G = rep.generators[a];
    // row block: vec(G M - M G) as linear map of vec(M), column-major vec
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s) {
            double coef = 0;
            if (s == q) coef += G(p, r);   // (G M)_{pq} term
            if (r == p) coef -= G(s, q);   // (M G)_{pq} term
            sys(a * n * n + p * n + q, r * n + s) = coef;
          }
  }
  return kernel_of(sys, tol, 1.0).dim();
}

/** Validation residuals for RepresentationData invariants. */
struct RepCheck {
  double skew = 0;
  double bracket_realization = 0;
  int commutant_dim = 0;
};

inline RepCheck check_representation(const RepresentationData& rep) {
  RepCheck out;
  const int ng = static_cast<int>(rep.generators.size());
  for (const Mat& G : rep.generators)
    out.skew = std::max(out.skew,
                        (G + G.transpose()).lpNorm<Eigen::Infinity>());
  for (int a = 0; a < ng; ++a)
    for (int b = 0; b < ng; ++b) {
      Mat C = rep.generators[a] * rep.generators[b] -
              rep.generators[b] * rep.generators[a];
      for (int k = 0; k < ng; ++k)
        C -= rep.k_algebra.c(a, b, k) * rep.generators[k];
      out.bracket_realization =
          std::max(out.bracket_realization, C.lpNorm<Eigen::Infinity>());
    }
  out.commutant_dim = commutant_dimension(rep);
  return out;
}

namespace detail {

/** Monomial exponents (i,j,k), i+j+k = deg, ordered i desc then j desc. */
inline std::vector<std::array<int, 3>> monomials(int deg) {
  std::vector<std::array<int, 3>> out;
  for (int i = deg; i >= 0; --i)
    for (int j = deg - i; j >= 0; --j) out.push_back({i, j, deg - i - j});
  return out;
}

/** Rotation generator on degree-deg monomials: G_a f = -(E_a x) . grad f. */
inline Mat rot_generator_monomial(int deg, int axis) {
  auto mons = monomials(deg);
  std::map<std::array<int, 3>, int> idx;
  for (size_t t = 0; t < mons.size(); ++t) idx[mons[t]] = static_cast<int>(t);
  const int N = static_cast<int>(mons.size());
  Mat D = Mat::Zero(N, N);
  for (int t = 0; t < N; ++t) {
    auto [i, j, k] = mons[t];
    if (axis == 0) {  // z d_y - y d_z
      if (j > 0) D(idx[{i, j - 1, k + 1}], t) += j;
      if (k > 0) D(idx[{i, j + 1, k - 1}], t) -= k;
    } else if (axis == 1) {  // -z d_x + x d_z
      if (i > 0) D(idx[{i - 1, j, k + 1}], t) -= i;
      if (k > 0) D(idx[{i + 1, j, k - 1}], t) += k;
    } else {  // y d_x - x d_y
      if (i > 0) D(idx[{i - 1, j + 1, k}], t) += i;
      if (j > 0) D(idx[{i + 1, j - 1, k}], t) -= j;
    }
  }
  return D;
}

/**
 * Deterministic null-space basis of A via reduced row echelon form: one basis
 * vector per free column, pivots back-substituted (the classical RREF kernel).
 */
inline Mat rref_nullspace(Mat A) {
  const int rows = static_cast<int>(A.rows());
  const int cols = static_cast<int>(A.cols());
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int best = -1;
    double mag = 1e-12;
    for (int i = r; i < rows; ++i)
      if (std::abs(A(i, c)) > mag) { mag = std::abs(A(i, c)); best = i; }
    if (best < 0) continue;
    A.row(r).swap(A.row(best));
    A.row(r) /= A(r, c);
    for (int i = 0; i < rows; ++i)
      if (i != r && A(i, c) != 0) A.row(i) -= A(i, c) * A.row(r);
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<int> free_cols;
  {
    size_t p = 0;
    for (int c = 0; c < cols; ++c) {
      if (p < pivot_col.size() && pivot_col[p] == c) { ++p; continue; }
      free_cols.push_back(c);
    }
  }
  Mat K = Mat::Zero(cols, static_cast<int>(free_cols.size()));
  for (size_t f = 0; f < free_cols.size(); ++f) {
    K(free_cols[f], static_cast<int>(f)) = 1;
    for (size_t p = 0; p < pivot_col.size(); ++p)
      K(pivot_col[p], static_cast<int>(f)) = -A(static_cast<int>(p), free_cols[f]);
  }
  return K;
}

}  // namespace detail

/**
 * The real irreducible so3-representation on R^n (n = 2l+1 odd), realized on
 * harmonic homogeneous polynomials of degree l with the apolar inner product
 * (monomial weights i!j!k!), orthonormalized by Gram-Schmidt in the fixed
 * monomial order. Deterministic: no randomness, no eigen-solver ordering.
 */
inline RepresentationData so3_irrep(int n) {
  if (n < 3 || n % 2 == 0)
    throw invalid_input("so3_irrep: n must be odd and >= 3, got " +
                        std::to_string(n));
  const int ell = (n - 1) / 2;
  auto mons = detail::monomials(ell);
  const int N = static_cast<int>(mons.size());

  // Harmonic subspace = kernel of the Laplacian into degree l-2 monomials.
  Mat K;
  if (ell < 2) {
    K = Mat::Identity(N, N);
  } else {
    auto mons2 = detail::monomials(ell - 2);
    std::map<std::array<int, 3>, int> idx2;
    for (size_t t = 0; t < mons2.size(); ++t) idx2[mons2[t]] = static_cast<int>(t);
    Mat L = Mat::Zero(static_cast<int>(mons2.size()), N);
    for (int t = 0; t < N; ++t) {
      auto [i, j, k] = mons[t];
      if (i >= 2) L(idx2[{i - 2, j, k}], t) += i * (i - 1);
      if (j >= 2) L(idx2[{i, j - 2, k}], t) += j * (j - 1);
      if (k >= 2) L(idx2[{i, j, k - 2}], t) += k * (k - 1);
    }
    K = detail::rref_nullspace(L);
  }
  if (K.cols() != n)
    throw invalid_input("so3_irrep: harmonic space dimension mismatch");

  Vec w(N);
  for (int t = 0; t < N; ++t) {
    auto [i, j, k] = mons[t];
    w(t) = std::tgamma(i + 1.0) * std::tgamma(j + 1.0) * std::tgamma(k + 1.0);
  }

  // Gram-Schmidt of the kernel columns under the weighted inner product.
  Mat P(N, n);
  for (int c = 0; c < n; ++c) {
    Vec v = K.col(c);
    for (int q = 0; q < c; ++q)
      v -= (P.col(q).cwiseProduct(w)).dot(v) * P.col(q);
    v /= std::sqrt((v.cwiseProduct(w)).dot(v));
    P.col(c) = v;
  }

  RepresentationData rep;
  rep.k_algebra = so3_algebra();
  rep.n = n;
  Mat W = w.asDiagonal();
  for (int a = 0; a < 3; ++a) {
    Mat D = detail::rot_generator_monomial(ell, a);
    rep.generators.push_back(P.transpose() * W * D * P);
  }
  return rep;
}

/**
 * Semidirect product R^n x| k: basis ordered (R^n block, then k block);
 * R^n abelian, k per k_algebra, mixed [X, v] = G_X v.
 */
inline LieAlgebraData semidirect(const RepresentationData& rep) {
  auto chk = check_representation(rep);
  if (chk.skew > 1e-10 || chk.bracket_realization > 1e-8)
    throw invalid_input("semidirect: representation invariants violated");
  const int n = rep.n;
  const int dk = rep.k_algebra.dim;
  LieAlgebraData alg;
  alg.dim = n + dk;
  alg.c = Tensor3(alg.dim);
  for (int a = 0; a < dk; ++a) {
    for (int b = 0; b < dk; ++b)
      for (int cc = 0; cc < dk; ++cc)
        alg.c(n + a, n + b, n + cc) = rep.k_algebra.c(a, b, cc);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        alg.c(n + a, j, i) = rep.generators[a](i, j);
        alg.c(j, n + a, i) = -rep.generators[a](i, j);
      }
  }
  for (int j = 0; j < n; ++j) alg.labels.push_back("e" + std::to_string(j + 1));
  for (int a = 0; a < dk; ++a) alg.labels.push_back(rep.k_algebra.labels[a]);
  return alg;
}

/**
 * Smallest subspace containing `seed` and stable under bracketing with the
 * whole algebra (the iterated-bracket ideal generated by the seed).
 */
inline Subspace bracket_closure(const LieAlgebraData& alg, const Subspace& seed) {
  if (seed.ambient_dim() != alg.dim)
    throw dimension_mismatch("bracket_closure: ambient mismatch");
  Subspace cur = seed;
  for (int iter = 0; iter <= alg.dim; ++iter) {
    std::vector<Vec> gen;
    for (int j = 0; j < cur.dim(); ++j) gen.push_back(cur.basis().col(j));
    for (int i = 0; i < alg.dim; ++i)
      for (int j = 0; j < cur.dim(); ++j)
        gen.push_back(bracket(alg, Vec::Unit(alg.dim, i), Vec(cur.basis().col(j))));
    Subspace next = span_of(gen, cur.tol(), 1.0);
    if (next.dim() == cur.dim()) return next;
    cur = next;
  }
  return cur;
}

}  // namespace nullitylab

#endif
