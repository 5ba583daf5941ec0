#ifndef NULLITYLAB_GEOMETRY_HPP
#define NULLITYLAB_GEOMETRY_HPP

#include <unsupported/Eigen/MatrixFunctions>

#include "nullitylab/lie.hpp"

namespace nullitylab {

/**
 * Lie group with left-invariant metric, represented by its algebra and the
 * inner product at the identity. When the algebra is a semidirect product
 * R^n x| K the translation/rotation split and the representation generators
 * are kept so flows can integrate actual group elements; both are empty for
 * generic models, and every curvature/connection computation works without
 * them.
 */
struct HomogeneousModel {
  LieAlgebraData algebra;
  Mat metric;
  int translation_dim = 0;
  std::vector<Mat> rep_generators;
};

/** Throws invalid_input unless metric is symmetric positive definite and the
 * structure constants are antisymmetric with small Jacobi residual. */
inline void validate_model(const HomogeneousModel& model) {
  const int m = model.algebra.dim;
  if (model.metric.rows() != m || model.metric.cols() != m)
    throw invalid_input("model: metric shape does not match algebra dimension");
  if ((model.metric - model.metric.transpose()).lpNorm<Eigen::Infinity>() > 1e-12)
    throw invalid_input("model: metric not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(model.metric);
  if (es.eigenvalues().minCoeff() <= 0)
    throw invalid_input("model: metric not positive definite (min eigenvalue " +
                        std::to_string(es.eigenvalues().minCoeff()) + ")");
  if (antisymmetry_residual(model.algebra) > 1e-12)
    throw invalid_input("model: structure constants not antisymmetric");
  if (check_jacobi(model.algebra) > 1e-10)
    throw invalid_input("model: Jacobi identity violated");
}

/**
 * Bilinear connection map Lambda(x,y) = covariant derivative at e of the field
 * induced by y, in direction x. Stored as operators B[j]: x -> Lambda(x, e_j).
 */
struct ConnectionMap {
  std::vector<Mat> B;

  Vec lambda(const Vec& x, const Vec& y) const {
    Vec out = Vec::Zero(x.size());
    for (size_t j = 0; j < B.size(); ++j)
      if (y(static_cast<int>(j)) != 0) out += y(static_cast<int>(j)) * (B[j] * x);
    return out;
  }
  /** The operator x -> Lambda(x, y). */
  Mat op_of(const Vec& y) const {
    Mat out = Mat::Zero(B[0].rows(), B[0].cols());
    for (size_t j = 0; j < B.size(); ++j)
      if (y(static_cast<int>(j)) != 0) out += y(static_cast<int>(j)) * B[j];
    return out;
  }
  /** Scale of the operator family, used as rank floor downstream. */
  double scale() const {
    double s = 0;
    for (const Mat& Bj : B) s = std::max(s, Bj.lpNorm<Eigen::Infinity>());
    return s;
  }
};

/**
 * Connection on induced Killing fields via the Koszul identity. Induced
 * fields are right-invariant, so their vector-field bracket is MINUS the
 * structure bracket; in structure-constant terms:
 *   2 g(Lambda(x,y), z) = -<[x,y],z> - <[x,z],y> - <[y,z],x>.
 */
inline ConnectionMap killing_connection(const HomogeneousModel& model) {
  const int m = model.algebra.dim;
  const Mat& g = model.metric;
  Mat ginv = g.inverse();
  ConnectionMap conn;
  for (int j = 0; j < m; ++j) {
    Mat Bj(m, m);
    for (int i = 0; i < m; ++i) {
      Vec rhs(m);
      for (int l = 0; l < m; ++l)
        rhs(l) = -basis_bracket(model.algebra, i, j).dot(g.col(l)) -
                 basis_bracket(model.algebra, i, l).dot(g.col(j)) -
                 basis_bracket(model.algebra, j, l).dot(g.col(i));
      Bj.col(i) = 0.5 * (ginv * rhs);
    }
    conn.B.push_back(Bj);
  }
  return conn;
}

/**
 * Connection on left-invariant fields (independent derivation path; also the
 * form the flow equations use):
 *   2 g(Lambda(x,y), z) = <[x,y],z> - <[y,z],x> + <[z,x],y>.
 */
inline ConnectionMap left_connection(const HomogeneousModel& model) {
  const int m = model.algebra.dim;
  const Mat& g = model.metric;
  Mat ginv = g.inverse();
  ConnectionMap conn;
  for (int j = 0; j < m; ++j) {
    Mat Nj(m, m);
    for (int i = 0; i < m; ++i) {
      Vec rhs(m);
      for (int l = 0; l < m; ++l)
        rhs(l) = basis_bracket(model.algebra, i, j).dot(g.col(l)) -
                 basis_bracket(model.algebra, j, l).dot(g.col(i)) +
                 basis_bracket(model.algebra, l, i).dot(g.col(j));
      Nj.col(i) = 0.5 * (ginv * rhs);
    }
    conn.B.push_back(Nj);
  }
  return conn;
}

/** Initial conditions (value, covariant-derivative operator) of a Killing
 * field at the base point. */
struct KillingGerm {
  Vec value;
  Mat op;
};

inline KillingGerm killing_germ(const HomogeneousModel& model,
                                const ConnectionMap& conn, const Vec& x) {
  if (x.size() != model.algebra.dim)
    throw dimension_mismatch("killing_germ: vector length mismatch");
  return {x, conn.op_of(x)};
}

/** Metric-skewness defect g*op + op^T*g of a germ's operator. */
inline double germ_skew_residual(const HomogeneousModel& model,
                                 const KillingGerm& germ) {
  return (model.metric * germ.op + germ.op.transpose() * model.metric)
      .lpNorm<Eigen::Infinity>();
}

using CurvatureTensor = Tensor4;

/**
 * Curvature from Killing-field germs: the operator R(e_i, e_j) equals
 * Lambda(., -[e_i,e_j]) + [B_i, B_j] (the bracket of the two induced fields is
 * minus the structure bracket), lowered with the metric:
 * R(i,j,k,l) = <R(e_i,e_j) e_k, e_l>.
 */
inline CurvatureTensor curvature(const HomogeneousModel& model,
                                 const ConnectionMap& conn) {
  const int m = model.algebra.dim;
  CurvatureTensor R(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Vec w = -basis_bracket(model.algebra, i, j);
      Mat M = conn.op_of(w) + conn.B[i] * conn.B[j] - conn.B[j] * conn.B[i];
      Mat lowered = model.metric * M;  // lowered(l,k) = <M e_k, e_l>
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) R(i, j, k, l) = lowered(l, k);
    }
  return R;
}

inline CurvatureTensor curvature(const HomogeneousModel& model) {
  return curvature(model, killing_connection(model));
}

/**
 * Independent second path: curvature of the left-invariant frame via
 * R(X,Y) = Nabla_X Nabla_Y - Nabla_Y Nabla_X - Nabla_[X,Y] on left-invariant
 * fields, whose bracket IS the structure bracket.
 */
inline CurvatureTensor curvature_oracle(const HomogeneousModel& model) {
  const int m = model.algebra.dim;
  ConnectionMap N = left_connection(model);
  CurvatureTensor R(m);
  for (int i = 0; i < m; ++i) {
    Vec ei = Vec::Unit(m, i);
    for (int j = 0; j < m; ++j) {
      Vec ej = Vec::Unit(m, j);
      for (int k = 0; k < m; ++k) {
        Vec ek = Vec::Unit(m, k);
        Vec v = N.lambda(ei, N.lambda(ej, ek)) - N.lambda(ej, N.lambda(ei, ek)) -
                N.lambda(basis_bracket(model.algebra, i, j), ek);
        Vec low = model.metric * v;
        for (int l = 0; l < m; ++l) R(i, j, k, l) = low(l);
      }
    }
  }
  return R;
}

/** Curvature-symmetry defects, relative to the tensor's max entry. */
struct CurvatureSymmetryResiduals {
  double skew_first_pair = 0;
  double skew_second_pair = 0;
  double pair_symmetry = 0;
  double first_bianchi = 0;
};

inline CurvatureSymmetryResiduals curvature_symmetry_residuals(
    const CurvatureTensor& R) {
  const int m = R.dim();
  double scale = std::max(R.max_abs(), 1e-300);
  CurvatureSymmetryResiduals out;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          out.skew_first_pair =
              std::max(out.skew_first_pair, std::abs(R(i, j, k, l) + R(j, i, k, l)));
          out.skew_second_pair =
              std::max(out.skew_second_pair, std::abs(R(i, j, k, l) + R(i, j, l, k)));
          out.pair_symmetry =
              std::max(out.pair_symmetry, std::abs(R(i, j, k, l) - R(k, l, i, j)));
          out.first_bianchi = std::max(
              out.first_bianchi,
              std::abs(R(i, j, k, l) + R(j, k, i, l) + R(k, i, j, l)));
        }
  out.skew_first_pair /= scale;
  out.skew_second_pair /= scale;
  out.pair_symmetry /= scale;
  out.first_bianchi /= scale;
  return out;
}

/** Sectional curvature of the plane spanned by x, y. */
inline double sectional(const HomogeneousModel& model, const CurvatureTensor& R,
                        const Vec& x, const Vec& y) {
  const int m = R.dim();
  double num = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          num += x(i) * y(j) * y(k) * x(l) * R(i, j, k, l);
  double xx = x.dot(model.metric * x), yy = y.dot(model.metric * y),
         xy = x.dot(model.metric * y);
  return num / (xx * yy - xy * xy);
}

/** The endomorphism R(v, v'): z -> R(v,v') z, raised with the metric. */
inline Mat curvature_endomorphism(const HomogeneousModel& model,
                                  const CurvatureTensor& R, const Vec& v,
                                  const Vec& vp) {
  const int m = R.dim();
  Mat A = Mat::Zero(m, m);  // A(k,l) = <R(v,v') e_k, e_l>
  for (int i = 0; i < m; ++i) {
    if (v(i) == 0) continue;
    for (int j = 0; j < m; ++j) {
      if (vp(j) == 0) continue;
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) A(k, l) += v(i) * vp(j) * R(i, j, k, l);
    }
  }
  return model.metric.inverse() * A.transpose();
}

/**
 * Bracket on initial conditions:
 *   [(v,B), (v',B')] = (B'v - Bv', R_{v,v'} - [B,B']).
 * For germs of induced fields it reproduces the germ of minus the structure
 * bracket (right-invariant identification).
 */
inline KillingGerm germ_bracket(const HomogeneousModel& model,
                                const CurvatureTensor& R, const KillingGerm& g1,
                                const KillingGerm& g2) {
  KillingGerm out;
  out.value = g2.op * g1.value - g1.op * g2.value;
  out.op = curvature_endomorphism(model, R, g1.value, g2.value) -
           (g1.op * g2.op - g2.op * g1.op);
  return out;
}

/**
 * Covariant derivative of the curvature tensor at e, computed on the
 * left-invariant frame: the frame components of R are constant, leaving the
 * four connection-correction terms. Returned as one 4-tensor per derivative
 * direction e_m.
 */
inline std::vector<CurvatureTensor> nabla_curvature(const HomogeneousModel& model,
                                                    const CurvatureTensor& R) {
  const int m = model.algebra.dim;
  ConnectionMap N = left_connection(model);
  std::vector<CurvatureTensor> out;
  out.reserve(m);
  for (int d = 0; d < m; ++d) {
    // corr(i, a) = a-th component of Nabla_{e_d} of frame field i.
    Mat corr(m, m);
    Vec ed = Vec::Unit(m, d);
    for (int i = 0; i < m; ++i) corr.row(i) = N.lambda(ed, Vec::Unit(m, i));
    CurvatureTensor nR(m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            double s = 0;
            for (int a = 0; a < m; ++a)
              s -= corr(i, a) * R(a, j, k, l) + corr(j, a) * R(i, a, k, l) +
                   corr(k, a) * R(i, j, a, l) + corr(l, a) * R(i, j, k, a);
            nR(i, j, k, l) = s;
          }
    out.push_back(std::move(nR));
  }
  return out;
}

/** Contraction of nabla R with direction v in the derivative slot. */
inline CurvatureTensor directional_nabla(const std::vector<CurvatureTensor>& nR,
                                         const Vec& v) {
  const int m = static_cast<int>(nR.size());
  CurvatureTensor out(m);
  for (int d = 0; d < m; ++d) {
    if (v(d) == 0) continue;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) out(i, j, k, l) += v(d) * nR[d](i, j, k, l);
  }
  return out;
}

/**
 * Derivation action of a metric-skew operator B on the lowered curvature:
 * (B.R)(x,y,z,w) = -R(Bx,y,z,w) - R(x,By,z,w) - R(x,y,Bz,w) - R(x,y,z,Bw).
 * Returns the max-norm of the result; ~0 certifies e^{tB} stabilizes R.
 */
inline double curvature_stabilizer_check(const CurvatureTensor& R, const Mat& B) {
  const int m = R.dim();
  double worst = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          double s = 0;
          for (int a = 0; a < m; ++a)
            s -= B(a, i) * R(a, j, k, l) + B(a, j) * R(i, a, k, l) +
                 B(a, k) * R(i, j, a, l) + B(a, l) * R(i, j, k, a);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

/** Flatten a germ into R^{m + m^2} (value, then op column-major). */
inline Vec germ_to_vec(const KillingGerm& g) {
  const int m = static_cast<int>(g.value.size());
  Vec out(m + m * m);
  out.head(m) = g.value;
  out.tail(m * m) = Eigen::Map<const Vec>(g.op.data(), m * m);
  return out;
}

inline KillingGerm vec_to_germ(const Vec& v, int m) {
  KillingGerm g;
  g.value = v.head(m);
  g.op = Eigen::Map<const Mat>(v.tail(m * m).data(), m, m);
  return g;
}

/**
 * The germ-space map (u, C) -> (e^{-tB} u, e^{-tB} C e^{tB}) induced by the
 * flow of a Killing field with germ operator B.
 */
struct HtMap {
  Mat E;     // e^{-tB}
  Mat Einv;  // e^{tB}

  KillingGerm apply(const KillingGerm& g) const {
    return {E * g.value, E * g.op * Einv};
  }
};

inline HtMap h_t_map(const Mat& B, double t) {
  Mat A = -t * B;
  return {A.exp(), (-A).exp()};
}

/** Residuals of the h_t automorphism checks for one Killing direction. */
struct HtReport {
  bool precondition_ok = false;
  double geodesic_residual = 0;   // ||Lambda(x,x)||
  double nullity_residual = 0;    // distance of x from the nullity subspace
  double subspace_residual = 0;   // h_t(g-germs) inside g-germs
  double automorphism_residual = 0;
  double isotropy_residual = 0;   // germs with zero value stay value-zero
};

/**
 * Checks Lemma-style automorphism properties of h_t over the sampled times:
 * h_t preserves the span of the induced germs, commutes with the germ
 * bracket, and maps isotropy germs (value 0) to isotropy germs. The caller
 * supplies the nullity subspace for the precondition x in nullity.
 */
inline HtReport verify_h_t_automorphism(const HomogeneousModel& model,
                                        const Vec& x, const Subspace& nullity,
                                        const std::vector<double>& t_samples) {
  const int m = model.algebra.dim;
  ConnectionMap conn = killing_connection(model);
  CurvatureTensor R = curvature(model, conn);
  HtReport rep;
  rep.geodesic_residual = conn.lambda(x, x).norm();
  rep.nullity_residual = (x - nullity.project(x)).norm();
  rep.precondition_ok =
      rep.geodesic_residual <= report_tol &&
      rep.nullity_residual <= report_tol * std::max(1.0, x.norm());
  if (!rep.precondition_ok) return rep;

  Mat B = conn.op_of(x);
  std::vector<KillingGerm> basis_germs;
  std::vector<Vec> germ_vecs;
  for (int i = 0; i < m; ++i) {
    basis_germs.push_back(killing_germ(model, conn, Vec::Unit(m, i)));
    germ_vecs.push_back(germ_to_vec(basis_germs.back()));
  }
  Subspace gspan = span_of(germ_vecs, default_tol(), 1.0);

  for (double t : t_samples) {
    HtMap ht = h_t_map(B, t);
    std::vector<KillingGerm> mapped;
    for (const auto& g : basis_germs) {
      mapped.push_back(ht.apply(g));
      Vec w = germ_to_vec(mapped.back());
      rep.subspace_residual =
          std::max(rep.subspace_residual,
                   (w - gspan.project(w)).norm() / std::max(1.0, w.norm()));
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        KillingGerm lhs = germ_bracket(model, R, mapped[i], mapped[j]);
        KillingGerm rhs = ht.apply(germ_bracket(model, R, basis_germs[i], basis_germs[j]));
        rep.automorphism_residual =
            std::max({rep.automorphism_residual, (lhs.value - rhs.value).norm(),
                      (lhs.op - rhs.op).lpNorm<Eigen::Infinity>()});
      }
    // Isotropy germs: value-zero germs in the induced span are (0, C); the
    // mapped value is e^{-tB} * 0 = 0 identically, so the residual is the
    // value part of h_t applied to any zero-value skew operator.
    KillingGerm iso{Vec::Zero(m), B};
    rep.isotropy_residual =
        std::max(rep.isotropy_residual, ht.apply(iso).value.norm());
  }
  return rep;
}

}  // namespace nullitylab

#endif
