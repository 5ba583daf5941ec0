#ifndef NULLITYLAB_FACTORY_HPP
#define NULLITYLAB_FACTORY_HPP

#include "nullitylab/analysis.hpp"

namespace nullitylab {

/** Flat model: abelian algebra with the given SPD metric (identity default). */
inline HomogeneousModel flat_abelian_model(int dim) {
  HomogeneousModel model;
  model.algebra = abelian_algebra(dim);
  model.metric = Mat::Identity(dim, dim);
  model.translation_dim = dim;  // R^n with trivial rotation part
  return model;
}

/** so3 with the bi-invariant metric (identity in the standard basis). */
inline HomogeneousModel so3_biinvariant_model() {
  HomogeneousModel model;
  model.algebra = so3_algebra();
  model.metric = Mat::Identity(3, 3);
  return model;
}

/**
 * Data of the deterministic construction frame: the bracket filtration of V0,
 * its minimal depth, the chosen pair (w, v) with [w,v] escaping the top proper
 * filtration step, the projection v' of that bracket, the companion direction
 * z, the scalar lambda from the Killing-bracket decomposition [v,z] = lambda
 * v' + u, and the metric couplings (a, b).
 */
struct ConstructionFrame {
  std::vector<Subspace> V_filtration;  // V_0 .. V_d, ambient R^n
  int d = 0;
  Vec w;        // k coordinates
  Vec v;        // R^n coordinates, in V_{d-1}
  Vec z;        // k coordinates, k_inner-unit, k_inner-orthogonal to w
  Vec v_prime;  // R^n coordinates, in V_{d-1}^perp
  double lambda = 0;
  double a = 0, b = 0;
};

/** Ascending bracket filtration V_{i+1} = V_i + [k, V_i] up to R^n. */
inline std::pair<std::vector<Subspace>, int> filtration(
    const RepresentationData& rep, const Subspace& V0) {
  const int n = rep.n;
  if (V0.ambient_dim() != n)
    throw dimension_mismatch("filtration: V0 ambient mismatch");
  if (V0.dim() == 0) throw invalid_input("filtration: V0 must be nonzero");
  std::vector<Subspace> chain{V0};
  while (chain.back().dim() < n) {
    const Subspace& cur = chain.back();
    std::vector<Vec> gen;
    for (int t = 0; t < cur.dim(); ++t) {
      gen.push_back(cur.basis().col(t));
      for (const Mat& G : rep.generators) gen.push_back(G * cur.basis().col(t));
    }
    Subspace next = span_of(gen, V0.tol(), 1.0);
    if (next.dim() == cur.dim())
      throw invalid_input("filtration: chain stabilized below R^n "
                          "(representation not irreducible)");
    chain.push_back(next);
  }
  return {chain, static_cast<int>(chain.size()) - 1};
}

/**
 * Deterministic frame choice: scan k-basis x V_{d-1}-basis in index order and
 * keep the first pair whose bracket has maximal projection onto V_{d-1}^perp;
 * z is the first k-basis direction orthogonalized against w under k_inner.
 * Brackets entering v' and lambda are Killing brackets (minus the structure
 * bracket), matching the connection convention used by the genericity
 * certificate.
 */
inline ConstructionFrame choose_frame(const RepresentationData& rep,
                                      const std::vector<Subspace>& chain, int d,
                                      const Mat& k_inner) {
  if (d < 2) throw invalid_input("choose_frame: depth must be >= 2");
  const int n = rep.n;
  const int dk = rep.k_algebra.dim;
  if (dk < 2) throw invalid_input("choose_frame: need dim k >= 2 for z");
  const Subspace& top = chain[d - 1];
  Mat Pperp = Mat::Identity(n, n) - top.basis() * top.basis().transpose();

  ConstructionFrame frame;
  frame.V_filtration = chain;
  frame.d = d;
  double best = -1;
  for (int a = 0; a < dk; ++a)
    for (int q = 0; q < top.dim(); ++q) {
      Vec vp = Pperp * (-(rep.generators[a] * top.basis().col(q)));
      if (vp.norm() > best + 1e-12) {
        best = vp.norm();
        frame.w = Vec::Unit(dk, a);
        frame.v = top.basis().col(q);
        frame.v_prime = vp;
      }
    }
  if (best <= 1e-12)
    throw invalid_input("choose_frame: no (w,v) with [w,v] outside V_{d-1} "
                        "(contradicts minimality of d)");

  double wn = std::sqrt(frame.w.dot(k_inner * frame.w));
  Vec wu = frame.w / wn;
  for (int q = 0; q < dk; ++q) {
    Vec cand = Vec::Unit(dk, q);
    cand -= wu.dot(k_inner * cand) * wu;
    if (cand.norm() > 1e-9) {
      frame.z = cand / std::sqrt(cand.dot(k_inner * cand));
      break;
    }
  }
  Mat Gz = Mat::Zero(n, n);
  for (int a = 0; a < dk; ++a) Gz += frame.z(a) * rep.generators[a];
  // Killing bracket [v, z] = G_z v.
  frame.lambda = (Gz * frame.v).dot(frame.v_prime) / frame.v_prime.squaredNorm();
  return frame;
}

/**
 * Metric assembly: canonical on R^n, k_inner on k, cross coupling only
 * through v' with <v',w> = a, <v',z> = b and v' orthogonal to the k_inner
 * complement of span{w,z}.
 */
inline HomogeneousModel build_metric(const RepresentationData& rep,
                                     ConstructionFrame& frame, double a, double b,
                                     const Mat& k_inner) {
  const int n = rep.n;
  const int dk = rep.k_algebra.dim;
  frame.a = a;
  frame.b = b;
  // Third row: k_inner-complement of span{w,z} (k ~ su(2), so one direction).
  Vec y;
  double wn = std::sqrt(frame.w.dot(k_inner * frame.w));
  Vec wu = frame.w / wn;
  for (int q = 0; q < dk; ++q) {
    Vec cand = Vec::Unit(dk, q);
    cand -= wu.dot(k_inner * cand) * wu;
    cand -= frame.z.dot(k_inner * cand) * frame.z;
    if (cand.norm() > 1e-9) {
      y = cand / cand.norm();
      break;
    }
  }
  Mat rows(3, dk);
  rows.row(0) = frame.w.transpose();
  rows.row(1) = frame.z.transpose();
  rows.row(2) = y.transpose();
  Vec rhs(3);
  rhs << a, b, 0;
  rhs /= frame.v_prime.squaredNorm();
  Vec r = rows.fullPivLu().solve(rhs);

  HomogeneousModel model;
  model.algebra = semidirect(rep);
  model.translation_dim = n;
  model.rep_generators = rep.generators;
  const int m = n + dk;
  model.metric = Mat::Zero(m, m);
  model.metric.topLeftCorner(n, n) = Mat::Identity(n, n);
  model.metric.bottomRightCorner(dk, dk) = k_inner;
  Mat X = frame.v_prime * r.transpose();
  model.metric.topRightCorner(n, dk) = X;
  model.metric.bottomLeftCorner(dk, n) = X.transpose();

  Eigen::SelfAdjointEigenSolver<Mat> es(model.metric);
  if (es.eigenvalues().minCoeff() <= 0)
    throw invalid_input("build_metric: couplings too large, metric not positive "
                        "definite (min eigenvalue " +
                        std::to_string(es.eigenvalues().minCoeff()) + ")");
  return model;
}

/** Genericity certificate: the connection pairing 2<Nabla_w v, z> computed
 * from the Koszul solve must equal b + lambda*a and be nonzero. */
struct GenericityCertificate {
  double lambda = 0;
  double b_plus_lambda_a = 0;
  double nabla_pairing = 0;
  double cross_residual = 0;
  bool pass = false;
};

inline GenericityCertificate genericity_certificate(const HomogeneousModel& model,
                                                    const ConstructionFrame& frame) {
  const int n = model.translation_dim;
  const int m = model.algebra.dim;
  ConnectionMap conn = killing_connection(model);
  Vec wf = Vec::Zero(m), vf = Vec::Zero(m), zf = Vec::Zero(m);
  wf.tail(m - n) = frame.w;
  vf.head(n) = frame.v;
  zf.tail(m - n) = frame.z;
  GenericityCertificate cert;
  cert.lambda = frame.lambda;
  cert.b_plus_lambda_a = frame.b + frame.lambda * frame.a;
  cert.nabla_pairing = 2 * (model.metric * conn.lambda(wf, vf)).dot(zf);
  cert.cross_residual = std::abs(cert.nabla_pairing - cert.b_plus_lambda_a);
  cert.pass = std::abs(cert.b_plus_lambda_a) >
              1e-6 * std::max({std::abs(frame.a), std::abs(frame.b), 1.0});
  return cert;
}

struct ConstructedExample {
  RepresentationData rep;
  HomogeneousModel model;
  ConstructionFrame frame;
  GenericityCertificate certificate;
  NullityReport report;
};

/**
 * End-to-end pipeline: irreducible representation, bracket filtration of the
 * default V0 (leading canonical basis vectors), deterministic frame, metric,
 * genericity certificate, and the full structure verification. The
 * prescribed-nullity flags (v0_in_nullity, and the informational
 * vdm2_in_nullity) are recorded in the report.
 */
inline ConstructedExample construct_example(int n, int V0_dim, double a, double b,
                                            const Mat& k_inner_opt = Mat()) {
  if (n < 3 || n % 2 == 0)
    throw invalid_input("construct_example: n must be odd and >= 3");
  if (V0_dim < 1 || V0_dim * 4 >= n)
    throw invalid_input("construct_example: hypothesis violated, need "
                        "V0_dim*(1+3) < n but " +
                        std::to_string(V0_dim) + "*4 >= " + std::to_string(n));
  ConstructedExample ex;
  ex.rep = so3_irrep(n);
  Mat k_inner = k_inner_opt.size() ? k_inner_opt
                                   : Mat(Mat::Identity(ex.rep.k_algebra.dim,
                                                       ex.rep.k_algebra.dim));
  Subspace V0 = span_of(Mat(Mat::Identity(n, n).leftCols(V0_dim)));
  auto [chain, d] = filtration(ex.rep, V0);
  ex.frame = choose_frame(ex.rep, chain, d, k_inner);
  ex.model = build_metric(ex.rep, ex.frame, a, b, k_inner);
  ex.certificate = genericity_certificate(ex.model, ex.frame);
  ex.report = verify_structure(ex.model);
  ex.report.dims["d"] = d;
  ex.report.dims["V0"] = V0.dim();

  ConnectionMap conn = killing_connection(ex.model);
  CurvatureTensor R = curvature(ex.model, conn);
  Subspace nu = nullity(ex.model, R);
  const int m = ex.model.algebra.dim;
  auto embed = [&](const Subspace& s) {
    Mat M = Mat::Zero(m, s.dim());
    M.topRows(n) = s.basis();
    return M;
  };
  double v0_res = nu.containment_residual(embed(V0));
  ex.report.residuals["v0_in_nullity"] = v0_res;
  ex.report.flags["v0_in_nullity"] = v0_res <= report_tol ? Flag::pass : Flag::fail;
  double vdm2_res = nu.containment_residual(embed(chain[d - 2]));
  ex.report.residuals["vdm2_in_nullity"] = vdm2_res;
  ex.report.flags["vdm2_in_nullity"] =
      vdm2_res <= report_tol ? Flag::pass : Flag::fail;
  ex.report.residuals["genericity"] = ex.certificate.cross_residual;
  ex.report.flags["genericity"] =
      ex.certificate.pass && ex.certificate.cross_residual <= 1e-9 ? Flag::pass
                                                                  : Flag::fail;
  return ex;
}

/**
 * Pass/fail gate for a constructed example: the structure suite plus the
 * prescribed-nullity and genericity certificates. The vdm2_in_nullity flag is
 * informational only (see README on the depth condition) and does not gate.
 */
inline bool construction_passes(const NullityReport& rep) {
  for (const auto& [key, flag] : rep.flags) {
    if (key == "vdm2_in_nullity") continue;
    if (flag == Flag::fail) return false;
  }
  return true;
}

struct SweepRow {
  int n = 0, v0_dim = 0;
  double a = 0, b = 0;
  bool admissible = false;
  int d = -1, dim_nu = -1, dim_nu1 = -1, dim_nu2 = -1, dim_U = -1;
  bool genericity = false, structure_pass = false;
};

/** One row per grid combination, deterministic order; failures recorded. */
inline std::vector<SweepRow> sweep(const std::vector<int>& n_list,
                                   const std::vector<int>& v0_dim_list,
                                   const std::vector<double>& a_grid,
                                   const std::vector<double>& b_grid) {
  std::vector<SweepRow> rows;
  for (int n : n_list)
    for (int v0_dim : v0_dim_list)
      for (double a : a_grid)
        for (double b : b_grid) {
          SweepRow row;
          row.n = n;
          row.v0_dim = v0_dim;
          row.a = a;
          row.b = b;
          row.admissible = n >= 3 && n % 2 == 1 && v0_dim >= 1 && v0_dim * 4 < n;
          if (row.admissible) {
            ConstructedExample ex = construct_example(n, v0_dim, a, b);
            row.d = ex.report.dims.at("d");
            row.dim_nu = ex.report.dims.at("nu");
            row.dim_nu1 = ex.report.dims.count("nu1") ? ex.report.dims.at("nu1") : -1;
            row.dim_nu2 = ex.report.dims.count("nu2") ? ex.report.dims.at("nu2") : -1;
            row.dim_U = ex.report.dims.count("U_e") ? ex.report.dims.at("U_e") : -1;
            row.genericity = ex.report.flags.at("genericity") == Flag::pass;
            row.structure_pass = construction_passes(ex.report);
          }
          rows.push_back(row);
        }
  return rows;
}

}  // namespace nullitylab

#endif
