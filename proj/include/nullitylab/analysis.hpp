#ifndef NULLITYLAB_ANALYSIS_HPP
#define NULLITYLAB_ANALYSIS_HPP

#include <map>

#include "nullitylab/geometry.hpp"

namespace nullitylab {

enum class Flag { pass, fail, na };

inline const char* to_string(Flag f) {
  switch (f) {
    case Flag::pass: return "pass";
    case Flag::fail: return "fail";
    default: return "n/a";
  }
}

/** Aggregated structure-verification result for one model. */
struct NullityReport {
  std::string branch;  // "nontrivial", "trivial_zero", "trivial_flat", "trivial_parallel"
  std::map<std::string, int> dims;
  std::map<std::string, Flag> flags;
  std::map<std::string, double> residuals;

  bool all_pass() const {
    for (const auto& [k, f] : flags)
      if (f == Flag::fail) return false;
    return true;
  }
};

/** Nullity subspace: kernel of v -> (R(v, e_j, e_k, .))_{jk}. */
inline Subspace nullity(const HomogeneousModel& model, const CurvatureTensor& R,
                        double tol = default_tol()) {
  const int m = model.algebra.dim;
  Mat stacked(m * m * m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          stacked(((j * m) + k) * m + l, i) = R(i, j, k, l);
  return kernel_of(stacked, tol, std::max(R.max_abs(), 1.0));
}

/** Adapted subspace: span of Lambda(v, Z) over v in nullity, Z in the algebra. */
inline Subspace adapted_nullity(const HomogeneousModel& model,
                                const ConnectionMap& conn, const Subspace& nu) {
  const int m = model.algebra.dim;
  if (nu.dim() == 0) return Subspace::zero(m, nu.tol());
  std::vector<Vec> gen;
  for (int j = 0; j < m; ++j)
    for (int t = 0; t < nu.dim(); ++t) gen.push_back(conn.B[j] * nu.basis().col(t));
  return span_of(gen, nu.tol(), std::max(conn.scale(), 1.0));
}

/** First and second osculating subspaces of the nullity. */
inline std::pair<Subspace, Subspace> osculating(const HomogeneousModel& model,
                                                const ConnectionMap& conn,
                                                const Subspace& nu) {
  const int m = model.algebra.dim;
  Subspace nuhat = adapted_nullity(model, conn, nu);
  Subspace nu1 = sum(nu, nuhat);
  std::vector<Vec> gen;
  for (int j = 0; j < nu1.dim(); ++j) gen.push_back(nu1.basis().col(j));
  for (int j = 0; j < m; ++j)
    for (int t = 0; t < nuhat.dim(); ++t)
      gen.push_back(conn.B[j] * nuhat.basis().col(t));
  Subspace nu2 = gen.empty() ? Subspace::zero(m, nu.tol())
                             : span_of(gen, nu.tol(), std::max(conn.scale(), 1.0));
  return {nu1, nu2};
}

/**
 * Bounded algebras as kernels of linear systems on algebra elements Z:
 *   u   : Lambda(v, Z) in nullity for all nullity v,
 *   u0  : Lambda(v, Z) = 0        for all nullity v,
 *   u00 : Lambda(v, Z) = 0        for all v in the first osculating space.
 */
struct BoundedAlgebras {
  Subspace u, u0, u00;
};

inline BoundedAlgebras bounded_algebras(const HomogeneousModel& model,
                                        const ConnectionMap& conn,
                                        const Subspace& nu, const Subspace& nu1) {
  const int m = model.algebra.dim;
  double scale = std::max(conn.scale(), 1.0);
  auto system_for = [&](const Subspace& dirs, bool mod_nullity) {
    Mat sys(dirs.dim() * m, m);
    Mat P = Mat::Identity(m, m);
    if (mod_nullity && nu.dim() > 0)
      P -= nu.basis() * nu.basis().transpose();
    for (int t = 0; t < dirs.dim(); ++t) {
      Vec v = dirs.basis().col(t);
      for (int j = 0; j < m; ++j)
        sys.block(t * m, j, m, 1) = mod_nullity ? Vec(P * (conn.B[j] * v))
                                                : Vec(conn.B[j] * v);
    }
    return kernel_of(sys, nu.tol(), scale);
  };
  BoundedAlgebras out;
  out.u = nu.dim() == 0 ? Subspace::full(m, nu.tol()) : system_for(nu, true);
  out.u0 = nu.dim() == 0 ? Subspace::full(m, nu.tol()) : system_for(nu, false);
  out.u00 = nu1.dim() == 0 ? Subspace::full(m, nu.tol()) : system_for(nu1, false);
  return out;
}

/**
 * Transvection spaces: elements with vanishing germ operator whose value lies
 * in the nullity (tr0) resp. the first osculating space (tr).
 */
struct TransvectionSpaces {
  Subspace tr0, tr;
};

inline Subspace transvections_in(const HomogeneousModel& model,
                                 const ConnectionMap& conn,
                                 const Subspace& space) {
  const int m = model.algebra.dim;
  if (space.dim() == 0) return Subspace::zero(m, space.tol());
  Mat opmap(m * m, space.dim());
  for (int t = 0; t < space.dim(); ++t) {
    Mat B = conn.op_of(Vec(space.basis().col(t)));
    opmap.col(t) = Eigen::Map<Vec>(B.data(), m * m);
  }
  Subspace coeff = kernel_of(opmap, space.tol(), std::max(conn.scale(), 1.0));
  if (coeff.dim() == 0) return Subspace::zero(m, space.tol());
  return span_of(Mat(space.basis() * coeff.basis()), space.tol(), 1.0);
}

inline TransvectionSpaces transvection_spaces(const HomogeneousModel& model,
                                              const ConnectionMap& conn,
                                              const Subspace& nu,
                                              const Subspace& nu1) {
  return {transvections_in(model, conn, nu), transvections_in(model, conn, nu1)};
}

/**
 * Enlarged germ algebra: span of the induced germs plus the pure-value germs
 * (v, 0) for v in the nullity, inside the germ space R^{m+m^2}.
 */
struct EnlargedAlgebra {
  Subspace span;                    // subspace of germ space
  std::vector<KillingGerm> generators;
  double closure_residual = 0;
};

inline EnlargedAlgebra enlarged_algebra(const HomogeneousModel& model,
                                        const ConnectionMap& conn,
                                        const CurvatureTensor& R,
                                        const Subspace& nu) {
  const int m = model.algebra.dim;
  EnlargedAlgebra out;
  std::vector<Vec> vecs;
  for (int i = 0; i < m; ++i) {
    out.generators.push_back(killing_germ(model, conn, Vec::Unit(m, i)));
    vecs.push_back(germ_to_vec(out.generators.back()));
  }
  for (int t = 0; t < nu.dim(); ++t) {
    out.generators.push_back({nu.basis().col(t), Mat::Zero(m, m)});
    vecs.push_back(germ_to_vec(out.generators.back()));
  }
  out.span = span_of(vecs, nu.tol(), 1.0);
  for (const auto& g1 : out.generators)
    for (const auto& g2 : out.generators) {
      Vec w = germ_to_vec(germ_bracket(model, R, g1, g2));
      out.closure_residual = std::max(
          out.closure_residual,
          (w - out.span.project(w)).norm() / std::max(1.0, w.norm()));
    }
  return out;
}

/**
 * Abelian ideal generated by the nullity germs inside the enlarged algebra:
 * bracket closure of {(v,0) : v in nullity} under the enlarged generators.
 */
struct AbelianIdeal {
  Subspace span;          // subspace of germ space
  Subspace value_span;    // values of the ideal's germs
  double abelian_residual = 0;
  double ideal_residual = 0;
};

inline AbelianIdeal abelian_ideal(const HomogeneousModel& model,
                                  const CurvatureTensor& R,
                                  const EnlargedAlgebra& gp, const Subspace& nu) {
  const int m = model.algebra.dim;
  AbelianIdeal out;
  std::vector<Vec> cur;
  for (int t = 0; t < nu.dim(); ++t)
    cur.push_back(germ_to_vec({nu.basis().col(t), Mat::Zero(m, m)}));
  if (cur.empty()) {
    out.span = Subspace::zero(m + m * m, nu.tol());
    out.value_span = Subspace::zero(m, nu.tol());
    return out;
  }
  Subspace A = span_of(cur, nu.tol(), 1.0);
  for (int iter = 0; iter <= m + 1; ++iter) {
    std::vector<Vec> next;
    for (int t = 0; t < A.dim(); ++t) next.push_back(A.basis().col(t));
    for (const auto& g1 : gp.generators)
      for (int t = 0; t < A.dim(); ++t) {
        KillingGerm a = vec_to_germ(Vec(A.basis().col(t)), m);
        next.push_back(germ_to_vec(germ_bracket(model, R, g1, a)));
      }
    Subspace A2 = span_of(next, nu.tol(), 1.0);
    if (A2.dim() == A.dim()) { A = A2; break; }
    A = A2;
  }
  out.span = A;
  for (int t = 0; t < A.dim(); ++t)
    for (int s = 0; s < A.dim(); ++s) {
      KillingGerm a = vec_to_germ(Vec(A.basis().col(t)), m);
      KillingGerm b = vec_to_germ(Vec(A.basis().col(s)), m);
      out.abelian_residual = std::max(
          out.abelian_residual, germ_to_vec(germ_bracket(model, R, a, b)).norm());
    }
  for (const auto& g1 : gp.generators)
    for (int t = 0; t < A.dim(); ++t) {
      KillingGerm a = vec_to_germ(Vec(A.basis().col(t)), m);
      Vec w = germ_to_vec(germ_bracket(model, R, g1, a));
      out.ideal_residual = std::max(
          out.ideal_residual, (w - A.project(w)).norm() / std::max(1.0, w.norm()));
    }
  std::vector<Vec> vals;
  for (int t = 0; t < A.dim(); ++t) vals.push_back(A.basis().col(t).head(m));
  out.value_span = span_of(vals, nu.tol(), 1.0);
  return out;
}

/**
 * Full structure verification: nullity hierarchy, chain strictness, bounded
 * algebras, transvection spaces, the enlarged algebra with its abelian ideal,
 * and the curvature-contraction identities. Models with trivial nullity
 * (zero, flat, or parallel) are routed to a branch where the theorem flags
 * are n/a.
 */
inline NullityReport verify_structure(const HomogeneousModel& model) {
  const int m = model.algebra.dim;
  ConnectionMap conn = killing_connection(model);
  CurvatureTensor R = curvature(model, conn);
  CurvatureTensor Ro = curvature_oracle(model);
  double Rmax = std::max(R.max_abs(), 1e-300);

  NullityReport rep;

  // Curvature cross-validation and symmetries always run.
  double dual = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          dual = std::max(dual, std::abs(R(i, j, k, l) - Ro(i, j, k, l)));
  rep.residuals["curvature_dual_path"] = dual / Rmax;
  rep.flags["curvature_dual_path"] = dual / Rmax <= 1e-9 ? Flag::pass : Flag::fail;
  auto sym = curvature_symmetry_residuals(R);
  double symmax = std::max({sym.skew_first_pair, sym.skew_second_pair,
                            sym.pair_symmetry, sym.first_bianchi});
  rep.residuals["curvature_symmetries"] = symmax;
  rep.flags["curvature_symmetries"] = symmax <= 1e-9 ? Flag::pass : Flag::fail;

  Subspace nu = nullity(model, R);
  Subspace nuhat = adapted_nullity(model, conn, nu);
  auto [nu1, nu2] = osculating(model, conn, nu);
  rep.dims["dim_M"] = m;
  rep.dims["nu"] = nu.dim();
  rep.dims["nu_hat"] = nuhat.dim();
  rep.dims["nu1"] = nu1.dim();
  rep.dims["nu2"] = nu2.dim();

  const bool flat = R.max_abs() <= 1e-12;
  if (nu.dim() == 0 || flat || nu.dim() == m ||
      contains(nu, nuhat, report_tol)) {
    rep.branch = flat || nu.dim() == m ? "trivial_flat"
                 : nu.dim() == 0       ? "trivial_zero"
                                       : "trivial_parallel";
    for (const char* k :
         {"codim_nu_ge_3", "strict_chain", "lemma_nabla_R", "stabilizer",
          "u00_ideal", "tr_center_u00", "enlarged_closed", "ideal_abelian",
          "ideal_is_ideal", "nu2_in_ideal_values", "contraction_tr_u",
          "contraction_nuhat", "contraction_tr_pair", "u0_preserves_nuhat",
          "jacobi_operator_nuhat"})
      rep.flags[k] = Flag::na;
    return rep;
  }

  rep.branch = "nontrivial";
  BoundedAlgebras ua = bounded_algebras(model, conn, nu, nu1);
  TransvectionSpaces ts = transvection_spaces(model, conn, nu, nu1);
  rep.dims["u"] = ua.u.dim();
  rep.dims["u0"] = ua.u0.dim();
  rep.dims["u00"] = ua.u00.dim();
  rep.dims["tr0"] = ts.tr0.dim();
  rep.dims["tr"] = ts.tr.dim();
  // The bounded distribution at e is the value span of u (induced germs have
  // value = algebra element).
  rep.dims["U_e"] = ua.u.dim();

  rep.flags["codim_nu_ge_3"] = m - nu.dim() >= 3 ? Flag::pass : Flag::fail;
  rep.residuals["codim_nu_ge_3"] = m - nu.dim();
  bool strict = nu.dim() < nu1.dim() && nu1.dim() < nu2.dim() &&
                nu2.dim() <= ua.u.dim() && ua.u.dim() < m;
  rep.flags["strict_chain"] = strict ? Flag::pass : Flag::fail;
  rep.residuals["strict_chain"] = strict ? 0 : 1;

  // Parallel curvature along the nullity and the stabilizer certificate.
  auto nR = nabla_curvature(model, R);
  double nres = 0, sres = 0;
  for (int t = 0; t < nu.dim(); ++t) {
    Vec v = nu.basis().col(t);
    nres = std::max(nres, directional_nabla(nR, v).max_abs());
    sres = std::max(sres, curvature_stabilizer_check(R, conn.op_of(v)));
  }
  rep.residuals["lemma_nabla_R"] = nres / Rmax;
  rep.flags["lemma_nabla_R"] = nres / Rmax <= report_tol ? Flag::pass : Flag::fail;
  rep.residuals["stabilizer"] = sres / Rmax;
  rep.flags["stabilizer"] = sres / Rmax <= report_tol ? Flag::pass : Flag::fail;

  // u00 is an ideal; nu2 inside the bounded distribution.
  double ideal_res = 0;
  for (int i = 0; i < m; ++i)
    for (int t = 0; t < ua.u00.dim(); ++t) {
      Vec w = bracket(model.algebra, Vec::Unit(m, i), Vec(ua.u00.basis().col(t)));
      ideal_res = std::max(ideal_res, (w - ua.u00.project(w)).norm() /
                                          std::max(1.0, w.norm()));
    }
  rep.residuals["u00_ideal"] = ideal_res;
  rep.flags["u00_ideal"] = ideal_res <= report_tol ? Flag::pass : Flag::fail;
  rep.residuals["nu2_in_U"] = ua.u.containment_residual(nu2.basis());
  rep.flags["nu2_in_U"] =
      rep.residuals["nu2_in_U"] <= report_tol ? Flag::pass : Flag::fail;

  // tr inside the center of u00 (germ brackets vanish).
  double center_res = 0;
  for (int t = 0; t < ts.tr.dim(); ++t) {
    KillingGerm gx = killing_germ(model, conn, Vec(ts.tr.basis().col(t)));
    for (int q = 0; q < ua.u00.dim(); ++q) {
      KillingGerm gz = killing_germ(model, conn, Vec(ua.u00.basis().col(q)));
      KillingGerm br = germ_bracket(model, R, gx, gz);
      center_res = std::max(
          {center_res, br.value.norm(), br.op.lpNorm<Eigen::Infinity>()});
    }
  }
  rep.residuals["tr_center_u00"] = center_res;
  rep.flags["tr_center_u00"] = center_res <= report_tol ? Flag::pass : Flag::fail;

  // Enlarged algebra and its abelian ideal.
  EnlargedAlgebra gp = enlarged_algebra(model, conn, R, nu);
  AbelianIdeal ai = abelian_ideal(model, R, gp, nu);
  rep.dims["g_prime"] = gp.span.dim();
  rep.dims["a_ideal"] = ai.span.dim();
  rep.residuals["enlarged_closed"] = gp.closure_residual;
  rep.flags["enlarged_closed"] =
      gp.closure_residual <= report_tol ? Flag::pass : Flag::fail;
  rep.residuals["ideal_abelian"] = ai.abelian_residual;
  rep.flags["ideal_abelian"] =
      ai.abelian_residual <= report_tol ? Flag::pass : Flag::fail;
  rep.residuals["ideal_is_ideal"] = ai.ideal_residual;
  rep.flags["ideal_is_ideal"] =
      ai.ideal_residual <= report_tol ? Flag::pass : Flag::fail;
  rep.residuals["nu2_in_ideal_values"] = ai.value_span.containment_residual(nu2.basis());
  rep.flags["nu2_in_ideal_values"] =
      rep.residuals["nu2_in_ideal_values"] <= report_tol ? Flag::pass : Flag::fail;

  // Curvature contractions: R on (tr, u), on (nuhat, nuhat), and on tr pairs
  // in the last two slots.
  auto contract2 = [&](const Vec& a, const Vec& b, bool last_pair) {
    double worst = 0;
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) {
        double s = 0;
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            s += last_pair ? R(k, l, i, j) * a(i) * b(j)
                           : a(i) * b(j) * R(i, j, k, l);
        worst = std::max(worst, std::abs(s));
      }
    return worst;
  };
  double c_tr_u = 0, c_hat = 0, c_trpair = 0, jac = 0;
  for (int t = 0; t < ts.tr.dim(); ++t)
    for (int q = 0; q < ua.u.dim(); ++q)
      c_tr_u = std::max(c_tr_u, contract2(ts.tr.basis().col(t),
                                          ua.u.basis().col(q), false));
  for (int t = 0; t < nuhat.dim(); ++t) {
    for (int q = 0; q < nuhat.dim(); ++q)
      c_hat = std::max(c_hat, contract2(nuhat.basis().col(t),
                                        nuhat.basis().col(q), false));
    // Jacobi operator R(., v) v on adapted directions.
    Vec v = nuhat.basis().col(t);
    for (int i = 0; i < m; ++i)
      for (int l = 0; l < m; ++l) {
        double s = 0;
        for (int j = 0; j < m; ++j)
          for (int k = 0; k < m; ++k) s += R(i, j, k, l) * v(j) * v(k);
        jac = std::max(jac, std::abs(s));
      }
  }
  for (int t = 0; t < ts.tr.dim(); ++t)
    for (int q = 0; q < ts.tr.dim(); ++q)
      c_trpair = std::max(c_trpair, contract2(ts.tr.basis().col(t),
                                              ts.tr.basis().col(q), true));
  rep.residuals["contraction_tr_u"] = c_tr_u / Rmax;
  rep.flags["contraction_tr_u"] =
      c_tr_u / Rmax <= report_tol ? Flag::pass : Flag::fail;
  rep.residuals["contraction_nuhat"] = c_hat / Rmax;
  rep.flags["contraction_nuhat"] =
      c_hat / Rmax <= report_tol ? Flag::pass : Flag::fail;
  rep.residuals["contraction_tr_pair"] = c_trpair / Rmax;
  rep.flags["contraction_tr_pair"] =
      c_trpair / Rmax <= report_tol ? Flag::pass : Flag::fail;
  rep.residuals["jacobi_operator_nuhat"] = jac / Rmax;
  rep.flags["jacobi_operator_nuhat"] =
      jac / Rmax <= report_tol ? Flag::pass : Flag::fail;

  // Elements of u0 preserve the adapted subspace.
  double pres = 0;
  Mat Ph = Mat::Identity(m, m);
  if (nuhat.dim() > 0) Ph -= nuhat.basis() * nuhat.basis().transpose();
  for (int q = 0; q < ua.u0.dim(); ++q) {
    Mat Bz = conn.op_of(Vec(ua.u0.basis().col(q)));
    for (int t = 0; t < nuhat.dim(); ++t)
      pres = std::max(pres, (Ph * (Bz * nuhat.basis().col(t))).norm());
  }
  rep.residuals["u0_preserves_nuhat"] = pres;
  rep.flags["u0_preserves_nuhat"] = pres <= report_tol ? Flag::pass : Flag::fail;

  return rep;
}

}  // namespace nullitylab

#endif
