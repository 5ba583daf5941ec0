#ifndef NULLITYLAB_FLOW_HPP
#define NULLITYLAB_FLOW_HPP

#include "nullitylab/analysis.hpp"

namespace nullitylab {

/**
 * Group element of a semidirect product R^n x| K as (translation, rotation).
 * For models without a translation split the translation part is empty and
 * the rotation matrix lives in the adjoint representation of the algebra.
 */
struct GroupElement {
  Vec translation;
  Mat rotation;
};

/** Integrated curve: time grid, group elements, left-trivialized velocity. */
struct Trajectory {
  std::vector<double> times;
  std::vector<GroupElement> elements;
  std::vector<Vec> body_velocity;
};

namespace detail {

/** Rotation-block generators: representation matrices indexed by the rotation
 * coordinates (the tail of the algebra), or the adjoint action as fallback. */
struct FlowSplit {
  int n = 0;  // translation coordinates (leading block)
  std::vector<Mat> gen;
};

inline FlowSplit flow_split(const HomogeneousModel& model) {
  FlowSplit split;
  const int m = model.algebra.dim;
  if (model.translation_dim > 0 || !model.rep_generators.empty()) {
    split.n = model.translation_dim;
    split.gen = model.rep_generators;
    if (static_cast<int>(split.gen.size()) != m - split.n)
      throw invalid_input("flow: rotation generators do not match algebra split");
  } else {
    split.n = 0;
    for (int i = 0; i < m; ++i) {
      Mat ad(m, m);
      for (int j = 0; j < m; ++j) ad.col(j) = basis_bracket(model.algebra, i, j);
      split.gen.push_back(ad);
    }
  }
  return split;
}

inline Mat rotation_generator(const FlowSplit& split, const Vec& v) {
  const int nr = split.gen.empty() ? 0 : static_cast<int>(split.gen[0].rows());
  Mat G = Mat::Zero(nr, nr);
  for (size_t a = 0; a < split.gen.size(); ++a)
    G += v(split.n + static_cast<int>(a)) * split.gen[a];
  return G;
}

/** Nearest orthogonal matrix (polar factor), guards drift after each step. */
inline Mat reorthonormalize(const Mat& Q) {
  if (Q.size() == 0) return Q;
  Eigen::JacobiSVD<Mat> svd(Q, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace detail

/**
 * Geodesic through the identity, classical 4th-order one-step method on the
 * joint state (body velocity, group element) in left trivialization:
 *   v' = -Lambda_left(v, v),  p' = Q v_n,  Q' = Q G(v_rot).
 * Fixed step (the grid divides [0,T] evenly with step <= h); the rotation is
 * re-orthonormalized after every step. NaN anywhere aborts with diagnostics.
 */
inline Trajectory geodesic(const HomogeneousModel& model, const Vec& v0, double T,
                           double h) {
  validate_model(model);
  if (h <= 0 || T < 0) throw invalid_input("geodesic: need h > 0 and T >= 0");
  if (v0.size() != model.algebra.dim)
    throw dimension_mismatch("geodesic: v0 length mismatch");
  ConnectionMap N = left_connection(model);
  detail::FlowSplit split = detail::flow_split(model);
  const int nrot = split.gen.empty() ? 0 : static_cast<int>(split.gen[0].rows());

  const int steps = std::max(1, static_cast<int>(std::llround(std::ceil(T / h - 1e-12))));
  const double hh = T > 0 ? T / steps : 0;

  Trajectory traj;
  Vec v = v0;
  Vec p = Vec::Zero(split.n);
  Mat Q = Mat::Identity(nrot, nrot);
  auto push = [&](double t) {
    traj.times.push_back(t);
    traj.elements.push_back({p, Q});
    traj.body_velocity.push_back(v);
  };
  push(0);
  auto vdot = [&](const Vec& w) { return Vec(-N.lambda(w, w)); };
  for (int i = 0; i < steps && T > 0; ++i) {
    Vec k1 = vdot(v), k2 = vdot(v + 0.5 * hh * k1), k3 = vdot(v + 0.5 * hh * k2),
        k4 = vdot(v + hh * k3);
    Vec vm1 = v, vm2 = v + 0.5 * hh * k1, vm3 = v + 0.5 * hh * k2,
        vm4 = v + hh * k3;
    // Group element uses the same stage velocities.
    auto gdot = [&](const Vec& pp, const Mat& QQ, const Vec& w, Vec& dp, Mat& dQ) {
      (void)pp;
      if (split.n > 0)
        dp = nrot == split.n ? Vec(QQ * w.head(split.n)) : Vec(w.head(split.n));
      else
        dp = Vec::Zero(0);
      dQ = QQ * detail::rotation_generator(split, w);
    };
    Vec dp1, dp2, dp3, dp4;
    Mat dQ1, dQ2, dQ3, dQ4;
    gdot(p, Q, vm1, dp1, dQ1);
    gdot(p + 0.5 * hh * dp1, Q + 0.5 * hh * dQ1, vm2, dp2, dQ2);
    gdot(p + 0.5 * hh * dp2, Q + 0.5 * hh * dQ2, vm3, dp3, dQ3);
    gdot(p + hh * dp3, Q + hh * dQ3, vm4, dp4, dQ4);
    v += hh / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    p += hh / 6.0 * (dp1 + 2 * dp2 + 2 * dp3 + dp4);
    Q += hh / 6.0 * (dQ1 + 2 * dQ2 + 2 * dQ3 + dQ4);
    Q = detail::reorthonormalize(Q);
    if (!v.allFinite() || !p.allFinite() || !Q.allFinite())
      throw invalid_input("geodesic: non-finite state at t = " +
                          std::to_string((i + 1) * hh));
    push((i + 1) * hh);
  }
  return traj;
}

/** Max drift of the metric norm of the body velocity along the trajectory. */
inline double energy_drift(const HomogeneousModel& model, const Trajectory& traj) {
  double e0 = std::sqrt(traj.body_velocity.front().dot(
      model.metric * traj.body_velocity.front()));
  double worst = 0;
  for (const Vec& v : traj.body_velocity)
    worst = std::max(worst, std::abs(std::sqrt(v.dot(model.metric * v)) - e0));
  return worst;
}

/**
 * Grid-consistency residual of a trajectory: a 5-point 4th-order central
 * difference of the translation and rotation data against the body velocity.
 * Independent of the integrator; O(h^4) for a consistent trajectory.
 */
inline double trajectory_consistency(const HomogeneousModel& model,
                                     const Trajectory& traj) {
  const size_t N = traj.times.size();
  if (N < 5) return 0;
  detail::FlowSplit split = detail::flow_split(model);
  double h = traj.times[1] - traj.times[0];
  double worst = 0;
  for (size_t i = 2; i + 2 < N; ++i) {
    const auto& g = traj.elements;
    if (split.n > 0) {
      Vec dp = (-g[i + 2].translation + 8 * g[i + 1].translation -
                8 * g[i - 1].translation + g[i - 2].translation) /
               (12 * h);
      Vec vn = traj.body_velocity[i].head(split.n);
      Vec expect = g[i].rotation.rows() == split.n ? Vec(g[i].rotation * vn) : vn;
      worst = std::max(worst, (dp - expect).norm());
    }
    if (g[i].rotation.size() > 0) {
      Mat dQ = (-g[i + 2].rotation + 8 * g[i + 1].rotation -
                8 * g[i - 1].rotation + g[i - 2].rotation) /
               (12 * h);
      Mat expect =
          g[i].rotation * detail::rotation_generator(split, traj.body_velocity[i]);
      worst = std::max(worst, (dQ - expect).lpNorm<Eigen::Infinity>());
    }
  }
  return worst;
}

namespace detail {

/** Cubic-Hermite velocity at the midpoint of step i (4th-order accurate). */
inline Vec hermite_midpoint(const ConnectionMap& N, const Vec& va, const Vec& vb,
                            double h) {
  Vec da = -N.lambda(va, va), db = -N.lambda(vb, vb);
  return 0.5 * (va + vb) + h / 8.0 * (da - db);
}

/**
 * RK4 for the non-autonomous linear ODE u' = F(v(t)) u along the trajectory's
 * velocity samples, forward (dir=+1) or backward (dir=-1). F maps a velocity
 * to the right-hand-side operator applied to u.
 */
template <class Rhs>
std::vector<Vec> integrate_along(const HomogeneousModel& model,
                                 const Trajectory& traj, const Vec& u0, int dir,
                                 Rhs rhs) {
  ConnectionMap N = left_connection(model);
  const int steps = static_cast<int>(traj.times.size()) - 1;
  std::vector<Vec> out(traj.times.size());
  int start = dir > 0 ? 0 : steps;
  out[start] = u0;
  Vec u = u0;
  for (int s = 0; s < steps; ++s) {
    int i = dir > 0 ? s : steps - s;        // current grid index
    int j = i + dir;                        // next grid index
    double h = traj.times[j] - traj.times[i];
    const Vec& va = traj.body_velocity[i];
    const Vec& vb = traj.body_velocity[j];
    Vec vm = hermite_midpoint(N, va, vb, traj.times[j] - traj.times[i]);
    Vec k1 = rhs(va, u);
    Vec k2 = rhs(vm, Vec(u + 0.5 * h * k1));
    Vec k3 = rhs(vm, Vec(u + 0.5 * h * k2));
    Vec k4 = rhs(vb, Vec(u + h * k3));
    u += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!u.allFinite())
      throw invalid_input("flow: non-finite state at t = " +
                          std::to_string(traj.times[j]));
    out[j] = u;
  }
  return out;
}

}  // namespace detail

/** Parallel transport of u0 along the trajectory (left trivialization):
 * u' = -Lambda_left(v(t), u). */
inline std::vector<Vec> parallel_transport(const HomogeneousModel& model,
                                           const Trajectory& traj, const Vec& u0) {
  if (u0.size() != model.algebra.dim)
    throw dimension_mismatch("parallel_transport: vector length mismatch");
  ConnectionMap N = left_connection(model);
  return detail::integrate_along(
      model, traj, u0, +1,
      [&](const Vec& v, const Vec& u) { return Vec(-N.lambda(v, u)); });
}

/** Transport backwards from the trajectory's endpoint to its start. */
inline std::vector<Vec> parallel_transport_reverse(const HomogeneousModel& model,
                                                   const Trajectory& traj,
                                                   const Vec& uT) {
  ConnectionMap N = left_connection(model);
  return detail::integrate_along(
      model, traj, uT, -1,
      [&](const Vec& v, const Vec& u) { return Vec(-N.lambda(v, u)); });
}

/** Max drift of the metric norm of a transported vector (isometry defect). */
inline double transport_isometry_defect(const HomogeneousModel& model,
                                        const std::vector<Vec>& u) {
  double e0 = u.front().dot(model.metric * u.front());
  double worst = 0;
  for (const Vec& w : u)
    worst = std::max(worst, std::abs(w.dot(model.metric * w) - e0));
  return worst;
}

/**
 * Left-trivialized values of the Killing field induced by x along the curve,
 * by the transport ODE zeta' = -[v(t), zeta] (structure bracket).
 */
inline std::vector<Vec> killing_along(const HomogeneousModel& model,
                                      const Trajectory& traj, const Vec& x) {
  if (x.size() != model.algebra.dim)
    throw dimension_mismatch("killing_along: vector length mismatch");
  return detail::integrate_along(model, traj, x, +1,
                                 [&](const Vec& v, const Vec& z) {
                                   return Vec(-bracket(model.algebra, v, z));
                                 });
}

/**
 * Closed-form cross-check for semidirect models: the Killing value at g(t) is
 * the adjoint of g(t)^{-1} applied to x, assembled from the group-element
 * blocks. Rotation coordinates are recovered from the conjugated generator by
 * least squares on the (linearly independent) generator family.
 */
inline std::vector<Vec> killing_along_adjoint(const HomogeneousModel& model,
                                              const Trajectory& traj,
                                              const Vec& x) {
  const int m = model.algebra.dim;
  const int n = model.translation_dim;
  if (n <= 0)
    throw invalid_input("killing_along_adjoint: needs a translation split");
  const auto& gens = model.rep_generators;
  const int dk = static_cast<int>(gens.size());
  Mat gram(dk, dk);
  for (int a = 0; a < dk; ++a)
    for (int b = 0; b < dk; ++b)
      gram(a, b) = (gens[a].transpose() * gens[b]).trace();
  Mat A = Mat::Zero(n, n);
  for (int a = 0; a < dk; ++a) A += x(n + a) * gens[a];

  std::vector<Vec> out;
  for (const GroupElement& g : traj.elements) {
    Mat Qi = g.rotation.transpose();      // inverse rotation
    Vec pi = -(Qi * g.translation);       // inverse translation
    Mat Ac = Qi * A * Qi.transpose();     // conjugated rotation generator
    Vec rhs(dk);
    for (int a = 0; a < dk; ++a) rhs(a) = (gens[a].transpose() * Ac).trace();
    Vec coords = gram.ldlt().solve(rhs);
    Vec val(m);
    val.head(n) = Qi * x.head(n) - Ac * pi;
    val.tail(dk) = coords;
    out.push_back(val);
  }
  return out;
}

/** Parallel frame along the trajectory: columns transported from identity. */
inline std::vector<Mat> parallel_frame(const HomogeneousModel& model,
                                       const Trajectory& traj) {
  const int m = model.algebra.dim;
  std::vector<Mat> frames(traj.times.size(), Mat(m, m));
  for (int c = 0; c < m; ++c) {
    auto col = parallel_transport(model, traj, Vec(Vec::Unit(m, c)));
    for (size_t i = 0; i < col.size(); ++i) frames[i].col(c) = col[i];
  }
  return frames;
}

/** Residual record of the Killing-growth law along a nullity geodesic. */
struct GrowthReport {
  double nullity_residual = 0;      // distance of v from the nullity at e
  double autoparallel_residual = 0; // max distance of v(t) from the nullity
  double value_residual = 0;        // law for the field values
  double operator_residual = 0;     // parallelism of the covariant operator
  double energy_residual = 0;
  bool pass = false;
};

/**
 * Growth law of a Killing field along a geodesic tangent to the nullity:
 * the field value satisfies  Z(t) = transport(Z(0)) + t * transport(Lambda(v, Z(0)))
 * and its covariant-derivative operator is parallel. Both residuals are taken
 * in the left-trivialized frame over the whole grid.
 */
inline GrowthReport check_lemma_growth(const HomogeneousModel& model, const Vec& v,
                                       const Vec& z, double T, double h) {
  const int m = model.algebra.dim;
  ConnectionMap conn = killing_connection(model);
  ConnectionMap N = left_connection(model);
  CurvatureTensor R = curvature(model, conn);
  Subspace nu = nullity(model, R);
  GrowthReport rep;
  rep.nullity_residual = (v - nu.project(v)).norm() / std::max(1.0, v.norm());
  if (rep.nullity_residual > report_tol)
    throw invalid_input("check_lemma_growth: direction not in the nullity "
                        "(residual " + std::to_string(rep.nullity_residual) + ")");

  Trajectory traj = geodesic(model, v, T, h);
  rep.energy_residual = energy_drift(model, traj);
  for (const Vec& w : traj.body_velocity)
    rep.autoparallel_residual =
        std::max(rep.autoparallel_residual, (w - nu.project(w)).norm());

  auto zt = killing_along(model, traj, z);
  auto uz = parallel_transport(model, traj, z);
  auto uw = parallel_transport(model, traj, Vec(conn.lambda(v, z)));
  for (size_t i = 0; i < traj.times.size(); ++i)
    rep.value_residual = std::max(
        rep.value_residual,
        (zt[i] - uz[i] - traj.times[i] * uw[i]).norm());

  // Operator of the covariant derivative of the field at g(t), expressed in
  // the parallel frame; parallelism <=> constancy.
  auto frames = parallel_frame(model, traj);
  Mat A0;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    Mat At(m, m);
    for (int c = 0; c < m; ++c)
      At.col(c) = N.lambda(Vec(Vec::Unit(m, c)), zt[i]) -
                  bracket(model.algebra, Vec(Vec::Unit(m, c)), zt[i]);
    Mat par = frames[i].inverse() * At * frames[i];
    if (i == 0) A0 = par;
    rep.operator_residual =
        std::max(rep.operator_residual, (par - A0).lpNorm<Eigen::Infinity>());
  }
  rep.pass = rep.value_residual <= 1e-6 && rep.operator_residual <= 1e-6;
  return rep;
}

/** Residual record of the transport/flow identity along a Killing geodesic. */
struct FlowIdentityReport {
  double geodesic_defect = 0;  // ||Lambda(x, x)|| precondition payload
  double residual = 0;         // max ||frame(t) - exp(-t B)||
  double energy_residual = 0;
  bool pass = false;
};

/**
 * Along the integral curve of the Killing field induced by x (a geodesic when
 * Lambda(x,x) = 0), the flow differential is the identity on the
 * left-trivialized frame, so the parallel frame must equal exp(-tB) with B
 * the field's covariant-derivative operator at the base point.
 */
inline FlowIdentityReport check_flow_identity(const HomogeneousModel& model,
                                              const Vec& x, double T, double h) {
  ConnectionMap conn = killing_connection(model);
  FlowIdentityReport rep;
  rep.geodesic_defect = conn.lambda(x, x).norm();
  if (rep.geodesic_defect > default_tol() * std::max(1.0, x.squaredNorm()))
    throw invalid_input("check_flow_identity: integral curve not geodesic, "
                        "||Lambda(x,x)|| = " + std::to_string(rep.geodesic_defect));
  Trajectory traj = geodesic(model, x, T, h);
  rep.energy_residual = energy_drift(model, traj);
  Mat B = conn.op_of(x);
  auto frames = parallel_frame(model, traj);
  for (size_t i = 0; i < traj.times.size(); ++i) {
    Mat E = Mat(-traj.times[i] * B).exp();
    rep.residual = std::max(rep.residual,
                            (frames[i] - E).lpNorm<Eigen::Infinity>());
  }
  rep.pass = rep.residual <= 1e-6;
  return rep;
}

}  // namespace nullitylab

#endif
