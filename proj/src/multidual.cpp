#include "plate/multidual.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <cmath>

namespace plate::multi {

namespace {

SymTensor2Field sym_grad(const Grid& g, const PrimalState& u) {
  const VectorField2 du1 = g.gradient(u.u1);
  const VectorField2 du2 = g.gradient(u.u2);
  SymTensor2Field e(g.nodes());
  e.t11 = du1.x;
  e.t22 = du2.y;
  e.t12 = 0.5 * (du1.y + du2.x);
  return e;
}

// G^T W T G over interior unknowns for a pointwise tensor field T
SpMat gradient_form_matrix(const Grid& g, const SymTensor2Field& t) {
  const Vec& w = g.node_weights();
  const SpMat& gx = g.Gx();
  const SpMat& gy = g.Gy();
  Vec w11 = w.cwiseProduct(t.t11);
  Vec w22 = w.cwiseProduct(t.t22);
  Vec w12 = w.cwiseProduct(t.t12);
  return SpMat(gx.transpose() * SpMat(w11.asDiagonal() * gx)) +
         SpMat(gy.transpose() * SpMat(w22.asDiagonal() * gy)) +
         SpMat(gx.transpose() * SpMat(w12.asDiagonal() * gy)) +
         SpMat(gy.transpose() * SpMat(w12.asDiagonal() * gx));
}

// reduced 3x3 material map applied to one symmetric 2x2 matrix
Eigen::Matrix2d apply_node(const Eigen::Matrix3d& reduced,
                           const Eigen::Matrix2d& t) {
  const Eigen::Matrix3d a = MaterialTensor::apply_matrix(reduced);
  const Eigen::Vector3d tv(t(0, 0), t(1, 1), t(0, 1));
  const Eigen::Vector3d out = a * tv;
  Eigen::Matrix2d m;
  m << out[0], out[2], out[2], out[1];
  return m;
}

Eigen::Vector3d to_vec3(const Eigen::Matrix2d& m) {
  return Eigen::Vector3d(m(0, 0), m(1, 1), m(0, 1));
}

Eigen::Matrix2d from_vec3(const Eigen::Vector3d& v) {
  Eigen::Matrix2d m;
  m << v[0], v[2], v[2], v[1];
  return m;
}

}  // namespace

MultiDual::MultiDual(const Problem& prob, MultiDualConfig cfg, Loads loads)
    : prob_(prob), cfg_(std::move(cfg)), loads_(std::move(loads)) {}

double MultiDual::k_for(const SymTensor2Field& n0) const {
  if (cfg_.k_shift > 0.0) return cfg_.k_shift;
  double max_hi = 0.0, max_mag = 0.0;
  for (Eigen::Index i = 0; i < n0.size(); ++i) {
    double lo, hi;
    eig2x2(n0.t11[i], n0.t22[i], n0.t12[i], lo, hi);
    max_hi = std::max(max_hi, hi);
    max_mag = std::max({max_mag, std::abs(lo), std::abs(hi)});
  }
  const double base = std::max(max_mag, 1e-3 * prob_.material().membrane(0, 0));
  return 2.0 * std::max(0.0, max_hi) + std::max(base, 1e-12);
}

Eigen::SimplicialLDLT<SpMat>& MultiDual::fk_factor(double k) const {
  auto it = fk_fac_.find(k);
  if (it == fk_fac_.end()) {
    const Grid& g = prob_.grid();
    SpMat sys = SpMat(g.interior_weight() * prob_.bending().matrix()) +
                k * g.grad_gram();
    auto fac = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
    fac->compute(sys);
    if (fac->info() != Eigen::Success)
      throw std::runtime_error("shifted bending system failed to factorize");
    it = fk_fac_.emplace(k, std::move(fac)).first;
  }
  return *it->second;
}

J1Breakdown MultiDual::j1(const PrimalState& u, const VectorField2& q,
                          const SymTensor2Field& n, double k) const {
  const Grid& g = prob_.grid();
  const Vec wi = g.restrict_interior(u.w);
  const VectorField2 gw = g.gradient(u.w);

  J1Breakdown b;
  b.bending = 0.5 * g.interior_weight() * wi.dot(prob_.bending().apply(wi));
  b.load_w = -g.dot(u.w, loads_.p);
  const SymTensor2Field kt = dual::shifted(n, k);
  b.q_quad = 0.5 * g.dot(dual::apply_inverse(kt, q), q);
  b.q_pair = -g.dot(gw, q);
  b.grad_quad = 0.5 * k * g.dot(gw, gw);
  const SymTensor2Field hn = apply(prob_.material().membrane_inv, n);
  b.constitutive = -0.5 * g.dot(hn, n);
  b.equil_pair = g.dot(n, sym_grad(g, u)) - g.dot(u.u1, loads_.p1) -
                 g.dot(u.u2, loads_.p2);
  b.total = b.bending + b.load_w + b.q_quad + b.q_pair + b.grad_quad +
            b.constitutive + b.equil_pair;
  return b;
}

double MultiDual::fk_star(const VectorField2& q, double k, bool with_load,
                          ScalarField* maximizer) const {
  const Grid& g = prob_.grid();
  Vec rhs = g.grad_adjoint(q);
  if (with_load) rhs += g.interior_weight() * g.restrict_interior(loads_.p);
  const Vec w = fk_factor(k).solve(rhs);
  if (maximizer) *maximizer = g.prolong(w);
  return 0.5 * w.dot(rhs);
}

double MultiDual::hk_star(const VectorField2& q, const SymTensor2Field& n,
                          double k, ScalarField* maximizer) const {
  const Grid& g = prob_.grid();
  const SymTensor2Field kt = dual::shifted(n, k);
  const PosDefReport rep = is_posdef_field(kt, 0.0);
  if (!rep.posdef) throw NotPosDef(rep.worst_node, rep.min_eig);

  const SpMat sys = gradient_form_matrix(g, kt);
  Vec rhs = g.grad_adjoint(q);
  // positive semidefinite with the checkerboard kernel; rhs is in the range
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg(sys);
  cg.setTolerance(1e-14);
  cg.setMaxIterations(100 * g.interior());
  if (g.grad_kernel().size() > 0)
    rhs -= g.grad_kernel().dot(rhs) * g.grad_kernel();
  const Vec w = cg.solve(rhs);
  if (maximizer) *maximizer = g.prolong(w);
  return 0.5 * w.dot(rhs);
}

double MultiDual::jhat1(const VectorField2& q, const SymTensor2Field& n,
                        double k) const {
  const Grid& g = prob_.grid();
  const SymTensor2Field kt = dual::shifted(n, k);
  return -fk_star(q, k, false) +
         0.5 * g.dot(dual::apply_inverse(kt, q), q);
}

double MultiDual::jhat2(const VectorField2& q, const SymTensor2Field& n,
                        double k) const {
  return -fk_star(q, k, false) + hk_star(q, n, k);
}

double MultiDual::jhat_star(const VectorField2& q, const SymTensor2Field& n,
                            double k) const {
  const Grid& g = prob_.grid();
  const SymTensor2Field hn = apply(prob_.material().membrane_inv, n);
  return -fk_star(q, k, true) + hk_star(q, n, k) - 0.5 * g.dot(hn, n);
}

double MultiDual::jhat_u(const PrimalState& u, const SymTensor2Field& n) const {
  const Grid& g = prob_.grid();
  const Vec wi = g.restrict_interior(u.w);
  const VectorField2 gw = g.gradient(u.w);
  VectorField2 ng(g.nodes());
  ng.x = n.t11.cwiseProduct(gw.x) + n.t12.cwiseProduct(gw.y);
  ng.y = n.t12.cwiseProduct(gw.x) + n.t22.cwiseProduct(gw.y);
  const SymTensor2Field hn = apply(prob_.material().membrane_inv, n);
  return 0.5 * g.interior_weight() * wi.dot(prob_.bending().apply(wi)) +
         0.5 * g.dot(ng, gw) - 0.5 * g.dot(hn, n) +
         g.dot(n, sym_grad(g, u)) - g.dot(u.u1, loads_.p1) -
         g.dot(u.u2, loads_.p2);
}

Mat MultiDual::jhat1_form(const SymTensor2Field& n, double k) const {
  const Grid& g = prob_.grid();
  const int nn = g.nodes();
  const SymTensor2Field kt = dual::shifted(n, k);

  Mat m = Mat::Zero(2 * nn, 2 * nn);
  for (int i = 0; i < nn; ++i) {
    const double a = kt.t11[i], b = kt.t12[i], c = kt.t22[i];
    const double det = a * c - b * b;
    double lo, hi;
    eig2x2(a, c, b, lo, hi);
    if (lo <= 0.0) throw NotPosDef(i, lo);
    m(i, i) = c / det;
    m(nn + i, nn + i) = a / det;
    m(i, nn + i) = m(nn + i, i) = -b / det;
  }
  const Mat a = g.grad_adjoint_sqrtw();
  Mat rhs = a;
  for (int c = 0; c < rhs.cols(); ++c)
    rhs.col(c) = fk_factor(k).solve(Vec(a.col(c)));
  m.noalias() -= a.transpose() * rhs;
  return m;
}

Mat MultiDual::jhat2_form_reduced(const SymTensor2Field& n, double k) const {
  const Grid& g = prob_.grid();
  const int m = g.interior();
  const SymTensor2Field kt = dual::shifted(n, k);
  const PosDefReport rep = is_posdef_field(kt, 0.0);
  if (!rep.posdef) throw NotPosDef(rep.worst_node, rep.min_eig);

  const Mat x = Mat(gradient_form_matrix(g, kt));
  Eigen::SelfAdjointEigenSolver<Mat> es(x);
  const Vec ev = es.eigenvalues();
  const double cutoff = 1e-12 * ev.cwiseAbs().maxCoeff();
  Vec inv = Vec::Zero(m);
  for (int i = 0; i < m; ++i) inv[i] = ev[i] > cutoff ? 1.0 / ev[i] : 0.0;
  Mat r = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();

  Mat yinv = fk_factor(k).solve(Mat(Mat::Identity(m, m)));
  r -= yinv;

  const Vec& ker = g.grad_kernel();
  if (ker.size() > 0) {
    // restrict to the range of the gradient adjoint
    r -= ker * (ker.transpose() * r);
    r -= (r * ker) * ker.transpose();
  }
  return r;
}

SupNResult MultiDual::sup_n(const PrimalState& u, const VectorField2& q,
                            double k) const {
  const Grid& g = prob_.grid();
  const SymTensor2Field e = sym_grad(g, u);
  const Eigen::Matrix3d& hbar = prob_.material().membrane_inv;
  const Eigen::Matrix3d& hmat = prob_.material().membrane;
  const double margin = 1e-8 * k;

  SupNResult res;
  res.n = SymTensor2Field(g.nodes());
  double worst = 0.0;

  for (Eigen::Index node = 0; node < g.nodes(); ++node) {
    const Eigen::Vector2d qv(q.x[node], q.y[node]);
    Eigen::Matrix2d s;
    s << e.t11[node], e.t12[node], e.t12[node], e.t22[node];

    // start from the decoupled constitutive closure N = H : sym grad u
    Eigen::Matrix2d nn = apply_node(hmat, s);
    bool fallback = false;
    auto guard = [&](Eigen::Matrix2d& m) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> se(m);
      Eigen::Vector2d lam = se.eigenvalues();
      const double lim = 0.5 * k - margin;
      if (lam.maxCoeff() > lim) {
        fallback = true;
        lam[0] = std::min(lam[0], lim);
        lam[1] = std::min(lam[1], lim);
        m = se.eigenvectors() * lam.asDiagonal() *
            se.eigenvectors().transpose();
      }
    };
    guard(nn);

    const double scale =
        1.0 + s.norm() + qv.squaredNorm() / (k * k) + nn.norm() * hbar.norm();
    Eigen::Vector3d gres;
    auto residual = [&](const Eigen::Matrix2d& nmat) {
      const Eigen::Matrix2d ktm =
          -nmat + k * Eigen::Matrix2d::Identity();
      const Eigen::Vector2d v = ktm.inverse() * qv;
      const Eigen::Matrix2d gm =
          0.5 * v * v.transpose() + s - apply_node(hbar, nmat);
      return std::make_pair(to_vec3(gm), v);
    };

    for (int iter = 0; iter < 100; ++iter) {
      auto [gv, v] = residual(nn);
      gres = gv;
      if (gv.norm() <= 1e-13 * scale) break;
      const Eigen::Matrix2d ktm = -nn + k * Eigen::Matrix2d::Identity();
      const Eigen::Matrix2d kbar = ktm.inverse();
      Eigen::Matrix3d jac;
      const Eigen::Matrix2d basis[3] = {
          (Eigen::Matrix2d() << 1, 0, 0, 0).finished(),
          (Eigen::Matrix2d() << 0, 0, 0, 1).finished(),
          (Eigen::Matrix2d() << 0, 1, 1, 0).finished()};
      for (int b = 0; b < 3; ++b) {
        const Eigen::Vector2d dv = kbar * basis[b] * v;
        const Eigen::Matrix2d dg = 0.5 * (dv * v.transpose() +
                                          v * dv.transpose()) -
                                   apply_node(hbar, basis[b]);
        jac.col(b) = to_vec3(dg);
      }
      const Eigen::Vector3d step = jac.fullPivLu().solve(-gv);
      nn += from_vec3(step);
      guard(nn);
    }
    res.n.t11[node] = nn(0, 0);
    res.n.t22[node] = nn(1, 1);
    res.n.t12[node] = nn(0, 1);
    if (fallback) ++res.fallback_nodes;
    worst = std::max(worst, gres.norm() / scale);
  }
  res.stationarity_residual = worst;
  return res;
}

double MultiDual::j2(const PrimalState& u, const VectorField2& q, double k,
                     SupNResult* detail) const {
  SupNResult sup = sup_n(u, q, k);
  const double val = j1(u, q, sup.n, k).total;
  if (detail) *detail = std::move(sup);
  return val;
}

SymTensor2Field MultiDual::j2_q_hessian(const PrimalState& u,
                                        const VectorField2& q,
                                        double k) const {
  const Grid& g = prob_.grid();
  const SupNResult sup = sup_n(u, q, k);
  const Eigen::Matrix3d& hbar = prob_.material().membrane_inv;

  SymTensor2Field h(g.nodes());
  const Eigen::Matrix2d basis[3] = {
      (Eigen::Matrix2d() << 1, 0, 0, 0).finished(),
      (Eigen::Matrix2d() << 0, 0, 0, 1).finished(),
      (Eigen::Matrix2d() << 0, 1, 1, 0).finished()};

  for (Eigen::Index node = 0; node < g.nodes(); ++node) {
    Eigen::Matrix2d nn;
    nn << sup.n.t11[node], sup.n.t12[node], sup.n.t12[node],
        sup.n.t22[node];
    const Eigen::Vector2d qv(q.x[node], q.y[node]);
    const Eigen::Matrix2d kbar =
        (-nn + k * Eigen::Matrix2d::Identity()).inverse();
    const Eigen::Vector2d v = kbar * qv;

    Eigen::Matrix3d gn;  // d(residual)/dN
    for (int b = 0; b < 3; ++b) {
      const Eigen::Vector2d dv = kbar * basis[b] * v;
      const Eigen::Matrix2d dg =
          0.5 * (dv * v.transpose() + v * dv.transpose()) -
          apply_node(hbar, basis[b]);
      gn.col(b) = to_vec3(dg);
    }
    Eigen::Matrix2d hess;
    for (int rho = 0; rho < 2; ++rho) {
      const Eigen::Vector2d dq = Eigen::Vector2d::Unit(rho);
      const Eigen::Vector2d dvq = kbar * dq;
      const Eigen::Matrix2d gq =
          0.5 * (dvq * v.transpose() + v * dvq.transpose());
      const Eigen::Vector3d dn = gn.fullPivLu().solve(-to_vec3(gq));
      const Eigen::Vector2d col = kbar * from_vec3(dn) * v + kbar * dq;
      hess.col(rho) = col;
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    h.t11[node] = hess(0, 0);
    h.t22[node] = hess(1, 1);
    h.t12[node] = hess(0, 1);
  }
  return h;
}

VectorField2 MultiDual::transfer_q(const PrimalState& u0, double k) const {
  const Grid& g = prob_.grid();
  const SymTensor2Field n0 = prob_.membrane_stress(u0);
  const SymTensor2Field kt = dual::shifted(n0, k);
  const VectorField2 gw = g.gradient(u0.w);
  VectorField2 q(g.nodes());
  q.x = kt.t11.cwiseProduct(gw.x) + kt.t12.cwiseProduct(gw.y);
  q.y = kt.t12.cwiseProduct(gw.x) + kt.t22.cwiseProduct(gw.y);
  return q;
}

KFitResult MultiDual::k_sweep(const PrimalState& u0, double k_base) const {
  const Grid& g = prob_.grid();
  const SymTensor2Field n0 = prob_.membrane_stress(u0);
  // start inside the asymptotic regime: the pre-asymptotic first octaves
  // decay faster than 1/K^2 and would bias the fitted slope
  if (k_base <= 0.0) k_base = 8.0 * k_for(n0);
  KFitResult fit;
  for (int i = 0; i < cfg_.k_sweep_len; ++i) {
    const double k = k_base * std::pow(2.0, i);
    const VectorField2 q0 = transfer_q(u0, k);
    const SymTensor2Field hess = j2_q_hessian(u0, q0, k);
    double err = 0.0;
    for (Eigen::Index node = 0; node < g.nodes(); ++node) {
      Eigen::Matrix2d hm, nm;
      hm << hess.t11[node], hess.t12[node], hess.t12[node], hess.t22[node];
      nm << n0.t11[node], n0.t12[node], n0.t12[node], n0.t22[node];
      const Eigen::Matrix2d ref =
          (-nm + k * Eigen::Matrix2d::Identity()).inverse();
      err = std::max(err, (hm - ref).norm());
    }
    fit.k_values.push_back(k);
    fit.error_norms.push_back(err);
  }
  // least-squares slope of log err vs log K
  const int n = cfg_.k_sweep_len;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(fit.k_values[i]);
    const double y = std::log(std::max(fit.error_norms[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

CaseReport MultiDual::classify(const PrimalState& u0) const {
  const Grid& g = prob_.grid();
  CaseReport rep;
  const SymTensor2Field n0 = prob_.membrane_stress(u0);
  const double j0 = prob_.energy(u0, loads_);
  const double scale = 1.0 + std::abs(j0);

  // pre-draw the ball samples: K must majorize the stresses of every
  // sampled state, not just the center, or the pointwise sup is clamped by
  // the guard and the ball extremality checks lose their meaning
  Rng rng(cfg_.seed);
  const double r_u =
      cfg_.r > 0.0 ? cfg_.r : 1e-3 * (1.0 + prob_.pack(u0).norm());
  std::vector<PrimalState> ball_u;
  std::vector<VectorField2> ball_dq;
  ball_u.reserve(cfg_.n_samples);
  ball_dq.reserve(cfg_.n_samples);
  double k = k_for(n0);
  for (int i = 0; i < cfg_.n_samples; ++i) {
    const PrimalState du = random_state(g, rng);
    PrimalState us = u0;
    us.u1.v += r_u * du.u1.v;
    us.u2.v += r_u * du.u2.v;
    us.w.v += r_u * du.w.v;
    k = std::max(k, k_for(prob_.membrane_stress(us)));
    ball_u.push_back(std::move(us));
    ball_dq.push_back(random_vector_field(g, rng));
  }
  rep.k_shift = k;
  const VectorField2 q0 = transfer_q(u0, k);

  // spectrum of the second variation, deflated across the exact flat modes
  {
    Mat h = Mat(prob_.hessian_operator(u0));
    const std::vector<Vec> ker = prob_.hessian_kernel();
    const double shift = 2.0 * h.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    Mat hplus = h, hminus = h;
    for (const Vec& kv : ker) {
      hplus += shift * kv * kv.transpose();
      hminus -= shift * kv * kv.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat> lo(hplus, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Mat> hi(hminus, Eigen::EigenvaluesOnly);
    rep.hess_min_eig = lo.eigenvalues().minCoeff();
    rep.hess_max_eig = hi.eigenvalues().maxCoeff();
  }

  // pointwise -N + K I > (K/2) I
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n0.size(); ++i) {
    double lo, hi;
    eig2x2(n0.t11[i], n0.t22[i], n0.t12[i], lo, hi);
    margin = std::min(margin, 0.5 * k - hi);
  }
  rep.cstar4_margin = margin;
  rep.in_Cstar4 = margin > 0.0;

  // membrane equilibrium
  {
    const int m = g.interior();
    VectorField2 row(g.nodes());
    row.x = n0.t11;
    row.y = n0.t12;
    Vec r1 = g.grad_adjoint(row) / g.interior_weight() -
             g.restrict_interior(loads_.p1);
    row.x = n0.t12;
    row.y = n0.t22;
    Vec r2 = g.grad_adjoint(row) / g.interior_weight() -
             g.restrict_interior(loads_.p2);
    rep.equilibrium_residual = std::sqrt(r1.squaredNorm() + r2.squaredNorm());
    const double pnorm =
        std::sqrt(g.restrict_interior(loads_.p1).squaredNorm() +
                  g.restrict_interior(loads_.p2).squaredNorm());
    rep.in_Bstar4 = rep.equilibrium_residual <= 1e-8 * (1.0 + pnorm);
    (void)m;
  }
  rep.in_Estar = rep.in_Bstar4 && rep.in_Cstar4;

  // D+ / D- via the assembled quadratic forms
  if (rep.in_Cstar4) {
    Eigen::SelfAdjointEigenSolver<Mat> e1(jhat1_form(n0, k),
                                          Eigen::EigenvaluesOnly);
    rep.dplus_min_eig = e1.eigenvalues().minCoeff();
    rep.in_Dplus = rep.dplus_min_eig > 0.0;

    Mat r = jhat2_form_reduced(n0, k);
    const Vec& gker = g.grad_kernel();
    if (gker.size() > 0) {
      const double push = 2.0 * r.cwiseAbs().maxCoeff() * r.rows() + 1.0;
      r -= push * gker * gker.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat> e2(r, Eigen::EigenvaluesOnly);
    rep.dminus_max_eig = e2.eigenvalues().maxCoeff();
    rep.in_Dminus = rep.dminus_max_eig < 0.0;
  }
  rep.in_Aplus = rep.in_Estar && rep.in_Dplus;
  rep.in_Aminus = rep.in_Estar && rep.in_Dminus;

  const double eig_scale = cfg_.eig_tol * (1.0 + std::abs(rep.hess_max_eig));
  const bool positive = rep.hess_min_eig > eig_scale;
  const bool negative = rep.hess_max_eig < -eig_scale;

  SupNResult sup;
  const double j2v = j2(u0, q0, k, &sup);
  rep.sup_n_residual = sup.stationarity_residual;
  rep.estar_fallbacks = sup.fallback_nodes;

  const double r_q =
      cfg_.r1 > 0.0 ? cfg_.r1
                    : 1e-3 * (1.0 + std::sqrt(g.dot(q0, q0)));

  if (negative && rep.in_Aminus) {
    rep.case_tag = "max";
  } else if (positive && rep.in_Estar) {
    rep.case_tag = "min";
  } else if (rep.in_Aplus) {
    rep.case_tag = "saddle-qualified";
  } else {
    rep.case_tag = "unclassified";
  }

  if (rep.case_tag == "max") {
    rep.chain_residual = std::abs(jhat_star(q0, n0, k) - j0);
    double best_u = -std::numeric_limits<double>::infinity();
    double best_q = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg_.n_samples; ++i) {
      best_u = std::max(best_u, jhat_u(ball_u[i], n0));
      VectorField2 qs = q0;
      qs.x += r_q * ball_dq[i].x;
      qs.y += r_q * ball_dq[i].y;
      best_q = std::max(best_q, jhat_star(qs, n0, k));
    }
    rep.ball_primal_extreme = best_u;
    rep.ball_dual_extreme = best_q;
  } else {
    // minimum-side chains (cases 1 and 2 share the J2 equality at the point)
    rep.chain_residual = std::abs(j2v - j0);
    double worst_u = std::numeric_limits<double>::infinity();
    double worst_q = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg_.n_samples; ++i) {
      worst_u = std::min(worst_u, prob_.energy(ball_u[i], loads_) - j0);
      VectorField2 qs = q0;
      qs.x += r_q * ball_dq[i].x;
      qs.y += r_q * ball_dq[i].y;
      worst_q = std::min(worst_q, j2(ball_u[i], qs, k) - j0);
    }
    rep.ball_primal_extreme = worst_u;
    rep.ball_dual_extreme = worst_q;
  }

  rep.k_fit_slope = k_sweep(u0, 0.0).slope;
  (void)scale;
  return rep;
}

}  // namespace plate::multi
