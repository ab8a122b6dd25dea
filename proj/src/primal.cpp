#include "plate/primal.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SparseLU>

namespace plate {

Problem::Problem(Grid grid, MaterialTensor mat)
    : grid_(std::move(grid)), mat_(mat), bend_(grid_.assemble_biharmonic(mat)) {}

SymTensor2Field Problem::membrane_strain(const PrimalState& s) const {
  const VectorField2 du1 = grid_.gradient(s.u1);
  const VectorField2 du2 = grid_.gradient(s.u2);
  const VectorField2 g = grid_.gradient(s.w);
  SymTensor2Field gam(grid_.nodes());
  gam.t11 = du1.x + 0.5 * g.x.cwiseProduct(g.x);
  gam.t22 = du2.y + 0.5 * g.y.cwiseProduct(g.y);
  gam.t12 = 0.5 * (du1.y + du2.x) + 0.5 * g.x.cwiseProduct(g.y);
  return gam;
}

double Problem::energy(const PrimalState& s, const Loads& f) const {
  const SymTensor2Field gam = membrane_strain(s);
  const SymTensor2Field n = apply(mat_.membrane, gam);
  const Vec wi = grid_.restrict_interior(s.w);
  const double membrane = 0.5 * grid_.dot(n, gam);
  const double bending =
      0.5 * grid_.interior_weight() * wi.dot(bend_.apply(wi));
  const double work = grid_.dot(s.w, f.p) + grid_.dot(s.u1, f.p1) +
                      grid_.dot(s.u2, f.p2);
  return membrane + bending - work;
}

Vec Problem::load_vector(const Loads& f) const {
  const int m = grid_.interior();
  const double om = grid_.interior_weight();
  Vec lv(3 * m);
  lv.segment(0, m) = om * grid_.restrict_interior(f.p1);
  lv.segment(m, m) = om * grid_.restrict_interior(f.p2);
  lv.segment(2 * m, m) = om * grid_.restrict_interior(f.p);
  return lv;
}

Vec Problem::residual_weak(const PrimalState& s, const Loads& f) const {
  const int m = grid_.interior();
  const SymTensor2Field gam = membrane_strain(s);
  const SymTensor2Field n = apply(mat_.membrane, gam);
  const VectorField2 g = grid_.gradient(s.w);

  VectorField2 q(grid_.nodes());
  Vec r(3 * m);
  // u1-block: <N, sym grad du1>
  q.x = n.t11;
  q.y = n.t12;
  r.segment(0, m) = grid_.grad_adjoint(q);
  // u2-block
  q.x = n.t12;
  q.y = n.t22;
  r.segment(m, m) = grid_.grad_adjoint(q);
  // w-block: bending + <N, g (x) grad dw>
  q.x = n.t11.cwiseProduct(g.x) + n.t12.cwiseProduct(g.y);
  q.y = n.t12.cwiseProduct(g.x) + n.t22.cwiseProduct(g.y);
  r.segment(2 * m, m) =
      grid_.interior_weight() * bend_.apply(grid_.restrict_interior(s.w)) +
      grid_.grad_adjoint(q);
  return r - load_vector(f);
}

void Problem::residual(const PrimalState& s, const Loads& f,
                       VectorField2& membrane, ScalarField& w_block) const {
  const int m = grid_.interior();
  const Vec r = residual_weak(s, f) / grid_.interior_weight();
  membrane = VectorField2(grid_.nodes());
  membrane.x = grid_.prolong(r.segment(0, m)).v;
  membrane.y = grid_.prolong(r.segment(m, m)).v;
  w_block = grid_.prolong(r.segment(2 * m, m));
}

namespace {
using Trip = Eigen::Triplet<double>;

// stacked strain-rate map [u1; u2; w] -> (t11; t22; t12) at nodes
SpMat strain_rate_map(const Grid& grid, const VectorField2& g) {
  const int n = grid.nodes();
  const int m = grid.interior();
  SpMat gamma(3 * n, 3 * m);
  std::vector<Trip> t;
  auto add = [&](int row0, int col0, const SpMat& op, const Vec* scale,
                 double factor) {
    for (int c = 0; c < op.outerSize(); ++c)
      for (SpMat::InnerIterator it(op, c); it; ++it) {
        double v = it.value() * factor;
        if (scale) v *= (*scale)[it.row()];
        t.emplace_back(row0 + it.row(), col0 + it.col(), v);
      }
  };
  add(0, 0, grid.Gx(), nullptr, 1.0);            // t11 <- u1
  add(2 * n, 0, grid.Gy(), nullptr, 0.5);        // t12 <- u1
  add(n, m, grid.Gy(), nullptr, 1.0);            // t22 <- u2
  add(2 * n, m, grid.Gx(), nullptr, 0.5);        // t12 <- u2
  add(0, 2 * m, grid.Gx(), &g.x, 1.0);           // t11 <- w
  add(n, 2 * m, grid.Gy(), &g.y, 1.0);           // t22 <- w
  add(2 * n, 2 * m, grid.Gy(), &g.x, 0.5);       // t12 <- w
  add(2 * n, 2 * m, grid.Gx(), &g.y, 0.5);       // t12 <- w
  gamma.setFromTriplets(t.begin(), t.end());
  return gamma;
}

// weighted material pairing over stacked strain components
SpMat pairing_matrix(const Grid& grid, const Eigen::Matrix3d& reduced) {
  const Eigen::Matrix3d me = MaterialTensor::energy_form(reduced);
  const int n = grid.nodes();
  const Vec& w = grid.node_weights();
  std::vector<Trip> t;
  t.reserve(9 * n);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (me(a, b) != 0.0)
        for (int k = 0; k < n; ++k)
          t.emplace_back(a * n + k, b * n + k, w[k] * me(a, b));
  SpMat out(3 * n, 3 * n);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}
}  // namespace

SpMat Problem::w_block(const PrimalState& s) const {
  const SymTensor2Field n = membrane_stress(s);
  const Vec& w = grid_.node_weights();
  const SpMat& gx = grid_.Gx();
  const SpMat& gy = grid_.Gy();
  Vec w11 = w.cwiseProduct(n.t11);
  Vec w22 = w.cwiseProduct(n.t22);
  Vec w12 = w.cwiseProduct(n.t12);
  SpMat geo = SpMat(gx.transpose() * SpMat(w11.asDiagonal() * gx)) +
              SpMat(gy.transpose() * SpMat(w22.asDiagonal() * gy)) +
              SpMat(gx.transpose() * SpMat(w12.asDiagonal() * gy)) +
              SpMat(gy.transpose() * SpMat(w12.asDiagonal() * gx));
  return SpMat(grid_.interior_weight() * bend_.matrix()) + geo;
}

SpMat Problem::hessian_operator(const PrimalState& s) const {
  const int m = grid_.interior();
  const VectorField2 g = grid_.gradient(s.w);
  const SpMat gamma = strain_rate_map(grid_, g);
  const SpMat pair = pairing_matrix(grid_, mat_.membrane);
  SpMat h = SpMat(gamma.transpose() * SpMat(pair * gamma));

  // geometric + bending block acts on w only
  SpMat wb = w_block(s);
  std::vector<Trip> t;
  for (int c = 0; c < wb.outerSize(); ++c)
    for (SpMat::InnerIterator it(wb, c); it; ++it)
      t.emplace_back(2 * m + it.row(), 2 * m + it.col(), it.value());
  SpMat pad(3 * m, 3 * m);
  pad.setFromTriplets(t.begin(), t.end());
  return h + pad;
}

std::vector<Vec> Problem::hessian_kernel() const {
  const int m = grid_.interior();
  const Vec& k = grid_.grad_kernel();
  std::vector<Vec> out;
  if (k.size() == 0) return out;
  for (int block = 0; block < 2; ++block) {
    Vec v = Vec::Zero(3 * m);
    v.segment(block * m, m) = k;
    out.push_back(std::move(v));
  }
  return out;
}

Vec Problem::pack(const PrimalState& s) const {
  const int m = grid_.interior();
  Vec x(3 * m);
  x.segment(0, m) = grid_.restrict_interior(s.u1);
  x.segment(m, m) = grid_.restrict_interior(s.u2);
  x.segment(2 * m, m) = grid_.restrict_interior(s.w);
  return x;
}

PrimalState Problem::unpack(const Vec& x) const {
  const int m = grid_.interior();
  PrimalState s(grid_);
  s.u1 = grid_.prolong(x.segment(0, m));
  s.u2 = grid_.prolong(x.segment(m, m));
  s.w = grid_.prolong(x.segment(2 * m, m));
  return s;
}

PrimalState Problem::solve_newton(const Loads& f, const NewtonOptions& opts,
                                  std::vector<NewtonTraceRow>* trace) const {
  PrimalState state(grid_);
  const double fnorm = load_vector(f).norm();
  const double target = opts.tol * (1.0 + fnorm);

  for (int step = 1; step <= opts.continuation_steps; ++step) {
    const double frac =
        static_cast<double>(step) / opts.continuation_steps;
    const Loads fs = f.scaled(frac);
    double rnorm = residual_weak(state, fs).norm();
    int iter = 0;
    while (rnorm > target) {
      if (++iter > opts.max_iter) throw NonConvergence(step, rnorm);
      const Vec r = residual_weak(state, fs);
      SpMat h = hessian_operator(state);
      // deflate the exact flat directions; r is orthogonal to them, so the
      // penalized solve returns the minimum-norm Newton step
      const std::vector<Vec> ker = hessian_kernel();
      if (!ker.empty()) {
        const double sigma =
            h.diagonal().cwiseAbs().sum() / h.rows() + 1.0;
        std::vector<Trip> kt;
        for (const Vec& k : ker)
          for (Eigen::Index a = 0; a < k.size(); ++a)
            if (k[a] != 0.0)
              for (Eigen::Index b = 0; b < k.size(); ++b)
                if (k[b] != 0.0) kt.emplace_back(a, b, sigma * k[a] * k[b]);
        SpMat kp(h.rows(), h.cols());
        kp.setFromTriplets(kt.begin(), kt.end());
        h += kp;
      }
      Eigen::SparseLU<SpMat> lu(h);
      if (lu.info() != Eigen::Success) throw NonConvergence(step, rnorm);
      const Vec dx = lu.solve(-r);
      Vec x = pack(state);
      double alpha = 1.0;
      PrimalState cand = unpack(x + alpha * dx);
      double rc = residual_weak(cand, fs).norm();
      while (rc >= rnorm && alpha > 1e-6) {
        alpha *= opts.damping;
        cand = unpack(x + alpha * dx);
        rc = residual_weak(cand, fs).norm();
      }
      state = cand;
      rnorm = rc;
      if (trace)
        trace->push_back({step, frac, iter, rnorm, energy(state, fs)});
    }
  }
  return state;
}

Loads Problem::manufacture_loads(const PrimalState& target) const {
  const int m = grid_.interior();
  Loads zero(grid_);
  const Vec r = residual_weak(target, zero) / grid_.interior_weight();
  Loads f(grid_);
  f.p1 = grid_.prolong(r.segment(0, m));
  f.p2 = grid_.prolong(r.segment(m, m));
  f.p = grid_.prolong(r.segment(2 * m, m));
  return f;
}

}  // namespace plate
