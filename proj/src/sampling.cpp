#include "plate/sampling.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <vector>

namespace plate {

namespace {
Vec uniform_vec(Eigen::Index n, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}
}  // namespace

ScalarField random_clamped_field(const Grid& grid, Rng& rng) {
  ScalarField f = grid.prolong(uniform_vec(grid.interior(), rng));
  f.v /= std::sqrt(grid.dot(f, f));
  return f;
}

VectorField2 random_vector_field(const Grid& grid, Rng& rng) {
  VectorField2 q(grid.nodes());
  q.x = uniform_vec(grid.nodes(), rng);
  q.y = uniform_vec(grid.nodes(), rng);
  const double s = std::sqrt(grid.dot(q, q));
  q.x /= s;
  q.y /= s;
  return q;
}

SymTensor2Field random_tensor_field(const Grid& grid, Rng& rng) {
  SymTensor2Field t(grid.nodes());
  t.t11 = uniform_vec(grid.nodes(), rng);
  t.t22 = uniform_vec(grid.nodes(), rng);
  t.t12 = uniform_vec(grid.nodes(), rng);
  const double s = std::sqrt(grid.dot(t, t));
  t.t11 /= s;
  t.t22 /= s;
  t.t12 /= s;
  return t;
}

PrimalState random_state(const Grid& grid, Rng& rng) {
  PrimalState s(grid);
  s.u1 = grid.prolong(uniform_vec(grid.interior(), rng));
  s.u2 = grid.prolong(uniform_vec(grid.interior(), rng));
  s.w = grid.prolong(uniform_vec(grid.interior(), rng));
  const double norm = std::sqrt(s.u1.v.squaredNorm() + s.u2.v.squaredNorm() +
                                s.w.v.squaredNorm());
  s.u1.v /= norm;
  s.u2.v /= norm;
  s.w.v /= norm;
  return s;
}

namespace {
// weak divergence of a tensor field: the two blocks G^T W (N row_a)
Vec weak_divergence(const Grid& g, const SymTensor2Field& n) {
  const int m = g.interior();
  VectorField2 row(g.nodes());
  Vec out(2 * m);
  row.x = n.t11;
  row.y = n.t12;
  out.segment(0, m) = g.grad_adjoint(row);
  row.x = n.t12;
  row.y = n.t22;
  out.segment(m, m) = g.grad_adjoint(row);
  return out;
}
}  // namespace

double equilibrium_defect(const Grid& grid, const SymTensor2Field& n) {
  return weak_divergence(grid, n).norm();
}

SymTensor2Field project_equilibrium(const Grid& grid,
                                    const SymTensor2Field& dn) {
  const int m = grid.interior();
  const SpMat& gx = grid.Gx();
  const SpMat& gy = grid.Gy();
  const Vec& w = grid.node_weights();

  // normal equations A Wt^{-1} A^T lambda = A dn, where A is the weak
  // divergence and Wt the quadrature metric on tensor fields (the shear
  // component counts twice)
  SpMat wgx = SpMat(w.asDiagonal() * gx);
  SpMat wgy = SpMat(w.asDiagonal() * gy);
  SpMat s11 = SpMat(gx.transpose() * wgx) + 0.5 * SpMat(gy.transpose() * wgy);
  SpMat s22 = SpMat(gy.transpose() * wgy) + 0.5 * SpMat(gx.transpose() * wgx);
  SpMat s12 = 0.5 * SpMat(gy.transpose() * wgx);

  std::vector<Eigen::Triplet<double>> t;
  auto add = [&](const SpMat& blk, int r0, int c0) {
    for (int c = 0; c < blk.outerSize(); ++c)
      for (SpMat::InnerIterator it(blk, c); it; ++it)
        t.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
  };
  add(s11, 0, 0);
  add(s22, m, m);
  add(s12, 0, m);
  add(SpMat(s12.transpose()), m, 0);
  SpMat sys(2 * m, 2 * m);
  sys.setFromTriplets(t.begin(), t.end());

  // the system inherits the checkerboard kernel of the centered gradient;
  // the right-hand side is always consistent, so CG converges to a solution
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg(sys);
  cg.setTolerance(1e-14);
  cg.setMaxIterations(100 * m);
  const Vec rhs = weak_divergence(grid, dn);
  const Vec lam = cg.solve(rhs);

  SymTensor2Field out = dn;
  const Vec l1 = lam.segment(0, m);
  const Vec l2 = lam.segment(m, m);
  out.t11 -= gx * l1;
  out.t22 -= gy * l2;
  out.t12 -= 0.5 * (gy * l1 + gx * l2);
  return out;
}

}  // namespace plate
