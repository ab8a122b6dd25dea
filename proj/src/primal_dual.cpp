#include "plate/primal_dual.hpp"

#include <cmath>
#include <limits>

namespace plate::pd {

namespace {
// weak residual of the transverse block: omega*B*w + G^T W ((N - eps I) grad w)
// - omega*P over interior unknowns
Vec transverse_residual_weak(const Problem& prob, const PrimalDualPoint& p,
                             const Loads& loads) {
  const Grid& g = prob.grid();
  const VectorField2 gw = g.gradient(p.w);
  VectorField2 q(g.nodes());
  q.x = p.n.t11.cwiseProduct(gw.x) + p.n.t12.cwiseProduct(gw.y) -
        p.epsilon * gw.x;
  q.y = p.n.t12.cwiseProduct(gw.x) + p.n.t22.cwiseProduct(gw.y) -
        p.epsilon * gw.y;
  return g.interior_weight() * prob.bending().apply(g.restrict_interior(p.w)) +
         g.grad_adjoint(q) - g.interior_weight() * g.restrict_interior(loads.p);
}
}  // namespace

J3Breakdown j3(const Problem& prob, const PrimalDualPoint& p,
               const Loads& loads) {
  if (p.epsilon <= 0.0) throw ConfigError("epsilon must be positive");
  const Grid& g = prob.grid();
  const Vec wi = g.restrict_interior(p.w);
  const VectorField2 gw = g.gradient(p.w);

  J3Breakdown b;
  b.bending =
      -0.5 * g.interior_weight() * wi.dot(prob.bending().apply(wi));

  VectorField2 ng(g.nodes());
  ng.x = p.n.t11.cwiseProduct(gw.x) + p.n.t12.cwiseProduct(gw.y);
  ng.y = p.n.t12.cwiseProduct(gw.x) + p.n.t22.cwiseProduct(gw.y);
  b.gradient_form = -0.5 * (g.dot(ng, gw) - p.epsilon * g.dot(gw, gw));

  const Vec r = transverse_residual_weak(prob, p, loads);
  b.inverse_term = -0.5 / p.epsilon * r.dot(g.solve_gram(r));

  const SymTensor2Field hn = apply(prob.material().membrane_inv, p.n);
  b.constitutive = -0.5 * g.dot(hn, p.n);

  b.total = b.bending + b.gradient_form + b.inverse_term + b.constitutive;
  return b;
}

StationarityReport j3_stationarity(const Problem& prob,
                                   const PrimalDualPoint& p,
                                   const PrimalState& membrane_u,
                                   const Loads& loads, int n_dirs, Rng& rng) {
  const Grid& g = prob.grid();
  StationarityReport rep;

  const double wscale = 1.0 + std::sqrt(g.dot(p.w, p.w));
  const double t = 1e-5 * wscale;
  double acc = 0.0;
  for (int d = 0; d < n_dirs; ++d) {
    const ScalarField dir = random_clamped_field(g, rng);
    PrimalDualPoint plus = p, minus = p;
    plus.w.v = p.w.v + t * dir.v;
    minus.w.v = p.w.v - t * dir.v;
    const double der =
        (j3(prob, plus, loads).total - j3(prob, minus, loads).total) /
        (2.0 * t);
    acc += der * der;
  }
  rep.w_block = std::sqrt(acc);

  // constitutive closure Hbar N = sym grad u + 1/2 grad w (x) grad w
  const VectorField2 du1 = g.gradient(membrane_u.u1);
  const VectorField2 du2 = g.gradient(membrane_u.u2);
  const VectorField2 gw = g.gradient(p.w);
  SymTensor2Field rho = apply(prob.material().membrane_inv, p.n);
  rho.t11 -= du1.x + 0.5 * gw.x.cwiseProduct(gw.x);
  rho.t22 -= du2.y + 0.5 * gw.y.cwiseProduct(gw.y);
  rho.t12 -= 0.5 * (du1.y + du2.x) + 0.5 * gw.x.cwiseProduct(gw.y);
  rep.n_block = std::sqrt(g.dot(rho, rho));
  return rep;
}

double j3_local_concavity(const Problem& prob, const PrimalDualPoint& p,
                          const Loads& loads, int n_dirs, double radius,
                          Rng& rng) {
  const Grid& g = prob.grid();
  if (radius <= 0.0)
    radius = 1e-3 * (1.0 + std::sqrt(g.dot(p.w, p.w)) +
                     std::sqrt(g.dot(p.n, p.n)));
  const double center = j3(prob, p, loads).total;
  double worst = -std::numeric_limits<double>::infinity();
  for (int d = 0; d < n_dirs; ++d) {
    const ScalarField dw = random_clamped_field(g, rng);
    SymTensor2Field dn = project_equilibrium(g, random_tensor_field(g, rng));
    const double ns = std::sqrt(g.dot(dn, dn));
    if (ns > 1e-14) {
      dn.t11 /= ns;
      dn.t22 /= ns;
      dn.t12 /= ns;
    }
    PrimalDualPoint plus = p, minus = p;
    plus.w.v = p.w.v + radius * dw.v;
    minus.w.v = p.w.v - radius * dw.v;
    plus.n.t11 = p.n.t11 + radius * dn.t11;
    plus.n.t22 = p.n.t22 + radius * dn.t22;
    plus.n.t12 = p.n.t12 + radius * dn.t12;
    minus.n.t11 = p.n.t11 - radius * dn.t11;
    minus.n.t22 = p.n.t22 - radius * dn.t22;
    minus.n.t12 = p.n.t12 - radius * dn.t12;
    const double second = j3(prob, plus, loads).total - 2.0 * center +
                          j3(prob, minus, loads).total;
    worst = std::max(worst, second / (radius * radius));
  }
  return worst;
}

}  // namespace plate::pd
