#include <cmath>

#include "doctest.h"
#include "plate/dual1.hpp"
#include "plate/sampling.hpp"
#include "plate/scenario.hpp"

using namespace plate;

namespace {

struct Fixture {
  Problem prob;
  PrimalState u0;
  Loads loads;
  double j0;
  double eps;
  dual::DualState d0;

  explicit Fixture(int n = 17, double c = 0.02, double w_amp = 0.01)
      : prob(Grid(n, n, 1.0, 1.0), make_isotropic(1000.0, 0.3, 0.2)),
        u0(scenario::compressive(prob.grid(), c, w_amp)),
        loads(prob.manufacture_loads(u0)),
        j0(prob.energy(u0, loads)),
        eps(dual::epsilon_auto(prob.membrane_stress(u0))),
        d0(dual::transfer(prob, u0, eps)) {}
};

SymTensor2Field posdef_random_k(const Grid& g, Rng& rng) {
  // K = -N + eps I with a compressive random N: always positive definite
  SymTensor2Field k = random_tensor_field(g, rng);
  const double shift =
      2.0 * (k.t11.cwiseAbs().maxCoeff() + k.t22.cwiseAbs().maxCoeff() +
             k.t12.cwiseAbs().maxCoeff()) +
      1.0;
  k.t11.array() += shift;
  k.t22.array() += shift;
  return k;
}

}  // namespace

TEST_CASE("pointwise shifted inverse solves K v = z") {
  const Grid g(9, 9, 1.0, 1.0);
  Rng rng(21);
  const SymTensor2Field k = posdef_random_k(g, rng);
  const VectorField2 z = random_vector_field(g, rng);
  const VectorField2 v = dual::apply_inverse(k, z);
  for (int i = 0; i < g.nodes(); ++i) {
    CHECK(k.t11[i] * v.x[i] + k.t12[i] * v.y[i] ==
          doctest::Approx(z.x[i]).epsilon(1e-12));
    CHECK(k.t12[i] * v.x[i] + k.t22[i] * v.y[i] ==
          doctest::Approx(z.y[i]).epsilon(1e-12));
  }

  SymTensor2Field bad(1);
  bad.t11 << 1.0;
  bad.t22 << -1.0;
  bad.t12 << 0.0;
  VectorField2 one(1);
  CHECK_THROWS_AS(dual::apply_inverse(bad, one), NotPosDef);
}

TEST_CASE("F* equals its defining supremum") {
  const Grid g(9, 9, 1.0, 1.0);
  const Problem prob(g, make_isotropic(1000.0, 0.3, 0.2));
  Rng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    SymTensor2Field n = random_tensor_field(g, rng);
    const double eps = dual::epsilon_auto(n);
    const VectorField2 zstar = random_vector_field(g, rng);
    const SymTensor2Field k = dual::shifted(n, eps);
    const double val = dual::fstar(prob, zstar, n, eps);

    // stationarity solve of sup_v <v,z*> - 1/2 int K v . v
    const VectorField2 vhat = dual::apply_inverse(k, zstar);
    VectorField2 kv(g.nodes());
    kv.x = k.t11.cwiseProduct(vhat.x) + k.t12.cwiseProduct(vhat.y);
    kv.y = k.t12.cwiseProduct(vhat.x) + k.t22.cwiseProduct(vhat.y);
    const double at_max = g.dot(vhat, zstar) - 0.5 * g.dot(kv, vhat);
    CHECK(std::abs(val - at_max) <= 1e-9 * (1.0 + std::abs(at_max)));

    // no sampled direction beats the stationary value
    for (int s = 0; s < 5; ++s) {
      const VectorField2 v = random_vector_field(g, rng);
      VectorField2 kv2(g.nodes());
      kv2.x = k.t11.cwiseProduct(v.x) + k.t12.cwiseProduct(v.y);
      kv2.y = k.t12.cwiseProduct(v.x) + k.t22.cwiseProduct(v.y);
      CHECK(g.dot(v, zstar) - 0.5 * g.dot(kv2, v) <=
            val + 1e-10 * (1.0 + std::abs(val)));
    }
  }
}

TEST_CASE("G2* equals its defining supremum over clamped deflections") {
  Fixture fx(9);
  const Grid& g = fx.prob.grid();
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const VectorField2 zstar = random_vector_field(g, rng);
    const VectorField2 q = random_vector_field(g, rng);
    const double val = dual::g2star(fx.prob, fx.loads, zstar, q);

    VectorField2 zq(g.nodes());
    zq.x = zstar.x + q.x;
    zq.y = zstar.y + q.y;
    const Vec rhs = g.grad_adjoint(zq) + g.weak(fx.loads.p);
    auto objective = [&](const Vec& wi) {
      return wi.dot(rhs) - 0.5 * g.interior_weight() *
                               wi.dot(fx.prob.bending().apply(wi));
    };
    // independent stationarity solve of the concave inner problem
    const Vec what = fx.prob.bending().solve(rhs) / g.interior_weight();
    const double at_max = objective(what);
    CHECK(std::abs(val - at_max) <= 1e-9 * (1.0 + std::abs(at_max)));
    for (int s = 0; s < 5; ++s)
      CHECK(objective(g.restrict_interior(random_clamped_field(g, rng))) <=
            val + 1e-10 * (1.0 + std::abs(val)));
  }
}

TEST_CASE("Gtilde1* equals its closed form and defining supremum") {
  Fixture fx(9);
  const Grid& g = fx.prob.grid();
  const MaterialTensor& mat = fx.prob.material();
  Rng rng(24);
  for (int trial = 0; trial < 10; ++trial) {
    const VectorField2 q = random_vector_field(g, rng);
    const SymTensor2Field n = random_tensor_field(g, rng);
    const double eps = 0.3 + 0.1 * trial;
    const double val = dual::g1star_tilde(fx.prob, q, n, eps);

    const SymTensor2Field hn = apply(mat.membrane_inv, n);
    const double closed =
        0.5 / eps * g.dot(q, q) + 0.5 * g.dot(hn, n);
    CHECK(std::abs(val - closed) <= 1e-9 * (1.0 + std::abs(closed)));

    // supremum over (v, tau) of <v,-Q> + <tau,N> - eps/2 |v|^2 - 1/2 H tau:tau
    // attained at v = -Q/eps, tau = Hbar N
    VectorField2 vhat(g.nodes());
    vhat.x = -q.x / eps;
    vhat.y = -q.y / eps;
    VectorField2 mq(g.nodes());
    mq.x = -q.x;
    mq.y = -q.y;
    const double at_max = g.dot(vhat, mq) - 0.5 * eps * g.dot(vhat, vhat) +
                          g.dot(hn, n) -
                          0.5 * g.dot(apply(mat.membrane, hn), hn);
    CHECK(std::abs(val - at_max) <= 1e-9 * (1.0 + std::abs(at_max)));
  }
}

TEST_CASE("transfer equations satisfy their pointwise identities") {
  Fixture fx;
  const Grid& g = fx.prob.grid();
  const VectorField2 gw = g.gradient(fx.u0.w);
  const SymTensor2Field n = fx.d0.n;
  for (int i = 0; i < g.nodes(); ++i) {
    // z* + Q = -N grad w
    CHECK(fx.d0.zstar.x[i] + fx.d0.q.x[i] ==
          doctest::Approx(-(n.t11[i] * gw.x[i] + n.t12[i] * gw.y[i]))
              .epsilon(1e-11));
    CHECK(fx.d0.zstar.y[i] + fx.d0.q.y[i] ==
          doctest::Approx(-(n.t12[i] * gw.x[i] + n.t22[i] * gw.y[i]))
              .epsilon(1e-11));
    // Q = -eps grad w
    CHECK(fx.d0.q.x[i] == doctest::Approx(-fx.eps * gw.x[i]).epsilon(1e-12));
  }
}

TEST_CASE("qualified critical point has zero duality gap") {
  Fixture fx;
  const dual::MembershipReport rep =
      dual::membership(fx.prob, fx.loads, fx.d0.n, fx.eps);
  REQUIRE(rep.in_Astar);
  CHECK(rep.k_min_eig > 0.0);
  CHECK(rep.jhat_min > 0.0);

  const double scale = 1.0 + std::abs(fx.j0);
  const double js = dual::jstar(fx.prob, fx.loads, fx.d0);
  CHECK(std::abs(fx.j0 - js) <= 1e-10 * scale);

  const dual::JTildeResult jt =
      dual::jtilde(fx.prob, fx.loads, fx.d0.q, fx.d0.n, fx.eps);
  CHECK(std::abs(fx.j0 - jt.value) <= 1e-10 * scale);
  // the inner minimizer recovers the transferred z*
  const double znorm = std::sqrt(fx.prob.grid().dot(fx.d0.zstar, fx.d0.zstar));
  VectorField2 dz(fx.prob.grid().nodes());
  dz.x = jt.zstar.x - fx.d0.zstar.x;
  dz.y = jt.zstar.y - fx.d0.zstar.y;
  CHECK(std::sqrt(fx.prob.grid().dot(dz, dz)) <= 1e-7 * (1.0 + znorm));
}

TEST_CASE("Jtilde* is the infimum of J* over z*") {
  Fixture fx(9);
  Rng rng(25);
  const dual::JTildeResult jt =
      dual::jtilde(fx.prob, fx.loads, fx.d0.q, fx.d0.n, fx.eps);
  for (int s = 0; s < 10; ++s) {
    dual::DualState d = fx.d0;
    const VectorField2 dz = random_vector_field(fx.prob.grid(), rng);
    d.zstar.x += 0.1 * dz.x;
    d.zstar.y += 0.1 * dz.y;
    CHECK(dual::jstar(fx.prob, fx.loads, d) >=
          jt.value - 1e-10 * (1.0 + std::abs(jt.value)));
  }
}

TEST_CASE("gap is invariant under admissible epsilon changes") {
  Fixture fx;
  const double scale = 1.0 + std::abs(fx.j0);
  // factors move epsilon upward: the automatic value sits just above the
  // positivity threshold, so smaller shifts would leave the admissible set
  for (double factor : {1.0, 1.5, 2.0, 4.0}) {
    const double eps = factor * fx.eps;
    const dual::DualState d = dual::transfer(fx.prob, fx.u0, eps);
    REQUIRE(dual::membership(fx.prob, fx.loads, d.n, eps).in_Astar);
    CHECK(std::abs(fx.j0 - dual::jstar(fx.prob, fx.loads, d)) <=
          1e-10 * scale);
  }
}

TEST_CASE("weak duality: dual values never exceed sampled primal energies") {
  Fixture fx(9);
  const Grid& g = fx.prob.grid();
  Rng rng(26);
  // dual pairs near the certificate, kept inside A* by projecting the
  // stress perturbation onto the equilibrium subspace
  std::vector<dual::DualState> duals;
  for (int k = 0; k < 3; ++k) {
    dual::DualState d = fx.d0;
    const VectorField2 dq = random_vector_field(g, rng);
    d.q.x += 0.05 * dq.x;
    d.q.y += 0.05 * dq.y;
    SymTensor2Field dn = project_equilibrium(g, random_tensor_field(g, rng));
    d.n.t11 += 0.01 * dn.t11;
    d.n.t22 += 0.01 * dn.t22;
    d.n.t12 += 0.01 * dn.t12;
    REQUIRE(dual::membership(fx.prob, fx.loads, d.n, d.epsilon).in_Astar);
    duals.push_back(d);
  }
  for (int s = 0; s < 10; ++s) {
    PrimalState u = random_state(g, rng);
    const Vec x0 = fx.prob.pack(fx.u0);
    const Vec xu = fx.prob.pack(u);
    u = fx.prob.unpack(x0 + 0.3 * xu);
    const double ju = fx.prob.energy(u, fx.loads);
    for (const dual::DualState& d : duals) {
      const double jt =
          dual::jtilde(fx.prob, fx.loads, d.q, d.n, d.epsilon).value;
      CHECK(jt <= ju + 1e-10 * (1.0 + std::abs(ju)));
    }
  }
}

TEST_CASE("membership failure modes are reported, never silently passed") {
  Fixture fx(9);
  const Grid& g = fx.prob.grid();

  SUBCASE("tensile stress breaks the shifted positivity") {
    SymTensor2Field n(g.nodes());
    n.t11.setConstant(2.0 * fx.eps);
    n.t22.setConstant(2.0 * fx.eps);
    n.t12.setZero();
    const dual::MembershipReport rep =
        dual::membership(fx.prob, fx.loads, n, fx.eps);
    CHECK(rep.k_min_eig < 0.0);
    CHECK_FALSE(rep.in_Bstar);
    CHECK_FALSE(rep.in_Astar);
  }
  SUBCASE("compression beyond buckling breaks the quadratic form") {
    // scale stress and loads together: equilibrium survives, but the
    // compression passes the buckling threshold and B* fails
    const double alpha = 1e4;
    SymTensor2Field n = fx.d0.n;
    n.t11 *= alpha;
    n.t22 *= alpha;
    n.t12 *= alpha;
    const Loads loads = fx.loads.scaled(alpha);
    const double eps = dual::epsilon_auto(n);
    const dual::MembershipReport rep =
        dual::membership(fx.prob, loads, n, eps);
    CHECK(rep.k_min_eig > 0.0);
    CHECK(rep.jhat_min < 0.0);
    CHECK_FALSE(rep.in_Bstar);
    CHECK(rep.in_Cstar);
    CHECK_FALSE(rep.in_Astar);
    CHECK_THROWS_AS(dual::jtilde(fx.prob, loads, fx.d0.q, n, eps),
                    IndefiniteInnerProblem);
  }
  SUBCASE("random stress violates equilibrium") {
    Rng rng(27);
    const SymTensor2Field n = random_tensor_field(g, rng);
    const dual::MembershipReport rep =
        dual::membership(fx.prob, fx.loads, n, dual::epsilon_auto(n));
    CHECK_FALSE(rep.in_Cstar);
    CHECK(rep.equilibrium_residual > 1e-3);
  }
}

TEST_CASE("automatic epsilon is always admissible for the shift") {
  Rng rng(28);
  const Grid g(9, 9, 1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const SymTensor2Field n = random_tensor_field(g, rng);
    const double eps = dual::epsilon_auto(n);
    const PosDefReport rep = is_posdef_field(dual::shifted(n, eps), 0.0);
    CHECK(rep.posdef);
  }
  CHECK(dual::epsilon_auto(SymTensor2Field(5)) == 1.0);
}
