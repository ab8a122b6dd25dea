#include <cmath>

#include "doctest.h"
#include "plate/primal_dual.hpp"
#include "plate/scenario.hpp"

using namespace plate;

namespace {
struct Fixture {
  Problem prob;
  PrimalState u0;
  Loads loads;
  double j0;
  double eps;
  pd::PrimalDualPoint p0;

  explicit Fixture(int n = 17)
      : prob(Grid(n, n, 1.0, 1.0), make_isotropic(1000.0, 0.3, 0.2)),
        u0(scenario::compressive(prob.grid(), 0.02, 0.01)),
        loads(prob.manufacture_loads(u0)),
        j0(prob.energy(u0, loads)),
        eps(dual::epsilon_auto(prob.membrane_stress(u0))),
        p0{u0.w, prob.membrane_stress(u0), eps} {}
};
}  // namespace

TEST_CASE("breakdown terms sum to the reported total") {
  Fixture fx(9);
  const pd::J3Breakdown b = pd::j3(fx.prob, fx.p0, fx.loads);
  CHECK(b.total == doctest::Approx(b.bending + b.gradient_form +
                                   b.inverse_term + b.constitutive)
                       .epsilon(1e-14));
  CHECK_THROWS_AS(
      pd::j3(fx.prob, pd::PrimalDualPoint{fx.p0.w, fx.p0.n, 0.0}, fx.loads),
      ConfigError);
}

TEST_CASE("inverse term collapses to the gradient norm at critical points") {
  // at a critical point the weak transverse residual equals
  // -eps * (gradient Gram) * w, so the inverse term must equal
  // -(eps/2) |grad w|^2 -- an independent operator identity
  Fixture fx;
  const Grid& g = fx.prob.grid();
  const pd::J3Breakdown b = pd::j3(fx.prob, fx.p0, fx.loads);
  const VectorField2 gw = g.gradient(fx.u0.w);
  const double expected = -0.5 * fx.eps * g.dot(gw, gw);
  CHECK(b.inverse_term ==
        doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("primal-dual functional equals the energy at critical points") {
  Fixture fx;
  const double scale = 1.0 + std::abs(fx.j0);
  const pd::J3Breakdown b = pd::j3(fx.prob, fx.p0, fx.loads);
  CHECK(std::abs(b.total - fx.j0) <= 1e-10 * scale);

  // the equality survives admissible epsilon changes
  for (double factor : {1.5, 2.0}) {
    pd::PrimalDualPoint p = fx.p0;
    p.epsilon = factor * fx.eps;
    CHECK(std::abs(pd::j3(fx.prob, p, fx.loads).total - fx.j0) <=
          1e-10 * scale);
  }
}

TEST_CASE("stationarity holds at critical points and detects perturbations") {
  Fixture fx;
  const double scale = 1.0 + std::abs(fx.j0);
  Rng rng(31);
  const pd::StationarityReport at_crit =
      pd::j3_stationarity(fx.prob, fx.p0, fx.u0, fx.loads, 10, rng);
  CHECK(at_crit.w_block <= 1e-6 * scale);
  CHECK(at_crit.n_block <= 1e-10 * scale);

  pd::PrimalDualPoint p = fx.p0;
  const ScalarField bump = scenario::bump(fx.prob.grid(), 0.05);
  p.w.v += bump.v;
  const pd::StationarityReport perturbed =
      pd::j3_stationarity(fx.prob, p, fx.u0, fx.loads, 10, rng);
  CHECK(perturbed.w_block > 100.0 * std::max(at_crit.w_block, 1e-12));

  pd::PrimalDualPoint pn = fx.p0;
  pn.n.t11.array() += 0.1 * (1.0 + pn.n.t11.cwiseAbs().maxCoeff());
  const pd::StationarityReport perturbed_n =
      pd::j3_stationarity(fx.prob, pn, fx.u0, fx.loads, 2, rng);
  CHECK(perturbed_n.n_block > 100.0 * std::max(at_crit.n_block, 1e-12));
}

TEST_CASE("the functional is locally concave on the feasible set") {
  Fixture fx;
  const double scale = 1.0 + std::abs(fx.j0);
  Rng rng(32);
  const double worst =
      pd::j3_local_concavity(fx.prob, fx.p0, fx.loads, 25, 0.0, rng);
  CHECK(worst <= 1e-8 * scale);
  // the probe is a genuine second difference: it is strictly negative here
  CHECK(worst < 0.0);
}

TEST_CASE("second differences shrink at second order in the radius") {
  // the centered second difference of a smooth function approaches the true
  // curvature as the radius shrinks; two radii two octaves apart must agree
  Fixture fx(9);
  Rng rng1(33), rng2(33);  // identical direction draws
  const double c1 =
      pd::j3_local_concavity(fx.prob, fx.p0, fx.loads, 5, 1e-2, rng1);
  const double c2 =
      pd::j3_local_concavity(fx.prob, fx.p0, fx.loads, 5, 1e-4, rng2);
  CHECK(std::abs(c1 - c2) <= 1e-3 * (1.0 + std::abs(c2)));
}
