#include "plate/scenario.hpp"

#include <cmath>

namespace plate::scenario {

namespace {
// remove the component along the checkerboard flat direction
void deflate(const Grid& g, ScalarField& f) {
  const Vec& k = g.grad_kernel();
  if (k.size() == 0) return;
  Vec vi = g.restrict_interior(f);
  vi -= k.dot(vi) * k;
  f = g.prolong(vi);
}
}  // namespace

ScalarField bump(const Grid& g, double amp) {
  ScalarField f(g.nodes());
  double peak = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double sx = g.x(i) / g.lx, sy = g.y(j) / g.ly;
      const double v = sx * sx * (1.0 - sx) * (1.0 - sx) * sy * sy *
                       (1.0 - sy) * (1.0 - sy);
      f.v[g.node(i, j)] = v;
      peak = std::max(peak, v);
    }
  f.v *= amp / peak;
  return f;
}

PrimalState small_load(const Grid& g, double w_amp) {
  PrimalState s(g);
  s.w = bump(g, w_amp);
  deflate(g, s.w);
  return s;
}

PrimalState compressive(const Grid& g, double c, double w_amp) {
  PrimalState s(g);
  // u_a pull toward the center: the strain is compressive over the bulk,
  // with the tension any clamped in-plane field must carry confined to
  // boundary layers
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double sx = g.x(i) / g.lx, sy = g.y(j) / g.ly;
      const int k = g.node(i, j);
      // -sin(pi t) * (t - 1/2)-like odd fields: du/dx < 0 in the middle
      s.u1.v[k] = -c * g.lx * std::sin(M_PI * sx) * (sx - 0.5) *
                  std::sin(M_PI * sy);
      s.u2.v[k] = -c * g.ly * std::sin(M_PI * sy) * (sy - 0.5) *
                  std::sin(M_PI * sx);
    }
  s.w = bump(g, w_amp);
  deflate(g, s.u1);
  deflate(g, s.u2);
  deflate(g, s.w);
  return s;
}

PrimalState flat_compressed(const Grid& g, double c) {
  PrimalState s = compressive(g, c, 0.0);
  s.w.v.setZero();
  return s;
}

PrimalState make_target(const std::string& name, const Grid& g, double c,
                        double w_amp) {
  if (name == "zero") return PrimalState(g);
  if (name == "small_load" || name == "bump") return small_load(g, w_amp);
  if (name == "compressive") return compressive(g, c, w_amp);
  if (name == "flat_compressed") return flat_compressed(g, c);
  throw ConfigError("unknown scenario target: " + name);
}

}  // namespace plate::scenario
