#pragma once

#include "plate/dual1.hpp"
#include "plate/sampling.hpp"

namespace plate::pd {

/// Argument pair of the primal-dual functional.
struct PrimalDualPoint {
  ScalarField w;
  SymTensor2Field n;
  double epsilon = 0.0;
};

struct J3Breakdown {
  double bending = 0.0;       // -1/2 int h w,ab w,lm
  double gradient_form = 0.0; // -1/2 int (N - eps I) grad w . grad w
  double inverse_term = 0.0;  // -1/(2 eps) <(-lap)^{-1} r, r>
  double constitutive = 0.0;  // -1/2 int Hbar N : N
  double total = 0.0;
};

/// The four quadrature terms of the primal-dual functional and their sum.
/// r is the strong-form transverse residual B w - div((N - eps I) grad w) - P;
/// the (-lap)^{-1} uses the adjoint-consistent gradient Gram operator
/// (minimum-norm solve across its checkerboard kernel).
J3Breakdown j3(const Problem& prob, const PrimalDualPoint& p,
               const Loads& loads);

struct StationarityReport {
  double w_block = 0.0;  // norm of FD directional derivatives over w
  double n_block = 0.0;  // constitutive closure residual norm
};

/// Stationarity of the augmented functional at (w, N): the w-block probes
/// j3 along random clamped directions (the augmentation carries no w); the
/// N-block is the pointwise residual of Hbar N = sym grad u + 1/2 grad w (x)
/// grad w, the derivative of j3 + <sym grad u, N> - <u, P_a> in N.
StationarityReport j3_stationarity(const Problem& prob,
                                   const PrimalDualPoint& p,
                                   const PrimalState& membrane_u,
                                   const Loads& loads, int n_dirs, Rng& rng);

/// Maximum centered second difference of j3 over random joint directions
/// (dw, dN), with dN projected onto the equilibrium-preserving subspace so
/// the probes stay inside the feasible stress set.
double j3_local_concavity(const Problem& prob, const PrimalDualPoint& p,
                          const Loads& loads, int n_dirs, double radius,
                          Rng& rng);

}  // namespace plate::pd
