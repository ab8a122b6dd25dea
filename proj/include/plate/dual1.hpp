#pragma once

#include "plate/primal.hpp"

namespace plate::dual {

/// Dual fields of the first duality principle.
struct DualState {
  VectorField2 zstar;  // force/length
  VectorField2 q;      // force/length
  SymTensor2Field n;   // membrane stress resultant
  double epsilon = 0.0;
};

struct MembershipReport {
  bool in_Bstar = false;
  bool in_Cstar = false;
  bool in_Astar = false;
  double k_min_eig = 0.0;   // min node eigenvalue of K = -N + eps I
  double jhat_min = 0.0;    // smallest eigenvalue of the Jhat* quadratic form
  double equilibrium_residual = 0.0;
};

/// K = -N + eps I as a tensor field.
SymTensor2Field shifted(const SymTensor2Field& n, double eps);

/// Pointwise 2x2 solve K v = z (throws NotPosDef if K fails the margin test).
VectorField2 apply_inverse(const SymTensor2Field& k, const VectorField2& z);

/// F*(z*) = 1/2 int Kbar z* z*; +inf (refused) outside the posdef domain.
double fstar(const Problem& prob, const VectorField2& zstar,
             const SymTensor2Field& n, double eps);

/// G2*(z*,Q) with the transverse load P in the supremum.
double g2star(const Problem& prob, const Loads& loads,
              const VectorField2& zstar, const VectorField2& q);

/// Load-free quadratic part of G2*, used by the B* test functional.
double g2star_quadratic(const Problem& prob, const VectorField2& zstar);

/// Gtilde1*(-Q,N) = 1/(2 eps) int |Q|^2 + 1/2 int Hbar N : N.
double g1star_tilde(const Problem& prob, const VectorField2& q,
                    const SymTensor2Field& n, double eps);

double jstar(const Problem& prob, const Loads& loads, const DualState& d);

struct JTildeResult {
  double value;
  VectorField2 zstar;  // inner minimizer
};

/// Jtilde*(Q,N) = inf over z* of J*(z*,Q,N); solves the quadratic
/// stationarity system (throws IndefiniteInnerProblem when N is outside B*).
JTildeResult jtilde(const Problem& prob, const Loads& loads,
                    const VectorField2& q, const SymTensor2Field& n,
                    double eps);

/// Transfer equations z0* = K grad w0, Q0 = -eps grad w0, N0 = H gamma(u0).
DualState transfer(const Problem& prob, const PrimalState& state, double eps);

MembershipReport membership(const Problem& prob, const Loads& loads,
                            const SymTensor2Field& n, double eps,
                            double ctol = 1e-8);

/// Default shift: just above the smallest value keeping K positive definite.
double epsilon_auto(const SymTensor2Field& n);

/// Dense symmetric matrix of the Jhat* quadratic form in sqrt(weight)-scaled
/// coordinates [zx; zy]; its eigenvalues decide B*.
Mat jhat_form_matrix(const Problem& prob, const SymTensor2Field& n,
                     double eps);

}  // namespace plate::dual
