#pragma once

#include <vector>

#include "plate/grid.hpp"
#include "plate/material.hpp"

namespace plate {

/// Midsurface displacement fields; all three satisfy their clamped
/// boundary conditions (boundary entries stay zero).
struct PrimalState {
  ScalarField u1, u2, w;
  PrimalState() = default;
  explicit PrimalState(const Grid& g)
      : u1(g.nodes()), u2(g.nodes()), w(g.nodes()) {}
};

struct Loads {
  ScalarField p, p1, p2;  // transverse, in-plane x1, in-plane x2
  Loads() = default;
  explicit Loads(const Grid& g)
      : p(g.nodes()), p1(g.nodes()), p2(g.nodes()) {}
  Loads scaled(double s) const {
    Loads out = *this;
    out.p.v *= s;
    out.p1.v *= s;
    out.p2.v *= s;
    return out;
  }
};

struct NewtonOptions {
  double tol = 1e-12;
  int max_iter = 40;
  int continuation_steps = 10;
  double damping = 0.5;
};

struct NewtonTraceRow {
  int step;
  double load_fraction;
  int newton_iter;
  double residual_norm;
  double energy;
};

/// Plate problem on a fixed grid and material: discrete energy, its exact
/// gradient and Hessian over interior unknowns, and the Newton driver.
///
/// The residual is assembled with the adjoint of the same difference
/// operators that define the energy, so it IS the gradient of the discrete
/// energy (enforced by the finite-difference tests).
class Problem {
 public:
  Problem(Grid grid, MaterialTensor mat);

  const Grid& grid() const { return grid_; }
  const MaterialTensor& material() const { return mat_; }
  /// Strong-form biharmonic operator w -> h_ablm w_,ablm.
  const LinearOperator& bending() const { return bend_; }

  SymTensor2Field membrane_strain(const PrimalState& s) const;
  SymTensor2Field membrane_stress(const PrimalState& s) const {
    return apply(mat_.membrane, membrane_strain(s));
  }

  double energy(const PrimalState& s, const Loads& f) const;

  /// Exact gradient of energy() over the packed interior unknowns
  /// [u1; u2; w] (weak form, quadrature weights included).
  Vec residual_weak(const PrimalState& s, const Loads& f) const;
  /// Strong-form residual fields (weak form divided by the cell area).
  void residual(const PrimalState& s, const Loads& f, VectorField2& membrane,
                ScalarField& bending_block) const;

  /// Second variation of the energy at `s` (symmetric sparse, weak form).
  SpMat hessian_operator(const PrimalState& s) const;
  /// Exact flat directions of the discrete energy (grid.grad_kernel() copied
  /// into the u1 and u2 blocks); the Hessian annihilates them at every state,
  /// so Newton solves and definiteness tests deflate them.
  std::vector<Vec> hessian_kernel() const;
  /// w-block of the second variation (bending + geometric stiffness).
  SpMat w_block(const PrimalState& s) const;

  PrimalState solve_newton(const Loads& f, const NewtonOptions& opts,
                           std::vector<NewtonTraceRow>* trace = nullptr) const;

  /// Loads that make `target` an exact discrete critical point.
  Loads manufacture_loads(const PrimalState& target) const;

  // interior packing of states
  Vec pack(const PrimalState& s) const;
  PrimalState unpack(const Vec& dofs) const;
  int dof_count() const { return 3 * grid_.interior(); }

  /// Weak load vector (gradient of the external-work term).
  Vec load_vector(const Loads& f) const;

 private:
  Grid grid_;
  MaterialTensor mat_;
  LinearOperator bend_;
};

}  // namespace plate
