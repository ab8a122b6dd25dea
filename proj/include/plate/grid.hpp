#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>

#include "plate/fields.hpp"
#include "plate/material.hpp"

namespace plate {

using SpMat = Eigen::SparseMatrix<double>;

/// Sparse symmetric operator over interior unknowns with a lazily computed
/// LDLT factorization.
class LinearOperator {
 public:
  LinearOperator() = default;
  explicit LinearOperator(SpMat a) : a_(std::move(a)) {}

  const SpMat& matrix() const { return a_; }
  Vec apply(const Vec& x) const { return a_ * x; }
  Vec solve(const Vec& rhs) const;
  /// Dense inverse applied to a dense block of right-hand sides.
  Mat solve(const Mat& rhs) const;

 private:
  SpMat a_;
  mutable std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> fac_;
  void factorize() const;
};

/// Rectangular finite-difference mesh over [0,lx] x [0,ly] with clamped
/// boundary conditions (u_a = w = dw/dn = 0 on the boundary).
///
/// Operators are assembled as linear maps from interior unknowns to per-node
/// (or per-cell) values; dw/dn = 0 enters through reflection ghost values.
/// Field-level gradient/hessian/divergence use the stored boundary values so
/// that non-clamped inputs are still differentiated consistently.
class Grid {
 public:
  Grid(int nx, int ny, double lx, double ly);

  int nx, ny;
  double lx, ly, hx, hy;

  int nodes() const { return nx * ny; }
  int cells() const { return (nx - 1) * (ny - 1); }
  int interior() const { return (nx - 2) * (ny - 2); }

  int node(int i, int j) const { return j * nx + i; }
  bool is_boundary(int i, int j) const {
    return i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
  }
  /// Linear index among interior unknowns, -1 on the boundary.
  int interior_index(int i, int j) const {
    return is_boundary(i, j) ? -1 : (j - 1) * (nx - 2) + (i - 1);
  }
  double x(int i) const { return i * hx; }
  double y(int j) const { return j * hy; }

  /// Trapezoid quadrature weight of a node.
  double weight(int i, int j) const {
    double w = hx * hy;
    if (i == 0 || i == nx - 1) w *= 0.5;
    if (j == 0 || j == ny - 1) w *= 0.5;
    return w;
  }
  const Vec& node_weights() const { return wnode_; }

  double integrate(const ScalarField& f) const { return wnode_.dot(f.v); }
  double dot(const ScalarField& a, const ScalarField& b) const {
    return (wnode_.array() * a.v.array() * b.v.array()).sum();
  }
  double dot(const VectorField2& a, const VectorField2& b) const {
    return (wnode_.array() * (a.x.array() * b.x.array() +
                              a.y.array() * b.y.array())).sum();
  }
  /// Weighted tensor pairing A:B (the 12 component counts twice).
  double dot(const SymTensor2Field& a, const SymTensor2Field& b) const {
    return (wnode_.array() *
            (a.t11.array() * b.t11.array() + a.t22.array() * b.t22.array() +
             2.0 * a.t12.array() * b.t12.array())).sum();
  }

  // -- field-level discrete operators ---------------------------------------
  VectorField2 gradient(const ScalarField& w) const;
  ScalarField divergence(const VectorField2& q) const;
  SymTensor2Field hessian(const ScalarField& w) const;

  // -- linear maps from interior unknowns -----------------------------------
  /// Centered gradient, nodes x interior (boundary rows are zero).
  const SpMat& Gx() const { return gx_; }
  const SpMat& Gy() const { return gy_; }
  /// Second differences, nodes x interior, with reflection ghost rows on the
  /// boundary (these rows carry the clamping into the bending energy).
  const SpMat& Dxx() const { return dxx_; }
  const SpMat& Dyy() const { return dyy_; }
  /// Compact cross derivative on cell centers, cells x interior.
  const SpMat& Dxy() const { return dxy_; }

  /// G^T W G: the symmetric gradient Gram operator used as the discrete
  /// -lap in adjoint-consistent inverse solves.  On grids with both nx and
  /// ny odd the centered differences cannot see the odd-odd checkerboard
  /// mode, so the operator is positive semidefinite with the 1-dimensional
  /// kernel returned by grad_kernel().
  const SpMat& grad_gram() const { return lg_; }
  /// Normalized kernel vector of the gradient map over interior unknowns
  /// (size 0 when nx or ny is even and the map is injective).
  const Vec& grad_kernel() const { return gker_; }
  /// Minimum-norm solve of grad_gram() x = weak_rhs: the right-hand side is
  /// projected onto the range before a conjugate-gradient solve.
  Vec solve_gram(const Vec& weak_rhs) const;
  /// Weak-form adjoint: (G^T W q) over interior unknowns.
  Vec grad_adjoint(const VectorField2& q) const;
  /// Dense m x 2n map [zx; zy] -> G^T W^{1/2} z; quadratic dual forms are
  /// assembled in these sqrt(weight)-scaled coordinates.
  Mat grad_adjoint_sqrtw() const;

  /// Interior weights (hx*hy per interior node).
  double interior_weight() const { return hx * hy; }

  // -- bending / biharmonic --------------------------------------------------
  /// w |-> h_ablm w_,ablm assembled as Hess^T (bending) Hess; SPD under the
  /// clamped conditions.
  LinearOperator assemble_biharmonic(const MaterialTensor& mat) const;
  static ScalarField solve_biharmonic(const Grid& g, const LinearOperator& op,
                                      const ScalarField& rhs);

  /// 5-point Laplacian with homogeneous Dirichlet data: returns w with
  /// lap w = rhs on interior nodes.
  ScalarField solve_laplacian(const ScalarField& rhs) const;
  const LinearOperator& laplacian5() const { return lap5_; }

  // -- interior packing -------------------------------------------------------
  Vec restrict_interior(const ScalarField& f) const;
  ScalarField prolong(const Vec& interior_values) const;

  /// Strong-form rhs vector -> weak form (multiply by interior weight).
  Vec weak(const ScalarField& strong_rhs) const {
    return interior_weight() * restrict_interior(strong_rhs);
  }

  void write_csv(const std::string& path, const ScalarField& f) const;

 private:
  Vec wnode_;
  Vec gker_;
  SpMat gx_, gy_, dxx_, dyy_, dxy_, lg_;
  LinearOperator lap5_;
  void build_operators();
};

}  // namespace plate
