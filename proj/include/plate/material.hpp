#pragma once

#include <Eigen/Dense>

#include "plate/fields.hpp"

namespace plate {

/// Fourth-order constitutive tensors in reduced (11, 22, 12) coordinates.
///
/// The stored 3x3 matrices hold the distinct components H_1111, H_2222,
/// H_1122, H_1112, H_2212, H_1212.  The factor-2 shear bookkeeping needed to
/// reproduce the full four-index contraction lives in apply() and
/// energy_form(), not in the storage.
struct MaterialTensor {
  Eigen::Matrix3d membrane;      // H, units force/length
  Eigen::Matrix3d bending;       // h = thickness^2/12 * H, units force*length
  Eigen::Matrix3d membrane_inv;  // Hbar
  Eigen::Matrix3d bending_inv;   // hbar
  double thickness = 0.0;
  double youngs = 0.0;
  double poisson = 0.0;

  /// Reduced matrix -> matrix of the pointwise map gamma_vec -> N_vec,
  /// absorbing the shear factor: N12 = M13 g11 + M23 g22 + 2 M33 g12.
  static Eigen::Matrix3d apply_matrix(const Eigen::Matrix3d& m) {
    Eigen::Matrix3d a = m;
    a.col(2) *= 2.0;
    return a;
  }

  /// Symmetric matrix of the quadratic energy form
  /// t : M t = t_vec^T energy_form(M) t_vec with reduced storage.
  static Eigen::Matrix3d energy_form(const Eigen::Matrix3d& m) {
    Eigen::Matrix3d a = apply_matrix(m);
    a.row(2) *= 2.0;
    return a;
  }
};

/// Plane-stress isotropic closure.  Throws ConfigError on invalid inputs.
MaterialTensor make_isotropic(double youngs, double poisson, double thickness);

/// Pointwise contraction N_ab = H_ablm gamma_lm for a reduced 3x3 matrix.
SymTensor2Field apply(const Eigen::Matrix3d& reduced,
                      const SymTensor2Field& field);

struct PosDefReport {
  bool posdef = true;
  int worst_node = -1;
  double min_eig = 0.0;
};

/// True iff the smallest eigenvalue of the 2x2 tensor exceeds `margin` at
/// every node; reports the node attaining the minimum.
PosDefReport is_posdef_field(const SymTensor2Field& field, double margin);

/// Smallest / largest 2x2 eigenvalue at one node.
inline void eig2x2(double a11, double a22, double a12, double& lo, double& hi) {
  const double tr = 0.5 * (a11 + a22);
  const double dd = 0.5 * (a11 - a22);
  const double r = std::sqrt(dd * dd + a12 * a12);
  lo = tr - r;
  hi = tr + r;
}

}  // namespace plate
