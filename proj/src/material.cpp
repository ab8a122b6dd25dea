#include "plate/material.hpp"

#include <cmath>

namespace plate {

MaterialTensor make_isotropic(double youngs, double poisson, double thickness) {
  if (youngs <= 0.0)
    throw ConfigError("youngs modulus must be positive");
  if (thickness <= 0.0)
    throw ConfigError("thickness must be positive");
  if (poisson < 0.0 || poisson >= 0.5)
    throw ConfigError("poisson ratio must lie in [0, 0.5)");

  MaterialTensor m;
  m.youngs = youngs;
  m.poisson = poisson;
  m.thickness = thickness;

  const double c = youngs * thickness / (1.0 - poisson * poisson);
  m.membrane.setZero();
  m.membrane(0, 0) = c;
  m.membrane(1, 1) = c;
  m.membrane(0, 1) = m.membrane(1, 0) = c * poisson;
  m.membrane(2, 2) = c * (1.0 - poisson) / 2.0;

  m.bending = (thickness * thickness / 12.0) * m.membrane;
  // reduced storage of the inverse TENSOR: apply(inv) must undo apply(fwd),
  // and apply doubles the shear column, so inv = D^-1 fwd^-1 D^-1 with
  // D = diag(1,1,2)
  const Eigen::Vector3d dinv(1.0, 1.0, 0.5);
  m.membrane_inv =
      dinv.asDiagonal() * m.membrane.inverse() * dinv.asDiagonal();
  m.bending_inv = dinv.asDiagonal() * m.bending.inverse() * dinv.asDiagonal();
  return m;
}

SymTensor2Field apply(const Eigen::Matrix3d& reduced,
                      const SymTensor2Field& f) {
  const Eigen::Matrix3d a = MaterialTensor::apply_matrix(reduced);
  SymTensor2Field out(f.size());
  out.t11 = a(0, 0) * f.t11 + a(0, 1) * f.t22 + a(0, 2) * f.t12;
  out.t22 = a(1, 0) * f.t11 + a(1, 1) * f.t22 + a(1, 2) * f.t12;
  out.t12 = a(2, 0) * f.t11 + a(2, 1) * f.t22 + a(2, 2) * f.t12;
  return out;
}

PosDefReport is_posdef_field(const SymTensor2Field& field, double margin) {
  PosDefReport rep;
  rep.min_eig = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < field.size(); ++k) {
    double lo, hi;
    eig2x2(field.t11[k], field.t22[k], field.t12[k], lo, hi);
    if (lo < rep.min_eig) {
      rep.min_eig = lo;
      rep.worst_node = static_cast<int>(k);
    }
  }
  rep.posdef = rep.min_eig > margin;
  return rep;
}

}  // namespace plate
