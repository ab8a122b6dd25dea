#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace plate {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when a conjugate functional is evaluated outside its
/// positive-definiteness domain (the supremum is +inf there).
struct NotPosDef : std::runtime_error {
  int node;
  double eig;
  NotPosDef(int node_, double eig_)
      : std::runtime_error("tensor field not positive definite at node " +
                           std::to_string(node_) +
                           " (min eigenvalue " + std::to_string(eig_) + ")"),
        node(node_), eig(eig_) {}
};

struct IndefiniteInnerProblem : std::runtime_error {
  IndefiniteInnerProblem()
      : std::runtime_error("inner minimization system is not positive "
                           "definite (N is outside B*)") {}
};

struct NonConvergence : std::runtime_error {
  int step;
  double residual_norm;
  NonConvergence(int step_, double rnorm)
      : std::runtime_error("Newton failed to converge at continuation step " +
                           std::to_string(step_) + ", residual " +
                           std::to_string(rnorm)),
        step(step_), residual_norm(rnorm) {}
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One value per grid node, row-major over (j,i).
struct ScalarField {
  Vec v;
  ScalarField() = default;
  explicit ScalarField(Eigen::Index n) : v(Vec::Zero(n)) {}
  Eigen::Index size() const { return v.size(); }
};

/// Two values per node (components along x1, x2).
struct VectorField2 {
  Vec x, y;
  VectorField2() = default;
  explicit VectorField2(Eigen::Index n) : x(Vec::Zero(n)), y(Vec::Zero(n)) {}
  Eigen::Index size() const { return x.size(); }
};

/// Symmetric 2x2 tensor per node, reduced storage (11, 22, 12).
struct SymTensor2Field {
  Vec t11, t22, t12;
  SymTensor2Field() = default;
  explicit SymTensor2Field(Eigen::Index n)
      : t11(Vec::Zero(n)), t22(Vec::Zero(n)), t12(Vec::Zero(n)) {}
  Eigen::Index size() const { return t11.size(); }
};

}  // namespace plate
