#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "plate/dual1.hpp"
#include "plate/sampling.hpp"

namespace plate::multi {

struct MultiDualConfig {
  double k_shift = 0.0;  // 0 -> auto: margin above sup lambda_max(2 N0)
  double r = 0.0;        // ball radii for sampled extremality (0 -> auto)
  double r1 = 0.0;
  double r2 = 0.0;
  int n_samples = 200;
  double eig_tol = 1e-10;
  int k_sweep_len = 6;
  unsigned long long seed = 20240913ULL;
};

struct J1Breakdown {
  double bending = 0.0;       // 1/2 int h w,ab w,lm
  double load_w = 0.0;        // -<P, w>
  double q_quad = 0.0;        // 1/2 int (-N + K I)^{-1} Q . Q
  double q_pair = 0.0;        // -<grad w, Q>
  double grad_quad = 0.0;     // K/2 int |grad w|^2
  double constitutive = 0.0;  // -1/2 int Hbar N : N
  double equil_pair = 0.0;    // -<div N + P_a, u_a> = <N, sym grad u> - <u, P_a>
  double total = 0.0;
};

struct SupNResult {
  SymTensor2Field n;
  int fallback_nodes = 0;           // nodes needing the projection guard
  double stationarity_residual = 0.0;
};

struct KFitResult {
  std::vector<double> k_values;
  std::vector<double> error_norms;  // sup-node |Hess - (-N0 + K I)^{-1}|
  double slope = 0.0;               // fitted log-log slope, expect about -2
};

struct CaseReport {
  std::string case_tag;  // "min", "saddle-qualified", "max", "unclassified"
  double k_shift = 0.0;
  double hess_min_eig = 0.0;  // deflated across the exact flat directions
  double hess_max_eig = 0.0;
  bool in_Cstar4 = false;  // pointwise -N + K I > (K/2) I
  bool in_Bstar4 = false;  // membrane equilibrium div N + P_a = 0
  bool in_Estar = false;
  bool in_Dplus = false;
  bool in_Dminus = false;
  bool in_Aplus = false;
  bool in_Aminus = false;
  double cstar4_margin = 0.0;          // min over nodes of K/2 - lambda_max(N)
  double equilibrium_residual = 0.0;
  double dplus_min_eig = 0.0;          // smallest eigenvalue of the Jhat1* form
  double dminus_max_eig = 0.0;         // largest eigenvalue of the reduced Jhat2* form
  double chain_residual = 0.0;         // |case equality| (J2/Jhat* vs J(u0))
  double sup_n_residual = 0.0;
  int estar_fallbacks = 0;
  double ball_primal_extreme = 0.0;    // case 1: min J(u)-J(u0); case 3: max
  double ball_dual_extreme = 0.0;      // case 1: min J2(u,Q)-J(u0); case 3: max Jhat*
  double k_fit_slope = 0.0;
};

/// Shift-parameterized dual evaluator around one plate problem; caches
/// factorizations of the K-shifted bending system per K value.
class MultiDual {
 public:
  MultiDual(const Problem& prob, MultiDualConfig cfg, Loads loads);

  const MultiDualConfig& config() const { return cfg_; }
  /// Effective K for a given stress field (config override or auto margin).
  double k_for(const SymTensor2Field& n0) const;

  J1Breakdown j1(const PrimalState& u, const VectorField2& q,
                 const SymTensor2Field& n, double k) const;

  /// F_K*(Q) (with_load adds <w,P> inside the sup, giving Fhat_K*).
  double fk_star(const VectorField2& q, double k, bool with_load,
                 ScalarField* maximizer = nullptr) const;
  /// H_K*(Q,N): sup over clamped w of <grad w, Q> - 1/2 int (-N+KI) grad w . grad w.
  double hk_star(const VectorField2& q, const SymTensor2Field& n, double k,
                 ScalarField* maximizer = nullptr) const;

  double jhat1(const VectorField2& q, const SymTensor2Field& n,
               double k) const;
  double jhat2(const VectorField2& q, const SymTensor2Field& n,
               double k) const;
  double jhat_star(const VectorField2& q, const SymTensor2Field& n,
                   double k) const;
  double jhat_u(const PrimalState& u, const SymTensor2Field& n) const;

  /// Dense matrix of the Jhat1* quadratic form in sqrt(weight)-scaled Q
  /// coordinates; its smallest eigenvalue decides D+.
  Mat jhat1_form(const SymTensor2Field& n, double k) const;
  /// Dense matrix of the Jhat2* form on the reduced coordinate p = G^T W Q
  /// (the form vanishes identically on ker of the adjoint, so the D-
  /// quantifier lives on the range); checkerboard kernel deflated.
  Mat jhat2_form_reduced(const SymTensor2Field& n, double k) const;

  /// Pointwise sup over N of the N-terms of J1 at fixed (u,Q), guarded to
  /// keep lambda_max(N) < K/2.
  SupNResult sup_n(const PrimalState& u, const VectorField2& q,
                   double k) const;
  double j2(const PrimalState& u, const VectorField2& q, double k,
            SupNResult* detail = nullptr) const;

  /// Per-node Q-Hessian of J2 by the implicit-function formula through the
  /// N-stationarity system.
  SymTensor2Field j2_q_hessian(const PrimalState& u, const VectorField2& q,
                               double k) const;

  /// Transfer equation Q0 = (-N0 + K I) grad w0.
  VectorField2 transfer_q(const PrimalState& u0, double k) const;

  /// K-doubling sweep of |Q-Hessian of J2 - (-N0+KI)^{-1}|_sup with the
  /// fitted log-log slope.
  KFitResult k_sweep(const PrimalState& u0, double k_base) const;

  CaseReport classify(const PrimalState& u0) const;

 private:
  const Problem& prob_;
  MultiDualConfig cfg_;
  Loads loads_;
  mutable std::map<double, std::shared_ptr<Eigen::SimplicialLDLT<SpMat>>>
      fk_fac_;
  Eigen::SimplicialLDLT<SpMat>& fk_factor(double k) const;
};

}  // namespace plate::multi
