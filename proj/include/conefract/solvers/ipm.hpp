#pragma once

#include "conefract/model.hpp"

#include <optional>

namespace conefract {

struct IpmSettings {
  int max_iters = 200;
  double feas_tol = 1e-9;
  double gap_tol = 1e-9;
  double step_fraction = 0.98;

  /// Preset used by the direction finders: runs to the best attainable iterate.
  static IpmSettings tight() { return {300, 1e-12, 1e-13, 0.98}; }
  void validate() const;
};

enum class IpmStatus { Optimal, IterationLimit };

struct IpmStart {
  Vector x, y, s;
};

struct IpmResult {
  IpmStatus status = IpmStatus::IterationLimit;
  Vector x, y, s;
  double pobj = 0, dobj = 0;
  double pres = 0, dres = 0;  ///< relative residuals
  double complementarity = 0; ///< <x, s>
  double mu = 0;
  int iterations = 0;
};

/// Nesterov-Todd scaling of one block: x = G lambda, s = G^{-T} lambda.
struct NtScaling {
  Matrix G, Ginv;
  Vector lambda;
  Vector eig;  ///< PSD: diagonal of lambda as a matrix
};

NtScaling nt_scaling(const ConeBlock& b, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& s);
Vector jordan_identity(const ConeBlock& b);
Vector jordan_product(const ConeBlock& b, const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v);
/// z with lambda o z = v, for lambda given by its scaling.
Vector jordan_divide(const ConeBlock& b, const NtScaling& sc, const Eigen::Ref<const Vector>& v);
/// Largest alpha with lambda + alpha d in the cone (may be +inf).
double max_step(const ConeBlock& b, const NtScaling& sc, const Eigen::Ref<const Vector>& d);
double cone_degree(const ConeBlock& b);
/// min eigenvalue-like interiority measure of x in the block cone.
double interior_margin(const ConeBlock& b, const Eigen::Ref<const Vector>& x);

/// Primal-dual path following on min <c,x> s.t. Ax = b, x in K; dual A^T y + s = c, s in K.
IpmResult solve_ipm(const ConicLP& lp, const IpmSettings& settings, const std::optional<IpmStart>& start = std::nullopt);

}  // namespace conefract
