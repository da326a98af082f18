#pragma once

#include "conefract/model.hpp"

#include <optional>
#include <vector>

namespace conefract {

/// Isometric injection of a standard reduced cone onto span of a face.
/// Blocks flagged in `relaxed` are kept as free coordinates (columns of phi_free).
struct FaceEmbedding {
  FaceDescriptor face;
  std::vector<bool> relaxed;
  Matrix phi;       ///< n x n_red, conic part
  Matrix phi_free;  ///< n x n_free
  ConeProduct reduced_cone;
  std::vector<std::size_t> source_block;  ///< face block behind each reduced block

  static FaceEmbedding of(const FaceDescriptor& F, std::vector<bool> relaxed = {});

  Index ambient_dim() const { return phi.rows(); }
  Index reduced_dim() const { return phi.cols(); }
  Vector embed(const Eigen::Ref<const Vector>& z) const { return phi * z; }
  Vector adjoint(const Eigen::Ref<const Vector>& x) const { return phi.transpose() * x; }
};

/// Problem restricted to a face: slack c - A^T y confined to span F via y = y0 + N z.
struct ReducedProblem {
  FaceEmbedding emb;
  Matrix A_amb;
  Vector c_amb;
  Vector y0;
  Matrix N;  ///< m x k, orthonormal columns; A_red has full row rank k
  ConicLP red;
  /// Set when c + range A^T misses span F: an ambient direction with A d = 0, d in F*, <c,d> < 0.
  std::optional<Vector> infeasibility;

  /// Ambient direction d with Phi^T d = x_red, A d = 0 (least squares).
  Vector lift_direction(const Eigen::Ref<const Vector>& x_red) const;
  Vector lift_y(const Eigen::Ref<const Vector>& z) const { return y0 + N * z; }
  Vector slack(const Eigen::Ref<const Vector>& z) const { return c_amb - A_amb.transpose() * lift_y(z); }

  Matrix lift_pinv_;  ///< pseudo-inverse of A P_perp at the rank used for N
  Matrix perp_;     ///< P_perp
};

ReducedProblem reduce_problem(const ConicLP& prob, const FaceEmbedding& emb, double tol = 1e-9);

}  // namespace conefract
