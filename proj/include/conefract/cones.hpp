#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace conefract {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when a direction is not in the dual of the face it is applied to.
struct CertificateViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ConeKind { NonNeg, SOC, PSD };

/// One factor of a product cone. `size` is dim for NonNeg/SOC and side for PSD.
struct ConeBlock {
  ConeKind kind = ConeKind::NonNeg;
  Index size = 0;

  static ConeBlock nonneg(Index dim) { return {ConeKind::NonNeg, dim}; }
  static ConeBlock soc(Index dim) { return {ConeKind::SOC, dim}; }
  static ConeBlock psd(Index side) { return {ConeKind::PSD, side}; }

  /// Number of ambient coordinates (svec length for PSD).
  Index coords() const { return kind == ConeKind::PSD ? size * (size + 1) / 2 : size; }

  bool operator==(const ConeBlock&) const = default;
};

std::string to_string(const ConeBlock& b);

class ConeProduct {
public:
  ConeProduct() = default;
  explicit ConeProduct(std::vector<ConeBlock> blocks);

  const std::vector<ConeBlock>& blocks() const { return blocks_; }
  const ConeBlock& block(std::size_t j) const { return blocks_[j]; }
  std::size_t size() const { return blocks_.size(); }
  Index offset(std::size_t j) const { return offsets_[j]; }
  Index dim() const { return dim_; }

  bool operator==(const ConeProduct& o) const { return blocks_ == o.blocks_; }

private:
  std::vector<ConeBlock> blocks_;
  std::vector<Index> offsets_;
  Index dim_ = 0;
};

// ---- svec --------------------------------------------------------------

Index svec_length(Index side);
/// Side n with n(n+1)/2 == len; throws if len is not triangular.
Index svec_side(Index len);

/// Upper triangle, column-major, off-diagonals times sqrt(2).
Vector svec(const Eigen::Ref<const Matrix>& X);
Matrix smat(const Eigen::Ref<const Vector>& v);

/// Codec for a fixed side; thin wrapper kept for symmetry with the other types.
struct SvecCodec {
  Index side;
  Vector to_vec(const Matrix& X) const { return svec(X); }
  Matrix to_mat(const Eigen::Ref<const Vector>& v) const;
};

// ---- faces -------------------------------------------------------------

struct NonNegFace {
  std::vector<Index> support;  ///< sorted local indices
};

struct SocFace {
  enum class State { Full, Ray, Zero };
  State state = State::Full;
  Vector ray;  ///< unit boundary vector when state == Ray
};

struct PsdFace {
  Matrix basis;  ///< side x rank, orthonormal columns
};

using BlockFace = std::variant<NonNegFace, SocFace, PsdFace>;

struct FaceDescriptor {
  ConeProduct cone;
  std::vector<BlockFace> blocks;

  static FaceDescriptor full(const ConeProduct& cone);
  static FaceDescriptor zero(const ConeProduct& cone);
};

BlockFace full_face(const ConeBlock& b);

// membership
bool contains(const ConeBlock& b, const Eigen::Ref<const Vector>& x, double tol);
bool contains(const ConeProduct& K, const Eigen::Ref<const Vector>& x, double tol);
/// x in the face itself (span condition plus cone condition).
bool face_contains(const FaceDescriptor& F, const Eigen::Ref<const Vector>& x, double tol);
bool dual_face_contains(const FaceDescriptor& F, const Eigen::Ref<const Vector>& x, double tol);

/// Smallest eigenvalue-like margin of x inside ri of the face, per block, measured in reduced
/// coordinates. Negative when x is outside; -inf if x leaves span F by more than tol.
double ri_margin(const FaceDescriptor& F, const Eigen::Ref<const Vector>& x, double tol);
double ri_margin_block(const ConeBlock& b, const BlockFace& f, const Eigen::Ref<const Vector>& xj, double tol);

BlockFace intersect_hyperplane(const ConeBlock& b, const BlockFace& f, const Eigen::Ref<const Vector>& dj,
                               double tol, double scale);
FaceDescriptor face_intersect_hyperplane(const FaceDescriptor& F, const Eigen::Ref<const Vector>& d, double tol);

Vector ri_point(const FaceDescriptor& F);
Vector ri_dual_point(const FaceDescriptor& F);
Vector ri_point_block(const ConeBlock& b, const BlockFace& f);
Vector ri_dual_point_block(const ConeBlock& b, const BlockFace& f);

bool is_polyhedral(const ConeBlock& b, const BlockFace& f);
bool is_polyhedral(const FaceDescriptor& F);
int dist_to_polyhedrality(const ConeBlock& b, const BlockFace& f);
int dist_to_polyhedrality(const FaceDescriptor& F);
int longest_chain_length(const ConeBlock& b);

/// Dimension of span of the face (ambient coordinates).
Index face_dimension(const ConeBlock& b, const BlockFace& f);
Index face_dimension(const FaceDescriptor& F);
/// A block face that is a linear subspace ({0} here, since blocks are pointed).
bool is_zero_face(const ConeBlock& b, const BlockFace& f);

/// Orthonormal basis (columns) of span of the block face, in block coordinates.
Matrix span_basis(const ConeBlock& b, const BlockFace& f);

/// Faces compared as sets: supports, ray lines, PSD projectors.
bool faces_equal(const FaceDescriptor& a, const FaceDescriptor& b, double tol);

/// Random point in the face: nonnegative combination of generators.
template <typename Rng>
Vector sample_face_point(const FaceDescriptor& F, Rng& rng);

}  // namespace conefract

#include "conefract/detail/cones_sample.hpp"
