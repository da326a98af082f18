#pragma once

#include "conefract/model.hpp"

#include <vector>

namespace conefract {

/// Problem over K1 cap K2 rewritten over K1 x K2 with x = x1 + x2.
struct DupMapping {
  Index n = 0;
  ConeProduct k1, k2;
  ConicLP dup;  ///< [A | A], (c, c), K1 x K2

  /// (d1, d2) halves of a duplicated vector.
  Vector first(const Eigen::Ref<const Vector>& v) const { return v.head(n); }
  Vector second(const Eigen::Ref<const Vector>& v) const { return v.tail(n); }
};

/// Throws std::invalid_argument when the intersection is missing or has the wrong coordinate count.
DupMapping duplicate(const ConicLP& prob);

/// Face of K1 cap K2 kept as the pair (F1, F2).
struct FacePair {
  FaceDescriptor f1, f2;
};

FacePair split_face(const DupMapping& m, const FaceDescriptor& F);
FaceDescriptor join_faces(const DupMapping& m, const FacePair& p);
/// x in F1 and x in F2.
bool face_pair_contains(const FacePair& p, const Eigen::Ref<const Vector>& x, double tol);

/// Certificate for the original problem. Each direction d_i = d1_i + d2_i keeps its splitting pair.
struct IntersectionCertificate {
  ReductionCertificate dup;  ///< the certificate over K1 x K2 it was built from
  std::vector<Vector> directions;
  std::vector<Vector> parts1, parts2;
  std::vector<FacePair> faces;
  CertStatus status = CertStatus::MinimalFaceFound;
  std::optional<Vector> slack_hat, slack_prime;

  const FacePair& terminal() const { return faces.back(); }
  int steps() const { return int(directions.size()); }
};

IntersectionCertificate recombine(const DupMapping& m, const ReductionCertificate& dup_cert);

/// Replays the pair certificate on the duplicated problem, then checks the original-problem
/// obligations: A d = 0, <c,d> <= 0, strict <c,d> < 0 for an infeasible exit, and slack_hat in
/// c + range A^T and in ri F1 and ri F2.
VerifyReport verify_intersection_certificate(const ConicLP& prob, const IntersectionCertificate& cert, double tol);

/// One face of a DNN chain: PSD face (basis) with a NonNeg support on the svec coordinates.
struct DnnChainFace {
  Matrix basis;
  std::vector<Index> support;
  Matrix witness;  ///< integer point in this face, not in the previous one (empty for the first)
};

/// G_0 .. G_n (diagonal entries added one at a time), then H_1 .. (off-diagonals row by row).
std::vector<DnnChainFace> dnn_chain(Index n);

/// Exact: witness in face k and not in face k-1, and face k-1 contained in face k.
struct ChainCheck {
  bool ok = true;
  int failing = -1;
  std::string message;
};
ChainCheck verify_dnn_chain(Index n, const std::vector<DnnChainFace>& chain);

/// Exact PSD test for a matrix with integer (or dyadic) entries, by rational LDL^T.
bool exact_psd(const Eigen::Ref<const Matrix>& X);

}  // namespace conefract
