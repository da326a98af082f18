#pragma once

#include "conefract/cones.hpp"

#include <optional>
#include <string>
#include <vector>

namespace conefract {

/// min <c,x> s.t. Ax = b, x in K*  /  max <b,y> s.t. c - A^T y in K.
/// Blocks are self-dual under the svec inner product, so K* and K share a descriptor.
struct ConicLP {
  Matrix A;
  Vector b;
  Vector c;
  ConeProduct cone;
  std::optional<ConeProduct> intersection;  ///< present: K = cone cap intersection

  Index rows() const { return A.rows(); }
  Index cols() const { return A.cols(); }
  /// Throws std::invalid_argument naming the inconsistent field.
  void validate() const;
};

enum class FeasibilityStatus { StronglyFeasible, WeaklyFeasible, WeaklyInfeasible, StronglyInfeasible };
enum class CertStatus { MinimalFaceFound, InfeasibleStrong, InfeasibleWeak, PPSRestored };
enum class CertMode { Classic, PolyPhase1, PolyFull };

std::string to_string(FeasibilityStatus s);
std::string to_string(CertStatus s);
std::string to_string(CertMode m);
CertStatus cert_status_from_string(const std::string& s);
CertMode cert_mode_from_string(const std::string& s);

struct ReductionCertificate {
  std::vector<Vector> directions;
  std::vector<FaceDescriptor> faces;  ///< faces.size() == directions.size() + 1
  std::vector<double> step_tols;      ///< face tolerance used per step (may be empty)
  CertStatus status = CertStatus::MinimalFaceFound;
  std::optional<Vector> slack_prime;
  std::optional<Vector> slack_hat;
  CertMode mode = CertMode::PolyFull;
  int phase1_steps = 0;  ///< directions found in phase 1 (rest are phase 2)

  const FaceDescriptor& terminal() const { return faces.back(); }
  int steps() const { return int(directions.size()); }
  /// Acceptance tolerance of step i: max(tol, recorded).
  double step_tol(std::size_t i, double tol) const;
  /// Face-cut tolerance of step i: the recorded one, else tol.
  double cut_tol(std::size_t i, double tol) const;
};

struct DirectionCheck {
  bool valid = false;
  bool strict_c = false;
};

/// Checks on d / ||d||: ||A d|| <= tol (1 + ||A||), d in F*, <c,d> <= tol ||c||.
DirectionCheck check_reducing_direction(const ConicLP& prob, const FaceDescriptor& face,
                                        const Eigen::Ref<const Vector>& d, double tol);

struct VerifyReport {
  bool ok = true;
  int failing_step = -1;  ///< -1 for whole-certificate obligations
  std::string message;
  std::vector<std::string> log;
  double terminal_margin = 0.0;
};

VerifyReport verify_certificate(const ConicLP& prob, const ReductionCertificate& cert, double tol);

/// Distance of s from c + range A^T, relative to 1 + ||c||.
double affine_residual(const ConicLP& prob, const Eigen::Ref<const Vector>& s);
/// Least-squares y with c - A^T y closest to s.
Vector recover_y(const ConicLP& prob, const Eigen::Ref<const Vector>& s);

/// Status implied by a completed certificate; empty for phase-1-only certificates.
std::optional<FeasibilityStatus> classify(const ReductionCertificate& cert);

}  // namespace conefract
