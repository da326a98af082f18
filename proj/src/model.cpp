#include "conefract/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace conefract {

void ConicLP::validate() const {
  if (A.cols() != cone.dim())
    throw std::invalid_argument("A: column count " + std::to_string(A.cols()) + " does not match cone dimension " +
                                std::to_string(cone.dim()));
  if (b.size() != A.rows()) throw std::invalid_argument("b: length does not match rows of A");
  if (c.size() != cone.dim()) throw std::invalid_argument("c: length does not match cone dimension");
  if (intersection && intersection->dim() != cone.dim())
    throw std::invalid_argument("intersection: coordinate count does not match cone");
}

std::string to_string(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::StronglyFeasible: return "StronglyFeasible";
    case FeasibilityStatus::WeaklyFeasible: return "WeaklyFeasible";
    case FeasibilityStatus::WeaklyInfeasible: return "WeaklyInfeasible";
    case FeasibilityStatus::StronglyInfeasible: return "StronglyInfeasible";
  }
  return "?";
}

std::string to_string(CertStatus s) {
  switch (s) {
    case CertStatus::MinimalFaceFound: return "MinimalFaceFound";
    case CertStatus::InfeasibleStrong: return "InfeasibleStrong";
    case CertStatus::InfeasibleWeak: return "InfeasibleWeak";
    case CertStatus::PPSRestored: return "PPSRestored";
  }
  return "?";
}

std::string to_string(CertMode m) {
  switch (m) {
    case CertMode::Classic: return "Classic";
    case CertMode::PolyPhase1: return "PolyPhase1";
    case CertMode::PolyFull: return "PolyFull";
  }
  return "?";
}

CertStatus cert_status_from_string(const std::string& s) {
  for (auto v : {CertStatus::MinimalFaceFound, CertStatus::InfeasibleStrong, CertStatus::InfeasibleWeak,
                 CertStatus::PPSRestored})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("status: unknown value '" + s + "'");
}

CertMode cert_mode_from_string(const std::string& s) {
  for (auto v : {CertMode::Classic, CertMode::PolyPhase1, CertMode::PolyFull})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("mode: unknown value '" + s + "'");
}

double ReductionCertificate::step_tol(std::size_t i, double tol) const {
  return i < step_tols.size() ? std::max(tol, step_tols[i]) : tol;
}

double ReductionCertificate::cut_tol(std::size_t i, double tol) const {
  return i < step_tols.size() ? step_tols[i] : tol;
}

DirectionCheck check_reducing_direction(const ConicLP& prob, const FaceDescriptor& face,
                                        const Eigen::Ref<const Vector>& d, double tol) {
  if (d.size() != prob.cols()) throw std::invalid_argument("direction length does not match problem");
  const double nd = d.norm();
  if (nd == 0.0) throw std::invalid_argument("zero direction");
  Vector u = d / nd;
  DirectionCheck out;
  const double cu = prob.c.dot(u);
  const double cn = prob.c.norm();
  bool kerA = prob.rows() == 0 || (prob.A * u).norm() <= tol * (1.0 + prob.A.norm());
  out.valid = kerA && dual_face_contains(face, u, tol) && cu <= tol * cn;
  out.strict_c = out.valid && cu < -tol * cn;
  return out;
}

Vector recover_y(const ConicLP& prob, const Eigen::Ref<const Vector>& s) {
  if (prob.rows() == 0) return Vector(0);
  Matrix At = prob.A.transpose();
  return At.completeOrthogonalDecomposition().solve(prob.c - s);
}

double affine_residual(const ConicLP& prob, const Eigen::Ref<const Vector>& s) {
  Vector r = prob.c - s;
  if (prob.rows() > 0) r -= prob.A.transpose() * recover_y(prob, s);
  return r.norm() / (1.0 + prob.c.norm());
}

namespace {

VerifyReport fail(VerifyReport r, int step, std::string msg) {
  r.ok = false;
  r.failing_step = step;
  r.message = std::move(msg);
  return r;
}

}  // namespace

VerifyReport verify_certificate(const ConicLP& prob, const ReductionCertificate& cert, double tol) {
  VerifyReport rep;
  prob.validate();
  if (cert.faces.size() != cert.directions.size() + 1) return fail(rep, -1, "faces/directions length mismatch");
  FaceDescriptor F = FaceDescriptor::full(prob.cone);
  if (!faces_equal(F, cert.faces[0], 1e-9)) return fail(rep, 0, "first face is not the full cone");
  const std::size_t L = cert.directions.size();
  const bool infeasible = cert.status == CertStatus::InfeasibleStrong || cert.status == CertStatus::InfeasibleWeak;
  for (std::size_t i = 0; i < L; ++i) {
    const double st = cert.step_tol(i, tol);
    const Vector& d = cert.directions[i];
    DirectionCheck chk;
    try {
      chk = check_reducing_direction(prob, cert.faces[i], d, st);
    } catch (const std::exception& e) {
      return fail(rep, int(i), e.what());
    }
    if (!chk.valid) return fail(rep, int(i), "direction " + std::to_string(i + 1) + " is not a reducing direction");
    const bool last = i + 1 == L;
    if (infeasible && last) {
      if (!chk.strict_c) return fail(rep, int(i), "infeasibility direction has <c,d> >= 0");
      if (cert.status == CertStatus::InfeasibleStrong &&
          !dual_face_contains(FaceDescriptor::full(prob.cone), d / d.norm(), st))
        return fail(rep, int(i), "strong infeasibility direction not in K*");
    }
    FaceDescriptor G;
    try {
      G = face_intersect_hyperplane(cert.faces[i], d, cert.cut_tol(i, tol));
    } catch (const CertificateViolation& e) {
      return fail(rep, int(i), e.what());
    }
    if (!faces_equal(G, cert.faces[i + 1], 1e-6)) return fail(rep, int(i), "face replay mismatch");
    if (!(infeasible && last) && face_dimension(G) >= face_dimension(cert.faces[i]))
      return fail(rep, int(i), "face did not shrink");
    std::ostringstream os;
    os << "step " << i + 1 << ": dim span " << face_dimension(cert.faces[i]) << " -> " << face_dimension(G)
       << (chk.strict_c ? " (strict)" : "");
    rep.log.push_back(os.str());
  }
  const FaceDescriptor& T = cert.faces.back();
  // span tolerance for the terminal checks: the loosest face tolerance the replay used
  double ftol = std::max(tol, 1e-9);
  for (std::size_t i = 0; i < L; ++i) ftol = std::max(ftol, cert.step_tol(i, tol));
  if (cert.status == CertStatus::MinimalFaceFound) {
    if (!cert.slack_hat) return fail(rep, -1, "slack_hat missing");
    const Vector& s = *cert.slack_hat;
    if (affine_residual(prob, s) > tol) return fail(rep, -1, "slack_hat not in c + range A^T");
    rep.terminal_margin = ri_margin(T, s, ftol * (1.0 + s.norm()));
    if (!(rep.terminal_margin >= tol)) return fail(rep, -1, "slack_hat not in ri of terminal face");
  } else if (cert.status == CertStatus::PPSRestored) {
    if (!cert.slack_prime) return fail(rep, -1, "slack_prime missing");
    const Vector& s = *cert.slack_prime;
    if (affine_residual(prob, s) > tol) return fail(rep, -1, "slack_prime not in c + range A^T");
    double off = ftol * (1.0 + s.norm());
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < T.blocks.size(); ++j) {
      const ConeBlock& b = T.cone.block(j);
      Vector sj = s.segment(T.cone.offset(j), b.coords());
      double mj = ri_margin_block(b, T.blocks[j], sj, off);
      if (is_polyhedral(b, T.blocks[j])) {
        if (mj < -off) return fail(rep, -1, "slack_prime outside terminal face on block " + std::to_string(j));
      } else {
        if (!(mj >= tol)) return fail(rep, -1, "slack_prime not interior on nonpolyhedral block " + std::to_string(j));
        m = std::min(m, mj);
      }
    }
    rep.terminal_margin = m;
  }
  rep.log.push_back("status " + to_string(cert.status) + ", " + std::to_string(L) + " direction(s)");
  return rep;
}

std::optional<FeasibilityStatus> classify(const ReductionCertificate& cert) {
  switch (cert.status) {
    case CertStatus::InfeasibleStrong: return FeasibilityStatus::StronglyInfeasible;
    case CertStatus::InfeasibleWeak: return FeasibilityStatus::WeaklyInfeasible;
    case CertStatus::PPSRestored: return std::nullopt;
    case CertStatus::MinimalFaceFound:
      return face_dimension(cert.terminal()) == cert.terminal().cone.dim() ? FeasibilityStatus::StronglyFeasible
                                                                           : FeasibilityStatus::WeaklyFeasible;
  }
  return std::nullopt;
}

}  // namespace conefract
