#include "conefract/aux.hpp"

#include <cmath>

namespace conefract {

std::pair<Vector, Vector> choose_e_phase1(const ConeProduct& reduced) {
  FaceDescriptor F = FaceDescriptor::full(reduced);
  Vector e = ri_point(F);
  for (std::size_t j = 0; j < reduced.size(); ++j)
    if (is_polyhedral(reduced.block(j), F.blocks[j])) e.segment(reduced.offset(j), reduced.block(j).coords()).setZero();
  return {e, ri_dual_point(F)};
}

std::pair<Vector, Vector> choose_e_generic(const ConeProduct& reduced) {
  FaceDescriptor F = FaceDescriptor::full(reduced);
  return {ri_point(F), ri_dual_point(F)};
}

std::vector<bool> phase2_relaxation(const FaceDescriptor& face) {
  std::vector<bool> r(face.blocks.size());
  for (std::size_t j = 0; j < face.blocks.size(); ++j) r[j] = !is_polyhedral(face.cone.block(j), face.blocks[j]);
  return r;
}

AuxLp build_aux_lp(const ConicLP& red, const Eigen::Ref<const Vector>& e, const Eigen::Ref<const Vector>& e_star) {
  const Index n = red.cols(), m = red.rows();
  if (e.size() != n || e_star.size() != n) throw std::invalid_argument("aux: e / e* length mismatch");
  AuxLp out;
  ConicLP& lp = out.lp;
  std::vector<ConeBlock> blocks = red.cone.blocks();
  blocks.push_back(ConeBlock::nonneg(2));
  lp.cone = ConeProduct(blocks);
  lp.A = Matrix::Zero(m + 2, n + 2);
  lp.b = Vector::Zero(m + 2);
  lp.c = Vector::Zero(n + 2);
  const double ce = red.c.dot(e_star);
  lp.A.block(0, 0, 1, n) = -red.c.transpose();
  lp.A(0, n) = ce + 1.0;
  lp.A(0, n + 1) = -1.0;
  lp.A.block(1, 0, 1, n) = e.transpose();
  lp.A(1, n + 1) = 1.0;
  lp.b(1) = 1.0;
  if (m > 0) {
    lp.A.block(2, 0, m, n) = red.A;
    lp.A.block(2, n, m, 1) = -red.A * e_star;
  }
  lp.c(n) = 1.0;

  const double k = e.dot(e_star) + 1.0;
  out.warm.x = Vector::Zero(n + 2);
  out.warm.x.head(n) = e_star / k;
  out.warm.x(n) = out.warm.x(n + 1) = 1.0 / k;
  out.warm.y = Vector::Zero(m + 2);
  out.warm.y(1) = -1.0;
  out.warm.s = lp.c - lp.A.transpose() * out.warm.y;
  return out;
}

AuxPair build_aux_pair(const ConicLP& prob, const ReducedProblem& view, AuxPhase phase) {
  if (view.infeasibility) throw std::logic_error("aux pair requested on an inconsistent face");
  AuxPair a;
  a.phase = phase;
  a.prob = prob;
  a.view = view;
  const ConeProduct& rc = view.red.cone;
  switch (phase) {
    case AuxPhase::Phase1: std::tie(a.e, a.e_star) = choose_e_phase1(rc); break;
    case AuxPhase::Phase2:
    case AuxPhase::Generic: std::tie(a.e, a.e_star) = choose_e_generic(rc); break;
  }
  a.e_amb = view.emb.embed(a.e);
  a.e_star_amb = view.emb.embed(a.e_star);
  AuxLp built = build_aux_lp(view.red, a.e, a.e_star);
  a.lp = std::move(built.lp);
  a.warm = std::move(built.warm);
  return a;
}

std::string to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Infeasible: return "Infeasible";
    case OutcomeKind::Reduce: return "Reduce";
    case OutcomeKind::PPSHolds: return "PPSHolds";
    case OutcomeKind::Ambiguous: return "NumericallyAmbiguous";
  }
  return "?";
}

AuxOutcome interpret(const AuxPair& aux, const AuxSolution& sol, double tol) {
  AuxOutcome out;
  out.raw = sol;
  out.t = sol.t;
  out.cx = aux.prob.c.dot(sol.x);
  // exact solutions: t compared with zero, <c,x> only up to double conversion noise
  const double thr = sol.exact ? 0.0 : std::max(tol, sol.resolution);
  const double cthr = sol.exact ? 1e-12 * (1.0 + aux.prob.c.norm() * sol.x.norm()) : thr;
  out.threshold = thr;
  if (sol.t <= thr) {
    if (out.cx < -cthr) {
      out.kind = OutcomeKind::Infeasible;
      out.direction = sol.x;
    } else if (std::abs(out.cx) <= cthr) {
      out.kind = OutcomeKind::Reduce;
      out.direction = sol.x;
    } else {
      out.kind = OutcomeKind::Ambiguous;
    }
  } else if (sol.t > 10.0 * thr && sol.y1 > 0) {
    out.kind = OutcomeKind::PPSHolds;
    out.y = sol.y3 / sol.y1;
    out.slack = aux.prob.c - aux.prob.A.transpose() * out.y;
  } else {
    out.kind = OutcomeKind::Ambiguous;
  }
  return out;
}

AuxSolution direction_solution(const AuxPair& aux, const Eigen::Ref<const Vector>& d) {
  const double ed = aux.e_amb.dot(d), cd = aux.prob.c.dot(d);
  if (!(ed - cd > 0)) throw std::invalid_argument("direction violates <e,d> > 0 or <c,d> < 0");
  const double alpha = 1.0 / (ed - cd);
  AuxSolution s;
  s.x = alpha * d;
  s.t = 0;
  s.w = -alpha * cd;
  s.y1 = 0;
  s.y2 = 0;
  s.y3 = Vector::Zero(aux.prob.rows());
  s.exact = true;
  return s;
}

}  // namespace conefract
