#include "conefract/fra.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <sstream>

namespace conefract {

int sum_dist_poly(const ConeProduct& K) {
  int s = 0;
  for (const ConeBlock& b : K.blocks()) s += dist_to_polyhedrality(b, full_face(b));
  return s;
}

int chain_length(const ConeProduct& K) {
  int s = 1;
  for (const ConeBlock& b : K.blocks()) s += longest_chain_length(b) - 1;
  return s;
}

namespace {

constexpr double kSnapTol = 1e-10;
constexpr int kSnapDenominator = 12;

std::optional<double> snap_value(double x, double radius) {
  for (int q = 1; q <= kSnapDenominator; ++q) {
    const double p = std::round(x * q);
    if (std::abs(x - p / q) <= radius) return p / q;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Vector> snap_direction(const ConicLP& prob, const FaceDescriptor& F, const Eigen::Ref<const Vector>& d,
                                     double radius, double step_tol) {
  // natural coordinates: matrix entries on PSD blocks
  const ConeProduct& K = prob.cone;
  Vector z = d;
  for (std::size_t j = 0; j < K.size(); ++j) {
    const ConeBlock& b = K.block(j);
    if (b.kind != ConeKind::PSD) continue;
    const Matrix M = smat(d.segment(K.offset(j), b.coords()));
    Index k = K.offset(j);
    for (Index c = 0; c < b.size; ++c)
      for (Index r = 0; r <= c; ++r) z(k++) = M(r, c);
  }
  const double scale = z.cwiseAbs().maxCoeff();
  if (!(scale > 0)) return std::nullopt;
  z /= scale;
  for (Index i = 0; i < z.size(); ++i) {
    auto q = snap_value(z(i), radius);
    if (!q) return std::nullopt;
    z(i) = *q;
  }
  Vector v = z;
  for (std::size_t j = 0; j < K.size(); ++j) {
    const ConeBlock& b = K.block(j);
    if (b.kind != ConeKind::PSD) continue;
    Matrix M(b.size, b.size);
    Index k = K.offset(j);
    for (Index c = 0; c < b.size; ++c)
      for (Index r = 0; r <= c; ++r) {
        M(r, c) = M(c, r) = z(k++);
      }
    v.segment(K.offset(j), b.coords()) = svec(M);
  }
  if (v.isZero()) return std::nullopt;
  const DirectionCheck raw = check_reducing_direction(prob, F, d, step_tol);
  const DirectionCheck chk = check_reducing_direction(prob, F, v, kSnapTol);
  if (!chk.valid || chk.strict_c != raw.strict_c) return std::nullopt;
  try {
    if (face_dimension(face_intersect_hyperplane(F, v, kSnapTol)) >= face_dimension(F)) return std::nullopt;
  } catch (const CertificateViolation&) {
    return std::nullopt;
  }
  return v;
}

namespace {

/// Rounded direction and its tolerance when rounding applies, else the inputs.
/// Step tolerance: the solve's resolution (tol when it reports none), lowered to the partition cut
/// when the finder supplies one.
double step_tolerance(const AuxSolution& sol, const FraOptions& opt) {
  double st = sol.resolution > 0 ? std::max(sol.resolution, 1e-12) : opt.tol;
  if (sol.partition_tol && *sol.partition_tol < st) st = std::max(*sol.partition_tol, 1e-12);
  return st;
}

std::pair<Vector, double> maybe_snap(const ConicLP& prob, const FaceDescriptor& F, const Finder& finder,
                                     const Vector& d, double st, const FraOptions& opt) {
  if (!opt.snap_directions || finder.exact()) return {d, st};
  try {
    if (auto v = snap_direction(prob, F, d, std::max(1e-6, 100.0 * st), st)) return {*v, std::max(opt.tol, kSnapTol)};
  } catch (const std::exception&) {
  }
  return {d, st};
}

FraRun start_run(const ConicLP& prob, CertMode mode) {
  FraRun r;
  r.cert.mode = mode;
  r.cert.faces.push_back(FaceDescriptor::full(prob.cone));
  return r;
}

void push_step(FraRun& run, const Vector& d, const FaceDescriptor& next, double st) {
  run.cert.directions.push_back(d);
  run.cert.faces.push_back(next);
  run.cert.step_tols.push_back(st);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

struct LoopEnd {
  OutcomeKind kind;
  Vector slack, y;
};

struct Solved {
  AuxSolution sol;
  AuxOutcome out;
  bool retried = false;
};

Solved solve_and_interpret(Finder& finder, const AuxPair& aux, double tol, FraRun& run, const std::string& tag) {
  Solved r;
  try {
    r.sol = finder.solve(aux);
    r.out = interpret(aux, r.sol, tol);
    if (r.out.kind == OutcomeKind::Ambiguous && finder.tighten()) {
      r.retried = true;
      r.sol = finder.solve(aux);
      r.out = interpret(aux, r.sol, tol);
    }
  } catch (const FinderError& e) {
    throw FraError(tag + ": " + e.what(), run);
  }
  return r;
}

StepLog make_log(const std::string& tag, const Solved& s, Index dim) {
  StepLog lg;
  lg.phase = tag;
  lg.kind = s.out.kind;
  lg.t = s.out.t;
  lg.cx = s.out.cx;
  lg.threshold = s.out.threshold;
  lg.dim_before = lg.dim_after = dim;
  lg.retried = s.retried;
  return lg;
}

/// Rank threshold for the reduced data: the loosest face tolerance used so far.
double face_tol(const FraRun& run) {
  double t = 1e-9;
  for (double s : run.cert.step_tols) t = std::max(t, s);
  return t;
}

LoopEnd reduction_loop(const ConicLP& prob, Finder& finder, AuxPhase phase, const FraOptions& opt, int cap,
                       FraRun& run, const std::string& tag) {
  for (;;) {
    const FaceDescriptor F = run.cert.faces.back();
    const Index dim = face_dimension(F);
    ReducedProblem view = reduce_problem(prob, FaceEmbedding::of(F), face_tol(run));
    if (view.infeasibility) {
      const Vector& d = *view.infeasibility;
      StepLog lg;
      lg.phase = tag;
      lg.kind = OutcomeKind::Infeasible;
      lg.cx = prob.c.dot(d);
      lg.threshold = opt.tol;
      lg.dim_before = lg.dim_after = dim;
      run.log.push_back(lg);
      push_step(run, d, F, opt.tol);
      return {OutcomeKind::Infeasible, {}, {}};
    }
    if (run.cert.steps() >= cap)
      throw FraError(tag + ": step cap " + std::to_string(cap) + " reached without termination", run);
    AuxPair aux = build_aux_pair(prob, view, phase);
    Solved s = solve_and_interpret(finder, aux, opt.tol, run, tag);
    StepLog lg = make_log(tag, s, dim);
    if (s.out.kind == OutcomeKind::Ambiguous) {
      run.log.push_back(lg);
      throw FraError(tag + ": numerically ambiguous aux outcome (t = " + fmt(s.out.t) + ", <c,x> = " +
                         fmt(s.out.cx) + ")",
                     run);
    }
    if (s.out.kind == OutcomeKind::PPSHolds) {
      run.log.push_back(lg);
      return {OutcomeKind::PPSHolds, s.out.slack, s.out.y};
    }
    const auto [d, st] = maybe_snap(prob, F, finder, s.out.direction, step_tolerance(s.sol, opt), opt);
    FaceDescriptor G;
    try {
      G = face_intersect_hyperplane(F, d, st);
    } catch (const CertificateViolation& e) {
      run.log.push_back(lg);
      throw FraError(tag + ": direction rejected by face update: " + e.what(), run);
    }
    lg.dim_after = face_dimension(G);
    run.log.push_back(lg);
    push_step(run, d, G, st);
    if (s.out.kind == OutcomeKind::Infeasible) return {OutcomeKind::Infeasible, {}, {}};
    if (lg.dim_after >= lg.dim_before) throw FraError(tag + ": reducing direction did not shrink the face", run);
  }
}

void finalize_infeasible(const ConicLP& prob, FraRun& run, const FraOptions& opt) {
  const Vector& d = run.cert.directions.back();
  const double st = run.cert.step_tols.back();
  if (dual_face_contains(FaceDescriptor::full(prob.cone), d / d.norm(), st)) {
    run.cert.status = CertStatus::InfeasibleStrong;
    return;
  }
  run.cert.status = CertStatus::InfeasibleWeak;
  if (!opt.classify_weak) return;
  FraOptions sub = opt;
  sub.classify_weak = false;
  try {
    WeakInfeasibilityReport rep = analyze_not_strongly_infeasible(prob, sub);
    if (rep.strongly_infeasible && rep.certificate) {
      const FaceDescriptor K = FaceDescriptor::full(prob.cone);
      run.cert.directions = {*rep.certificate};
      run.cert.faces = {K, face_intersect_hyperplane(K, *rep.certificate, opt.tol)};
      run.cert.step_tols = {opt.tol};
      run.cert.status = CertStatus::InfeasibleStrong;
      run.cert.phase1_steps = run.cert.mode == CertMode::Classic ? 0 : 1;
      StepLog lg;
      lg.phase = "analyzer";
      lg.kind = OutcomeKind::Infeasible;
      lg.cx = prob.c.dot(*rep.certificate);
      run.log.push_back(lg);
    }
  } catch (const std::exception&) {
    StepLog lg;
    lg.phase = "analyzer-failed";
    run.log.push_back(lg);
  }
}

}  // namespace

FraRun fra_poly_phase1(const ConicLP& prob, Finder& finder, const FraOptions& opt) {
  prob.validate();
  if (prob.intersection) throw std::invalid_argument("fra: intersection problems must be duplicated first");
  FraRun run = start_run(prob, CertMode::PolyPhase1);
  const int cap = 2 + sum_dist_poly(prob.cone);
  LoopEnd end = reduction_loop(prob, finder, AuxPhase::Phase1, opt, cap, run, "phase1");
  run.cert.phase1_steps = run.cert.steps();
  if (end.kind == OutcomeKind::PPSHolds) {
    run.cert.status = CertStatus::PPSRestored;
    run.cert.slack_prime = end.slack;
    run.y_prime = end.y;
  } else {
    finalize_infeasible(prob, run, opt);
  }
  return run;
}

FraRun fra_poly_phase2(const ConicLP& prob, const FraRun& phase1, Finder* finder, const FraOptions& opt) {
  if (phase1.cert.status != CertStatus::PPSRestored || !phase1.cert.slack_prime || !phase1.y_prime)
    throw std::invalid_argument("phase 2 needs a phase-1 run that restored PPS");
  FraRun run = phase1;
  run.cert.mode = CertMode::PolyFull;
  const FaceDescriptor F = run.cert.faces.back();
  const Vector& sp = *phase1.cert.slack_prime;
  ReducedProblem view = reduce_problem(prob, FaceEmbedding::of(F, phase2_relaxation(F)), face_tol(run));
  if (view.infeasibility) throw FraError("phase 2: relaxed face is inconsistent with c + range A^T", run);
  AuxPair aux = build_aux_pair(prob, view, AuxPhase::Phase2);
  ExactFinder exact;
  // numeric faces carry rounding noise that exact arithmetic would treat as data
  const bool use_exact = finder == nullptr || (opt.exact_phase2 && finder->exact());
  Finder& f = use_exact ? static_cast<Finder&>(exact) : *finder;
  Solved s = solve_and_interpret(f, aux, opt.tol, run, "phase2");
  StepLog lg = make_log("phase2", s, face_dimension(F));

  FaceDescriptor Fmin = F;
  Vector y_tilde;
  switch (s.out.kind) {
    case OutcomeKind::Ambiguous:
      run.log.push_back(lg);
      throw FraError("phase 2: numerically ambiguous aux outcome (t = " + fmt(s.out.t) + ")", run);
    case OutcomeKind::Infeasible:
      run.log.push_back(lg);
      throw FraError("phase 2: infeasibility reported after a PPS exit", run);
    case OutcomeKind::Reduce: {
      if (!(s.sol.y1 > 0)) throw FraError("phase 2: y1 not positive at a reducing solution", run);
      const auto [d, st] = maybe_snap(prob, F, f, s.out.direction, step_tolerance(s.sol, opt), opt);
      try {
        Fmin = face_intersect_hyperplane(F, d, st);
      } catch (const CertificateViolation& e) {
        throw FraError(std::string("phase 2: direction rejected by face update: ") + e.what(), run);
      }
      lg.dim_after = face_dimension(Fmin);
      if (lg.dim_after >= lg.dim_before) {
        run.log.push_back(lg);
        throw FraError("phase 2: direction did not shrink the face", run);
      }
      push_step(run, d, Fmin, st);
      y_tilde = s.sol.y3 / s.sol.y1;
      break;
    }
    case OutcomeKind::PPSHolds: y_tilde = s.out.y; break;
  }
  run.log.push_back(lg);

  const Vector s_tilde = prob.c - prob.A.transpose() * y_tilde;
  double best = -std::numeric_limits<double>::infinity(), best_beta = 0;
  for (int k = 1; k <= 60; ++k) {
    const double beta = 1.0 - std::ldexp(1.0, -k);
    const Vector sb = beta * sp + (1.0 - beta) * s_tilde;
    const double m = ri_margin(Fmin, sb, std::max(face_tol(run), opt.tol) * (1.0 + sb.norm()));
    if (m > best) {
      best = m;
      best_beta = beta;
    }
  }
  // s' near zero: the slack set is close to a cone and s~ may be tiny, so step past s~
  for (int k = 1; k <= 40 && best < 10.0 * opt.tol; ++k) {
    const double beta = 1.0 - std::ldexp(1.0, k);
    const Vector sb = beta * sp + (1.0 - beta) * s_tilde;
    const double m = ri_margin(Fmin, sb, std::max(face_tol(run), opt.tol) * (1.0 + sb.norm()));
    if (m > best) {
      best = m;
      best_beta = beta;
    }
  }
  if (!(best >= 1e-9)) throw FraError("phase 2: no beta in (0,1) gives a slack in ri of the final face", run);
  run.beta = best_beta;
  run.y_hat = best_beta * *phase1.y_prime + (1.0 - best_beta) * y_tilde;
  run.cert.slack_hat = prob.c - prob.A.transpose() * *run.y_hat;
  run.cert.status = CertStatus::MinimalFaceFound;
  return run;
}

FraRun fra_poly(const ConicLP& prob, Finder& finder, const FraOptions& opt) {
  FraRun p1 = fra_poly_phase1(prob, finder, opt);
  if (p1.cert.status != CertStatus::PPSRestored) {
    p1.cert.mode = CertMode::PolyFull;
    return p1;
  }
  return fra_poly_phase2(prob, p1, &finder, opt);
}

FraRun generic_fra(const ConicLP& prob, Finder& finder, const FraOptions& opt) {
  prob.validate();
  if (prob.intersection) throw std::invalid_argument("fra: intersection problems must be duplicated first");
  FraRun run = start_run(prob, CertMode::Classic);
  const int cap = chain_length(prob.cone) + 1;
  LoopEnd end = reduction_loop(prob, finder, AuxPhase::Generic, opt, cap, run, "classic");
  if (end.kind == OutcomeKind::PPSHolds) {
    run.cert.status = CertStatus::MinimalFaceFound;
    run.cert.slack_hat = end.slack;
    run.y_hat = end.y;
  } else {
    finalize_infeasible(prob, run, opt);
  }
  return run;
}

std::optional<ShortcutResult> strict_comp_shortcut(const AuxPair& aux, const AuxSolution& sol, double tol) {
  if (sol.t > tol || std::abs(sol.w) > tol || !(sol.y1 > 0)) return std::nullopt;
  ShortcutResult r;
  r.t_margin = sol.t + sol.t_slack;
  r.w_margin = sol.w + sol.w_slack;
  if (!(r.t_margin > tol) || !(r.w_margin > tol)) return std::nullopt;
  if (std::abs(aux.prob.c.dot(sol.x)) > tol * (1.0 + aux.prob.c.norm() * sol.x.norm())) return std::nullopt;
  try {
    r.face = face_intersect_hyperplane(aux.face(), sol.x, tol);
  } catch (const CertificateViolation&) {
    return std::nullopt;
  }
  r.direction = sol.x;
  r.y = sol.y3 / sol.y1;
  r.slack = aux.prob.c - aux.prob.A.transpose() * r.y;
  r.ri_margin = ri_margin(r.face, r.slack, std::max(tol, 1e-9) * (1.0 + r.slack.norm()));
  if (!(r.ri_margin > tol)) return std::nullopt;
  return r;
}

FraRun shortcut_fra(const ConicLP& prob, const FraOptions& opt) {
  prob.validate();
  FraRun run = start_run(prob, CertMode::PolyFull);
  const FaceDescriptor K = run.cert.faces.back();
  ReducedProblem view = reduce_problem(prob, FaceEmbedding::of(K));
  if (view.infeasibility) {
    push_step(run, *view.infeasibility, K, opt.tol);
    finalize_infeasible(prob, run, opt);
    return run;
  }
  AuxPair aux = build_aux_pair(prob, view, AuxPhase::Generic);
  ExactFinder exact;
  Solved s = solve_and_interpret(exact, aux, opt.tol, run, "shortcut");
  StepLog lg = make_log("shortcut", s, face_dimension(K));
  switch (s.out.kind) {
    case OutcomeKind::PPSHolds:
      run.log.push_back(lg);
      run.cert.status = CertStatus::MinimalFaceFound;
      run.cert.slack_hat = s.out.slack;
      run.y_hat = s.out.y;
      return run;
    case OutcomeKind::Infeasible: {
      const FaceDescriptor G = face_intersect_hyperplane(K, s.out.direction, opt.tol);
      lg.dim_after = face_dimension(G);
      run.log.push_back(lg);
      push_step(run, s.out.direction, G, opt.tol);
      run.cert.phase1_steps = 1;
      finalize_infeasible(prob, run, opt);
      return run;
    }
    case OutcomeKind::Ambiguous: run.log.push_back(lg); throw FraError("shortcut: ambiguous exact outcome", run);
    case OutcomeKind::Reduce: break;
  }
  std::optional<ShortcutResult> sc = strict_comp_shortcut(aux, s.sol, opt.tol);
  if (!sc) {
    run.log.push_back(lg);
    throw FraError("shortcut: strict complementarity conditions not met", run);
  }
  lg.dim_after = face_dimension(sc->face);
  run.log.push_back(lg);
  push_step(run, sc->direction, sc->face, opt.tol);
  run.cert.phase1_steps = 1;
  run.cert.status = CertStatus::MinimalFaceFound;
  run.cert.slack_hat = sc->slack;
  run.y_hat = sc->y;
  return run;
}

BoundsReport bounds_report(const ConeProduct& K, const std::optional<ConeProduct>& inter, std::optional<int> steps) {
  BoundsReport r;
  r.steps = steps;
  auto add = [&](const ConeProduct& P) {
    for (const ConeBlock& b : P.blocks())
      r.blocks.push_back({b, longest_chain_length(b), dist_to_polyhedrality(b, full_face(b))});
  };
  add(K);
  if (inter) {
    add(*inter);
    // DNN: one PSD(n) block intersected with the orthant on its svec coordinates
    auto dnn_side = [](const ConeProduct& a, const ConeProduct& b) -> Index {
      if (a.size() == 1 && b.size() == 1 && a.block(0).kind == ConeKind::PSD && b.block(0).kind == ConeKind::NonNeg &&
          b.block(0).coords() == a.block(0).coords())
        return a.block(0).size;
      return 0;
    };
    Index n = dnn_side(K, *inter);
    if (n == 0) n = dnn_side(*inter, K);
    if (n > 0) {
      r.row = "dnn";
      r.dnn_side = n;
      r.classic = int(1 + n * (n + 1) / 2);
      r.poly = int(n);
      return r;
    }
    r.row = "intersection";
    r.classic = 1;
    r.poly = 1;
    for (const BlockBound& b : r.blocks) {
      r.classic += b.chain - 1;
      r.poly += b.dist_poly;
    }
    return r;
  }
  if (K.size() == 1) {
    r.row = "single";
    r.classic = r.blocks[0].chain;
    r.poly = 1 + r.blocks[0].dist_poly;
    return r;
  }
  bool soc_psd = true;
  int r1 = 0, sum_n = 0;
  for (const ConeBlock& b : K.blocks()) {
    if (b.kind == ConeKind::SOC && b.size >= 3) ++r1;
    else if (b.kind == ConeKind::PSD) sum_n += int(b.size);
    else soc_psd = false;
  }
  if (soc_psd) {
    const int r2 = int(K.size()) - r1;
    r.row = "soc-psd";
    r.classic = 1 + 2 * r1 + sum_n;
    r.poly = 1 + r1 + sum_n - r2;
    return r;
  }
  r.row = "product";
  r.classic = 1;
  r.poly = 1;
  for (const BlockBound& b : r.blocks) {
    r.classic += b.chain - 1;
    r.poly += b.dist_poly;
  }
  return r;
}

BoundsReport bounds_report(const ConicLP& prob, std::optional<int> steps) {
  return bounds_report(prob.cone, prob.intersection, steps);
}

namespace {

Matrix orthonormal_span(const std::vector<Vector>& vs, Index n, double tol) {
  if (vs.empty()) return Matrix(n, 0);
  Matrix D(n, Index(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) D.col(Index(i)) = vs[i] / vs[i].norm();
  Eigen::JacobiSVD<Matrix> svd(D, Eigen::ComputeThinU);
  Index r = 0;
  while (r < svd.singularValues().size() && svd.singularValues()(r) > tol) ++r;
  return svd.matrixU().leftCols(r);
}

Matrix kernel_basis(const Matrix& A, double tol) {
  const Index n = A.cols();
  if (A.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullV);
  const double thr = tol * std::max(1.0, svd.singularValues().size() ? svd.singularValues()(0) : 0.0);
  Index r = 0;
  while (r < svd.singularValues().size() && svd.singularValues()(r) > thr) ++r;
  return svd.matrixV().rightCols(n - r);
}

/// Extreme rays of a polyhedral face (ambient coordinates).
std::vector<Vector> face_generators(const FaceDescriptor& F) {
  std::vector<Vector> g;
  const Index n = F.cone.dim();
  for (std::size_t j = 0; j < F.blocks.size(); ++j) {
    const ConeBlock& b = F.cone.block(j);
    const Index off = F.cone.offset(j);
    auto put = [&](const Vector& v) {
      Vector x = Vector::Zero(n);
      x.segment(off, b.coords()) = v;
      g.push_back(x);
    };
    if (auto* nf = std::get_if<NonNegFace>(&F.blocks[j])) {
      for (Index i : nf->support) put(Vector::Unit(b.coords(), i));
    } else if (auto* sf = std::get_if<SocFace>(&F.blocks[j])) {
      if (sf->state == SocFace::State::Ray) put(sf->ray);
      else if (sf->state == SocFace::State::Full) {
        if (b.size == 1) put(Vector::Ones(1));
        else if (b.size == 2) {
          Vector v(2);
          v << 1, 1;
          put(v);
          v << 1, -1;
          put(v);
        } else {
          throw std::logic_error("face_generators: nonpolyhedral face");
        }
      }
    } else {
      const Matrix& U = std::get<PsdFace>(F.blocks[j]).basis;
      if (U.cols() > 1) throw std::logic_error("face_generators: nonpolyhedral face");
      if (U.cols() == 1) put(svec(U.col(0) * U.col(0).transpose()));
    }
  }
  return g;
}

}  // namespace

WeakInfeasibilityReport analyze_not_strongly_infeasible(const ConicLP& prob, const FraOptions& opt) {
  prob.validate();
  if (prob.intersection) throw std::invalid_argument("analyzer: duplicate intersection problems first");
  const Index n = prob.cols(), m = prob.rows();
  WeakInfeasibilityReport rep;
  rep.bound = sum_dist_poly(prob.cone);
  FraOptions sub = opt;
  sub.classify_weak = false;

  // (P_feas) as a dual-form problem: slack N' w ranges over ker A, c = 0
  const Matrix Nk = kernel_basis(prob.A, 1e-10);
  ConicLP pf;
  pf.cone = prob.cone;
  pf.A = -Nk.transpose();
  pf.b = Vector::Zero(pf.A.rows());
  pf.c = Vector::Zero(n);
  NumericFinder nf(opt.ipm);
  FraRun p1 = fra_poly_phase1(pf, nf, sub);
  if (p1.cert.status != CertStatus::PPSRestored) throw std::runtime_error("analyzer: phase 1 on (P_feas) did not restore PPS");
  // y with c - A^T y in the dual of face k: dual-form problem over the reduced face
  auto reduced_dual = [&](const FaceDescriptor& F) {
    FaceEmbedding emb = FaceEmbedding::of(F);
    ConicLP sp;
    sp.cone = emb.reduced_cone;
    sp.A = prob.A * emb.phi;
    sp.b = Vector::Zero(m);
    sp.c = emb.phi.transpose() * prob.c;
    return std::make_pair(emb, sp);
  };
  // shortest prefix d_1..d_k that already admits y_hat
  const std::size_t L = p1.cert.directions.size();
  bool found = false;
  for (std::size_t k = 0; k < L && !found; ++k) {
    auto [emb, sp] = reduced_dual(p1.cert.faces[k]);
    try {
      NumericFinder nfk(opt.ipm);
      FraRun rk = fra_poly(sp, nfk, sub);
      if (rk.cert.status != CertStatus::MinimalFaceFound || !verify_certificate(sp, rk.cert, opt.tol).ok) continue;
      rep.directions.assign(p1.cert.directions.begin(), p1.cert.directions.begin() + std::ptrdiff_t(k));
      rep.terminal = p1.cert.faces[k];
      found = true;
    } catch (const std::exception&) {
      continue;
    }
  }
  if (!found) {
    rep.directions = p1.cert.directions;
    rep.terminal = p1.cert.faces.back();
  }
  auto [emb, sp] = reduced_dual(rep.terminal);
  NumericFinder nf2(opt.ipm);
  FraRun r2 = fra_poly(sp, nf2, sub);
  if (r2.cert.status == CertStatus::MinimalFaceFound) {
    rep.y_hat = recover_y(sp, *r2.cert.slack_hat);
    rep.s_hat = prob.c - prob.A.transpose() * rep.y_hat;
  } else {
    // strongly infeasible reduced problem: explicit certificate from the generic pair
    ReducedProblem view = reduce_problem(sp, FaceEmbedding::of(FaceDescriptor::full(sp.cone)));
    Vector x;
    if (view.infeasibility) {
      x = *view.infeasibility;
    } else {
      AuxPair aux = build_aux_pair(sp, view, AuxPhase::Generic);
      NumericFinder nf3(opt.ipm);
      AuxOutcome out = interpret(aux, nf3.solve(aux), opt.tol);
      if (out.kind != OutcomeKind::Infeasible) throw std::runtime_error("analyzer: no strict certificate found for an infeasible reduced problem");
      x = out.direction;
    }
    rep.certificate = emb.embed(x);
    rep.strongly_infeasible = true;
    return rep;
  }

  rep.basis = orthonormal_span(rep.directions, n, 1e-9);
  rep.dim = rep.basis.cols();
  rep.s_hat_in_dual_face = dual_face_contains(rep.terminal, rep.s_hat / (1.0 + rep.s_hat.norm()), opt.tol);

  rep.terminal_polyhedral = is_polyhedral(rep.terminal);
  if (rep.terminal_polyhedral) {
    // x in K* cap L'^perp is x in the terminal face; a certificate needs <s_hat, g> < 0 for a generator g
    rep.no_certificate_exact = true;
    for (const Vector& g : face_generators(rep.terminal)) {
      Rational ip = 0;
      for (Index i = 0; i < n; ++i) ip += to_rational(rep.s_hat(i)) * to_rational(g(i));
      if (ip < 0) rep.no_certificate_exact = false;
    }
  }

  // aux pair on (V', K): V' = s_hat + L'
  ConicLP vp;
  vp.cone = prob.cone;
  vp.A = rep.basis.transpose();
  vp.b = Vector::Zero(vp.A.rows());
  vp.c = rep.s_hat;
  ReducedProblem view = reduce_problem(vp, FaceEmbedding::of(FaceDescriptor::full(vp.cone)));
  if (view.infeasibility) {
    rep.no_certificate_aux = to_string(OutcomeKind::Infeasible);
  } else {
    AuxPair aux = build_aux_pair(vp, view, AuxPhase::Generic);
    AuxOutcome out;
    if (is_polyhedral(FaceDescriptor::full(vp.cone))) {
      ExactFinder ex;
      out = interpret(aux, ex.solve(aux), opt.tol);
    } else {
      NumericFinder nf4(opt.ipm);
      out = interpret(aux, nf4.solve(aux), opt.tol);
    }
    rep.no_certificate_aux = to_string(out.kind);
  }
  return rep;
}

AlternativeReport partial_alternative(const Matrix& A, const ConeProduct& K, double tol, const IpmSettings& ipm) {
  if (A.cols() != K.dim()) throw std::invalid_argument("A: column count does not match cone dimension");
  const Index n = K.dim(), m = A.rows();
  std::vector<bool> nonpoly(K.size());
  for (std::size_t j = 0; j < K.size(); ++j) nonpoly[j] = !is_polyhedral(K.block(j), full_face(K.block(j)));
  AlternativeReport rep;
  if (std::none_of(nonpoly.begin(), nonpoly.end(), [](bool b) { return b; })) {
    rep.side_b = true;
    rep.s = Vector::Zero(n);
    return rep;
  }

  // side A: phase-1 pair with c = 0; e vanishes on the polyhedral blocks
  ConicLP prob;
  prob.cone = K;
  prob.A = A;
  prob.b = Vector::Zero(m);
  prob.c = Vector::Zero(n);
  ReducedProblem view = reduce_problem(prob, FaceEmbedding::of(FaceDescriptor::full(K)));
  AuxPair aux = build_aux_pair(prob, view, AuxPhase::Phase1);
  AuxSolution sol;
  if (is_polyhedral(FaceDescriptor::full(K))) {
    ExactFinder ex;
    sol = ex.solve(aux);
  } else {
    NumericFinder nf(ipm);
    sol = nf.solve(aux);
  }
  AuxOutcome out = interpret(aux, sol, tol);
  rep.aux_outcome = to_string(out.kind);
  if (out.kind == OutcomeKind::Reduce || out.kind == OutcomeKind::Infeasible) {
    Vector x = out.direction / out.direction.norm();
    double e_part = 0;
    for (std::size_t j = 0; j < K.size(); ++j)
      if (nonpoly[j]) e_part += jordan_identity(K.block(j)).dot(x.segment(K.offset(j), K.block(j).coords()));
    const bool ok = (m == 0 || (A * x).norm() <= tol * (1.0 + A.norm())) && contains(K, x, tol) && e_part > tol;
    if (ok) {
      rep.side_a = true;
      rep.x = x;
    }
  }

  // side B: max tau - M sigma s.t. (A^T y)_j - tau e_j in K_j on nonpolyhedral blocks,
  // (A^T y)_j + sigma e_j in K_j on the others, sigma >= 0, ||A^T y|| <= 1
  constexpr double kPenalty = 1e4;
  std::vector<ConeBlock> blocks = K.blocks();
  blocks.push_back(ConeBlock::nonneg(1));
  blocks.push_back(ConeBlock::soc(n + 1));
  ConicLP mp;
  mp.cone = ConeProduct(blocks);
  const Index nm = mp.cone.dim();
  mp.A = Matrix::Zero(m + 2, nm);
  mp.A.leftCols(n).topRows(m) = -A;
  mp.A.rightCols(n).topRows(m) = -A;
  for (std::size_t j = 0; j < K.size(); ++j) {
    const Index off = K.offset(j), len = K.block(j).coords();
    const Vector e = jordan_identity(K.block(j));
    if (nonpoly[j]) mp.A.row(m).segment(off, len) = e.transpose();
    else mp.A.row(m + 1).segment(off, len) = -e.transpose();
  }
  mp.A(m + 1, n) = -1.0;
  mp.b = Vector::Zero(m + 2);
  mp.b(m) = 1.0;
  mp.b(m + 1) = -kPenalty;
  mp.c = Vector::Zero(nm);
  mp.c(n + 1) = 1.0;
  IpmResult r = solve_ipm(mp, ipm);
  if (r.y.size() != m + 2) throw std::runtime_error("partial_alternative: margin solve produced no finite iterate");
  const Vector y = r.y.head(m);
  Vector s = A.transpose() * y;
  double margin = std::numeric_limits<double>::infinity();
  bool poly_ok = true;
  for (std::size_t j = 0; j < K.size(); ++j) {
    const ConeBlock& b = K.block(j);
    const Vector sj = s.segment(K.offset(j), b.coords());
    if (nonpoly[j]) margin = std::min(margin, interior_margin(b, sj));
    else poly_ok = poly_ok && contains(b, sj, tol);
  }
  rep.margin = margin;
  if (poly_ok && margin > tol * (1.0 + s.norm())) {
    rep.side_b = true;
    rep.s = s;
  }
  return rep;
}

}  // namespace conefract
