#include "conefract/solvers/finders.hpp"

#include "conefract/solvers/simplex.hpp"

#include <boost/multiprecision/eigen.hpp>

#include <cmath>
#include <limits>

namespace conefract {

Rational to_rational(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("to_rational: non-finite value");
  if (std::abs(v) < 1e-12) return Rational(0);
  const double x = std::abs(v);
  const int sign = v < 0 ? -1 : 1;
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 40; ++it) {
    const double a = std::floor(r);
    if (a > 1e12) break;
    const long long ai = static_cast<long long>(a);
    const long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > 1000000) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(double(h1) / double(k1) - x) <= 1e-13 * x) return Rational(sign * h1, k1);
    const double f = r - a;
    if (f < 1e-15) break;
    r = 1.0 / f;
  }
  int e = 0;
  const double m = std::frexp(v, &e);
  const long long mant = static_cast<long long>(std::ldexp(m, 53));
  e -= 53;
  boost::multiprecision::mpz_int p(mant), q(1);
  if (e > 0) p <<= e;
  else q <<= -e;
  return Rational(p, q);
}

namespace {

bool coordinatewise(const ConeProduct& K) {
  for (const ConeBlock& b : K.blocks())
    if (b.kind != ConeKind::NonNeg && b.size != 1) return false;
  return true;
}

/// Cut between the smallest x_i with x_i > s_i and the largest x_i with x_i <= s_i.
std::optional<double> partition_cut(const AuxPair& aux, const IpmResult& r, double dnorm) {
  if (!coordinatewise(aux.view.red.cone) || !(dnorm > 0)) return std::nullopt;
  double min_b = std::numeric_limits<double>::infinity(), max_n = 0;
  for (Index i = 0; i < aux.n_red(); ++i) {
    if (r.x(i) > r.s(i)) min_b = std::min(min_b, r.x(i));
    else max_n = std::max(max_n, r.x(i));
  }
  if (!std::isfinite(min_b)) return std::nullopt;
  if (max_n > 0 && min_b < 1e4 * max_n) return std::nullopt;
  const double cut = max_n > 0 ? std::sqrt(min_b * max_n) : 0.1 * min_b;
  return cut / dnorm;
}

}  // namespace

AuxSolution lift_aux_solution(const AuxPair& aux, const IpmResult& r) {
  const Index n = aux.n_red();
  const Index k = aux.lp.rows() - 2;
  AuxSolution s;
  s.x = aux.view.lift_direction(r.x.head(n));
  s.t = r.x(n);
  s.w = r.x(n + 1);
  s.y1 = r.y(0);
  s.y2 = r.y(1);
  s.y3 = s.y1 * aux.view.y0 + aux.view.N * r.y.tail(k);
  s.dual_slack = s.y1 * aux.prob.c - s.y2 * aux.e_amb - aux.prob.A.transpose() * s.y3;
  s.t_slack = r.s(n);
  s.w_slack = r.s(n + 1);
  s.gap = std::abs(r.pobj - r.dobj);
  s.resolution = 10.0 * std::sqrt(std::max(0.0, r.complementarity));
  s.exact = false;
  s.partition_tol = partition_cut(aux, r, s.x.norm());
  return s;
}

AuxSolution NumericFinder::solve(const AuxPair& aux) {
  last_ = solve_ipm(aux.lp, settings_, aux.warm);
  return lift_aux_solution(aux, last_);
}

bool NumericFinder::tighten() {
  if (settings_.feas_tol <= 1e-14) return false;
  settings_.feas_tol /= 10;
  settings_.gap_tol /= 10;
  settings_.max_iters += 100;
  return true;
}

namespace {

using MatQ = MatrixS<Rational>;
using VecQ = VectorS<Rational>;

VecQ rational_vec(const Eigen::Ref<const Vector>& v) {
  VecQ q(v.size());
  for (Index i = 0; i < v.size(); ++i) q(i) = to_rational(v(i));
  return q;
}

MatQ rational_mat(const Eigen::Ref<const Matrix>& M) {
  MatQ q(M.rows(), M.cols());
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) q(i, j) = to_rational(M(i, j));
  return q;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace

AuxSolution ExactFinder::solve(const AuxPair& aux) {
  const FaceDescriptor& F = aux.face();
  const std::vector<bool>& relaxed = aux.view.emb.relaxed;
  const ConicLP& P = aux.prob;
  const Index n = P.cols(), m = P.rows();

  // x in F-hat*: direct nonneg coordinates, free coordinates, generator rows g.x >= 0, span rows h.x = 0
  std::vector<bool> direct(std::size_t(n), false);
  std::vector<Vector> gens, spans;
  for (std::size_t j = 0; j < F.blocks.size(); ++j) {
    const ConeBlock& b = F.cone.block(j);
    const Index off = F.cone.offset(j), len = b.coords();
    auto placed = [&](const Eigen::Ref<const Vector>& v) {
      Vector g = Vector::Zero(n);
      g.segment(off, len) = v;
      return g;
    };
    if (!relaxed.empty() && relaxed[j]) {
      Matrix S = span_basis(b, F.blocks[j]);
      for (Index k = 0; k < S.cols(); ++k) spans.push_back(placed(S.col(k)));
      continue;
    }
    if (auto* nf = std::get_if<NonNegFace>(&F.blocks[j])) {
      for (Index i : nf->support) direct[std::size_t(off + i)] = true;
    } else if (auto* sf = std::get_if<SocFace>(&F.blocks[j])) {
      if (sf->state == SocFace::State::Ray) {
        gens.push_back(placed(sf->ray));
      } else if (sf->state == SocFace::State::Full) {
        if (b.size == 1) {
          direct[std::size_t(off)] = true;
        } else if (b.size == 2) {
          Vector g(2);
          g << 1, 1;
          gens.push_back(placed(g));
          g << 1, -1;
          gens.push_back(placed(g));
        } else {
          throw FinderError("exact finder: block " + std::to_string(j) + " is a nonpolyhedral SOC face");
        }
      }
    } else {
      const Matrix& U = std::get<PsdFace>(F.blocks[j]).basis;
      if (U.cols() == 1) gens.push_back(placed(svec(U.col(0) * U.col(0).transpose())));
      else if (U.cols() >= 2) throw FinderError("exact finder: block " + std::to_string(j) + " is a nonpolyhedral PSD face");
    }
  }

  // columns: x (direct 1, free 2) | t | w | sigma
  std::vector<Index> col(static_cast<std::size_t>(n));
  Index nx = 0;
  for (Index i = 0; i < n; ++i) {
    col[std::size_t(i)] = nx;
    nx += direct[std::size_t(i)] ? 1 : 2;
  }
  const Index ng = Index(gens.size()), nh = Index(spans.size());
  const Index ct = nx, cw = nx + 1, cs = nx + 2, ncols = nx + 2 + ng;
  const Index nrows = 2 + m + ng + nh;

  const VecQ cq = rational_vec(P.c), eq = rational_vec(aux.e_amb), esq = rational_vec(aux.e_star_amb);
  const MatQ Aq = rational_mat(P.A);
  MatQ L = MatQ::Zero(nrows, ncols);
  VecQ rhs = VecQ::Zero(nrows), obj = VecQ::Zero(ncols);
  auto put_x = [&](Index row, Index i, const Rational& v) {
    if (v == 0) return;
    const Index c0 = col[std::size_t(i)];
    L(row, c0) = v;
    if (!direct[std::size_t(i)]) L(row, c0 + 1) = -v;
  };
  Rational ce = 0;
  for (Index i = 0; i < n; ++i) ce += cq(i) * esq(i);
  for (Index i = 0; i < n; ++i) {
    put_x(0, i, -cq(i));
    put_x(1, i, eq(i));
  }
  L(0, ct) = ce + 1;
  L(0, cw) = -1;
  L(1, cw) = 1;
  rhs(1) = 1;
  const VecQ Aes = Aq * esq;
  for (Index r = 0; r < m; ++r) {
    for (Index i = 0; i < n; ++i) put_x(2 + r, i, Aq(r, i));
    L(2 + r, ct) = -Aes(r);
  }
  for (Index g = 0; g < ng; ++g) {
    const VecQ gq = rational_vec(gens[std::size_t(g)]);
    for (Index i = 0; i < n; ++i) put_x(2 + m + g, i, gq(i));
    L(2 + m + g, cs + g) = -1;
  }
  for (Index h = 0; h < nh; ++h) {
    const VecQ hq = rational_vec(spans[std::size_t(h)]);
    for (Index i = 0; i < n; ++i) put_x(2 + m + ng + h, i, hq(i));
  }
  obj(ct) = 1;

  VecQ xs, ys;
  info_ = {};
  info_.rows = nrows;
  info_.cols = ncols;
  if (strict_) {
    StrictLpResult<Rational> r = simplex_solve_strict<Rational>(L, rhs, obj);
    if (r.lp.status != LpStatus::Optimal) throw FinderError("exact finder: aux LP not optimal (internal error)");
    xs = r.x;
    ys = r.y;
    info_.strict = r.strict;
    info_.pivots = r.lp.pivots;
  } else {
    LpResult<Rational> r = simplex_solve<Rational>(L, rhs, obj);
    if (r.status != LpStatus::Optimal) throw FinderError("exact finder: aux LP not optimal (internal error)");
    xs = r.x;
    ys = r.y;
    info_.pivots = r.pivots;
  }

  AuxSolution s;
  s.x = Vector(n);
  for (Index i = 0; i < n; ++i) {
    const Index c0 = col[std::size_t(i)];
    Rational v = xs(c0);
    if (!direct[std::size_t(i)]) v -= xs(c0 + 1);
    s.x(i) = to_double(v);
  }
  s.t = to_double(xs(ct));
  s.w = to_double(xs(cw));
  s.y1 = to_double(ys(0));
  s.y2 = to_double(ys(1));
  s.y3 = Vector(m);
  for (Index r = 0; r < m; ++r) s.y3(r) = to_double(ys(2 + r));
  s.dual_slack = s.y1 * P.c - s.y2 * aux.e_amb - P.A.transpose() * s.y3;
  Rational tsl = 1 - ys(0) * (ce + 1);
  for (Index r = 0; r < m; ++r) tsl += Aes(r) * ys(2 + r);
  s.t_slack = to_double(tsl);
  s.w_slack = to_double(ys(0) - ys(1));
  s.gap = 0;
  s.resolution = 0;
  s.exact = true;
  return s;
}

OracleScript oracle_script_from_json(const Json& j, Index n) {
  OracleScript s;
  const Json* dirs = &j;
  if (j.is_object()) {
    if (!j.contains("directions")) throw InputError("script.directions", "missing");
    dirs = &j.at("directions");
    if (j.contains("witness_y") && !j.at("witness_y").is_null())
      s.witness_y = vector_from_json(j.at("witness_y"), "script.witness_y");
  }
  if (!dirs->is_array()) throw InputError("script.directions", "expected an array of vectors");
  for (std::size_t k = 0; k < dirs->size(); ++k) {
    const std::string f = "script.directions[" + std::to_string(k) + "]";
    Vector d = vector_from_json((*dirs)[k], f);
    if (n >= 0 && d.size() != n) throw InputError(f, "expected length " + std::to_string(n));
    s.directions.push_back(std::move(d));
  }
  return s;
}

Json oracle_script_to_json(const OracleScript& s) {
  Json j = Json::object();
  Json d = Json::array();
  for (const Vector& v : s.directions) d.push_back(vector_to_json(v));
  j["directions"] = d;
  if (s.witness_y) j["witness_y"] = vector_to_json(*s.witness_y);
  return j;
}

AuxSolution OracleFinder::solve(const AuxPair& aux) {
  const Index n = aux.prob.cols();
  if (cursor_ < script_.directions.size()) {
    const Vector& d = script_.directions[cursor_++];
    if (d.size() != n) throw FinderError("oracle: direction " + std::to_string(cursor_ - 1) + " has wrong length");
    try {
      return direction_solution(aux, d);
    } catch (const std::invalid_argument& e) {
      throw FinderError("oracle: direction " + std::to_string(cursor_ - 1) + ": " + e.what());
    }
  }
  if (!script_.witness_y) throw FinderError("oracle: script exhausted and no witness y supplied");
  if (script_.witness_y->size() != aux.prob.rows()) throw FinderError("oracle: witness y has wrong length");
  AuxSolution s;
  s.x = Vector::Zero(n);
  s.t = 1.0;
  s.y1 = 1.0;
  s.y3 = *script_.witness_y;
  s.dual_slack = aux.prob.c - aux.prob.A.transpose() * s.y3;
  s.exact = true;
  s.sentinel = true;
  return s;
}

}  // namespace conefract
