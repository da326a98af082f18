#include "conefract/solvers/ipm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace conefract {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix svec_operator(const Matrix& R) {
  // matrix of Y -> R Y R^T in svec coordinates
  const Index n = R.rows();
  const Index len = svec_length(n);
  Matrix M(len, len);
  for (Index k = 0; k < len; ++k) M.col(k) = svec(R * smat(Vector::Unit(len, k)) * R.transpose());
  return M;
}
}  // namespace

void IpmSettings::validate() const {
  if (!(feas_tol > 0 && gap_tol > 0)) throw std::invalid_argument("IPM tolerances must be positive");
  if (!(step_fraction > 0 && step_fraction < 1)) throw std::invalid_argument("step_fraction must lie in (0,1)");
  if (max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");
}

Vector jordan_identity(const ConeBlock& b) {
  switch (b.kind) {
    case ConeKind::NonNeg: return Vector::Ones(b.size);
    case ConeKind::SOC: return Vector::Unit(b.size, 0);
    case ConeKind::PSD: return svec(Matrix::Identity(b.size, b.size));
  }
  return {};
}

double cone_degree(const ConeBlock& b) {
  switch (b.kind) {
    case ConeKind::NonNeg: return double(b.size);
    case ConeKind::SOC: return 1.0;
    case ConeKind::PSD: return double(b.size);
  }
  return 0;
}

double interior_margin(const ConeBlock& b, const Eigen::Ref<const Vector>& x) {
  switch (b.kind) {
    case ConeKind::NonNeg: return x.minCoeff();
    case ConeKind::SOC: return b.size == 1 ? x(0) : x(0) - x.tail(b.size - 1).norm();
    case ConeKind::PSD: {
      Eigen::SelfAdjointEigenSolver<Matrix> es(smat(x), Eigen::EigenvaluesOnly);
      return es.eigenvalues()(0);
    }
  }
  return 0;
}

Vector jordan_product(const ConeBlock& b, const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v) {
  switch (b.kind) {
    case ConeKind::NonNeg: return u.cwiseProduct(v);
    case ConeKind::SOC: {
      Vector w(b.size);
      w(0) = u.dot(v);
      w.tail(b.size - 1) = u(0) * v.tail(b.size - 1) + v(0) * u.tail(b.size - 1);
      return w;
    }
    case ConeKind::PSD: {
      Matrix U = smat(u), V = smat(v);
      return svec(0.5 * (U * V + V * U));
    }
  }
  return {};
}

NtScaling nt_scaling(const ConeBlock& b, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& s) {
  NtScaling sc;
  switch (b.kind) {
    case ConeKind::NonNeg: {
      Vector g = (x.array() / s.array()).sqrt();
      sc.G = g.asDiagonal();
      sc.Ginv = g.cwiseInverse().asDiagonal();
      sc.lambda = (x.array() * s.array()).sqrt();
      break;
    }
    case ConeKind::SOC: {
      const Index k = b.size;
      if (k == 1) {
        double g = std::sqrt(x(0) / s(0));
        sc.G = Matrix::Constant(1, 1, g);
        sc.Ginv = Matrix::Constant(1, 1, 1.0 / g);
        sc.lambda = Vector::Constant(1, std::sqrt(x(0) * s(0)));
        break;
      }
      Vector J = Vector::Ones(k);
      J(0) = 1.0;
      J.tail(k - 1).setConstant(-1.0);
      double xn = std::sqrt(std::max(x(0) * x(0) - x.tail(k - 1).squaredNorm(), 1e-300));
      double sn = std::sqrt(std::max(s(0) * s(0) - s.tail(k - 1).squaredNorm(), 1e-300));
      Vector xb = x / xn, sb = s / sn;
      double gamma = std::sqrt(std::max(0.5 * (1.0 + xb.dot(sb)), 1e-300));
      Vector w = (xb + J.cwiseProduct(sb)) / (2.0 * gamma);
      Vector v = w;
      v(0) += 1.0;
      v /= std::sqrt(2.0 * v(0));
      double beta = std::sqrt(xn / sn);
      Matrix Jm = J.asDiagonal();
      sc.G = beta * (2.0 * v * v.transpose() - Jm);
      Vector Jv = J.cwiseProduct(v);
      sc.Ginv = (1.0 / beta) * (2.0 * Jv * Jv.transpose() - Jm);
      sc.lambda = sc.Ginv * x;
      break;
    }
    case ConeKind::PSD: {
      Matrix X = smat(x), S = smat(s);
      Eigen::LLT<Matrix> l1(X), l2(S);
      Matrix L1 = l1.matrixL(), L2 = l2.matrixL();
      Eigen::JacobiSVD<Matrix> svd(L2.transpose() * L1, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Vector sig = svd.singularValues();
      Matrix V = svd.matrixV();
      Matrix R = L1 * V * sig.cwiseSqrt().cwiseInverse().asDiagonal();
      Matrix Rinv = sig.cwiseSqrt().asDiagonal() * V.transpose() * L1.triangularView<Eigen::Lower>().solve(Matrix::Identity(b.size, b.size));
      sc.G = svec_operator(R);
      sc.Ginv = svec_operator(Rinv);
      sc.eig = sig;
      sc.lambda = svec(Matrix(sig.asDiagonal()));
      break;
    }
  }
  return sc;
}

Vector jordan_divide(const ConeBlock& b, const NtScaling& sc, const Eigen::Ref<const Vector>& v) {
  const Vector& l = sc.lambda;
  switch (b.kind) {
    case ConeKind::NonNeg: return v.cwiseQuotient(l);
    case ConeKind::SOC: {
      const Index k = b.size;
      if (k == 1) return v.cwiseQuotient(l);
      double det = l(0) * l(0) - l.tail(k - 1).squaredNorm();
      Vector z(k);
      z(0) = (l(0) * v(0) - l.tail(k - 1).dot(v.tail(k - 1))) / det;
      z.tail(k - 1) = (v.tail(k - 1) - z(0) * l.tail(k - 1)) / l(0);
      return z;
    }
    case ConeKind::PSD: {
      Matrix V = smat(v);
      const Index n = b.size;
      Matrix Z(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) Z(i, j) = 2.0 * V(i, j) / (sc.eig(i) + sc.eig(j));
      return svec(Z);
    }
  }
  return {};
}

double max_step(const ConeBlock& b, const NtScaling& sc, const Eigen::Ref<const Vector>& d) {
  const Vector& l = sc.lambda;
  switch (b.kind) {
    case ConeKind::NonNeg: {
      double a = kInf;
      for (Index i = 0; i < d.size(); ++i)
        if (d(i) < 0) a = std::min(a, -l(i) / d(i));
      return a;
    }
    case ConeKind::SOC: {
      const Index k = b.size;
      if (k == 1) return d(0) < 0 ? -l(0) / d(0) : kInf;
      auto jdot = [k](const Vector& u, const Vector& w) { return u(0) * w(0) - u.tail(k - 1).dot(w.tail(k - 1)); };
      Vector dv = d;
      double qa = jdot(dv, dv), qb = jdot(l, dv), qc = jdot(l, l);
      // q(alpha) = qa alpha^2 + 2 qb alpha + qc, qc > 0
      double best = kInf;
      auto consider = [&](double r) {
        if (r > 0 && std::isfinite(r)) best = std::min(best, r);
      };
      if (std::abs(qa) < 1e-300) {
        if (qb < 0) consider(-qc / (2 * qb));
      } else {
        double disc = qb * qb - qa * qc;
        if (disc >= 0) {
          double sq = std::sqrt(disc);
          double q1 = -(qb + (qb >= 0 ? sq : -sq));
          if (q1 != 0) {
            consider(q1 / qa);
            consider(qc / q1);
          }
        }
      }
      if (d(0) < 0) best = std::min(best, -l(0) / d(0));
      return best;
    }
    case ConeKind::PSD: {
      Vector is = sc.eig.cwiseSqrt().cwiseInverse();
      Matrix D = is.asDiagonal() * smat(d) * is.asDiagonal();
      Eigen::SelfAdjointEigenSolver<Matrix> es(D, Eigen::EigenvaluesOnly);
      double mn = es.eigenvalues()(0);
      return mn < 0 ? -1.0 / mn : kInf;
    }
  }
  return kInf;
}

namespace {

struct Workspace {
  const ConicLP& lp;
  std::vector<NtScaling> sc;
  Matrix G, Ginv;
  double nu = 0;

  explicit Workspace(const ConicLP& p) : lp(p) {
    for (const auto& b : p.cone.blocks()) nu += cone_degree(b);
  }

  void scale(const Vector& x, const Vector& s) {
    const Index n = lp.cone.dim();
    G.setZero(n, n);
    Ginv.setZero(n, n);
    sc.clear();
    for (std::size_t j = 0; j < lp.cone.size(); ++j) {
      const ConeBlock& b = lp.cone.block(j);
      Index o = lp.cone.offset(j), k = b.coords();
      sc.push_back(nt_scaling(b, x.segment(o, k), s.segment(o, k)));
      G.block(o, o, k, k) = sc.back().G;
      Ginv.block(o, o, k, k) = sc.back().Ginv;
    }
  }

  Vector lambda() const {
    Vector l(lp.cone.dim());
    for (std::size_t j = 0; j < sc.size(); ++j) l.segment(lp.cone.offset(j), lp.cone.block(j).coords()) = sc[j].lambda;
    return l;
  }

  template <typename Fn>
  Vector blockwise(Fn fn) const {
    Vector out(lp.cone.dim());
    for (std::size_t j = 0; j < lp.cone.size(); ++j) {
      const ConeBlock& b = lp.cone.block(j);
      out.segment(lp.cone.offset(j), b.coords()) = fn(j, b, lp.cone.offset(j), b.coords());
    }
    return out;
  }

  double step(const Vector& dx_scaled) const {
    double a = kInf;
    for (std::size_t j = 0; j < sc.size(); ++j) {
      const ConeBlock& b = lp.cone.block(j);
      a = std::min(a, max_step(b, sc[j], dx_scaled.segment(lp.cone.offset(j), b.coords())));
    }
    return a;
  }
};

struct NewtonSolver {
  Matrix B;
  Eigen::ColPivHouseholderQR<Matrix> qr;  // of B^T, so M = B B^T is never formed

  void factor(const Matrix& A, const Matrix& G) {
    B = A * G;
    if (B.rows() > 0) qr.compute(B.transpose());
  }

  Vector solve_once(const Vector& rhs) const {
    // B B^T y = rhs  <=>  R^T R (P^T y) = P^T rhs
    const Index m = B.rows(), r = qr.rank();
    const Matrix& QR = qr.matrixQR();
    Vector z = qr.colsPermutation().transpose() * rhs;
    Vector u = Vector::Zero(m);
    u.head(r) = QR.topLeftCorner(r, r).triangularView<Eigen::Upper>().transpose().solve(z.head(r));
    u.head(r) = QR.topLeftCorner(r, r).triangularView<Eigen::Upper>().solve(u.head(r));
    return qr.colsPermutation() * u;
  }

  Vector solve(const Vector& rhs) const {
    if (B.rows() == 0) return Vector(0);
    Vector x = solve_once(rhs);
    Vector r = rhs - B * (B.transpose() * x);  // one refinement sweep
    x += solve_once(r);
    return x;
  }
};

void make_interior(const ConeProduct& K, Vector& v) {
  for (std::size_t j = 0; j < K.size(); ++j) {
    const ConeBlock& b = K.block(j);
    auto vj = v.segment(K.offset(j), b.coords());
    double m = interior_margin(b, vj);
    double target = std::max(1e-2, 1e-2 * vj.norm());
    if (!(m >= target)) vj += (target - m) * jordan_identity(b);
    if (interior_margin(b, vj) < target * 0.5) vj = jordan_identity(b);
  }
}

bool strictly_interior(const ConeProduct& K, const Vector& v) {
  for (std::size_t j = 0; j < K.size(); ++j)
    if (!(interior_margin(K.block(j), v.segment(K.offset(j), K.block(j).coords())) > 0)) return false;
  return true;
}

}  // namespace

IpmResult solve_ipm(const ConicLP& lp, const IpmSettings& st, const std::optional<IpmStart>& start) {
  st.validate();
  const Index n = lp.cone.dim(), m = lp.rows();
  if (lp.A.cols() != n || lp.b.size() != m || lp.c.size() != n) throw std::invalid_argument("IPM: dimension mismatch");
  Workspace ws(lp);
  Vector x, y, s;
  if (start) {
    x = start->x;
    y = start->y;
    s = start->s;
    make_interior(lp.cone, x);
    make_interior(lp.cone, s);
  } else {
    // identity start scaled to the size of a least-squares x and of c
    const Vector xls = m > 0 ? Vector(lp.A.completeOrthogonalDecomposition().solve(lp.b)) : Vector::Zero(n);
    const double xi = std::max(1.0, xls.size() ? xls.cwiseAbs().maxCoeff() : 0.0);
    const double si = std::max(1.0, n ? lp.c.cwiseAbs().maxCoeff() : 0.0);
    const Vector e = ws.blockwise([](std::size_t, const ConeBlock& b, Index, Index) { return jordan_identity(b); });
    x = xi * e;
    s = si * e;
    y = Vector::Zero(m);
  }

  const double bn = 1.0 + lp.b.norm(), cn = 1.0 + lp.c.norm();
  IpmResult best;
  double best_score = kInf;
  auto record = [&](int it) {
    IpmResult r;
    r.x = x;
    r.y = y;
    r.s = s;
    r.pobj = lp.c.dot(x);
    r.dobj = lp.b.dot(y);
    r.pres = (lp.b - lp.A * x).norm() / bn;
    r.dres = (lp.c - lp.A.transpose() * y - s).norm() / cn;
    r.complementarity = x.dot(s);
    r.mu = ws.nu > 0 ? r.complementarity / ws.nu : 0.0;
    r.iterations = it;
    bool ok = r.pres <= st.feas_tol && r.dres <= st.feas_tol &&
              r.complementarity <= st.gap_tol * (1.0 + std::abs(r.pobj));
    r.status = ok ? IpmStatus::Optimal : IpmStatus::IterationLimit;
    double score = std::max({r.pres, r.dres, r.complementarity / (1.0 + std::abs(r.pobj))});
    if (std::isfinite(score) && (ok || score < best_score)) {
      best_score = score;
      best = r;
    }
    return ok;
  };

  if (n == 0) {
    record(0);
    best.status = IpmStatus::Optimal;
    return best;
  }

  NewtonSolver ns;
  for (int it = 0; it <= st.max_iters; ++it) {
    if (record(it) || it == st.max_iters) break;
    ws.scale(x, s);
    if (!ws.G.allFinite() || !ws.Ginv.allFinite()) break;
    const Vector lam = ws.lambda();
    const double mu = x.dot(s) / ws.nu;
    const Vector rp = lp.b - lp.A * x;
    const Vector rd = lp.c - lp.A.transpose() * y - s;
    ns.factor(lp.A, ws.G);
    const Matrix& G = ws.G;
    const Matrix& Ginv = ws.Ginv;

    auto direction = [&](const Vector& rc, Vector& dx, Vector& dy, Vector& ds) {
      Vector rhs = rp - lp.A * (G * rc) + lp.A * (G * (G.transpose() * rd));
      dy = ns.solve(rhs);
      dx = G * (G.transpose() * (lp.A.transpose() * dy - rd) + rc);
      ds = rd - lp.A.transpose() * dy;
      // refinement on A dx = rp; the correction leaves the other two equations unchanged
      for (int k = 0; k < 2; ++k) {
        const Vector e = rp - lp.A * dx;
        if (!(e.norm() > 1e-15 * (1.0 + rp.norm()))) break;
        const Vector dyc = ns.solve(e);
        dx += G * (G.transpose() * (lp.A.transpose() * dyc));
        dy += dyc;
        ds -= lp.A.transpose() * dyc;
      }
    };

    Vector dx, dy, ds;
    direction(-lam, dx, dy, ds);
    Vector dxs = Ginv * dx, dss = G.transpose() * ds;
    double a_aff = std::min({1.0, ws.step(dxs), ws.step(dss)});
    double mu_aff = (lam + a_aff * dxs).dot(lam + a_aff * dss) / ws.nu;
    double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    Vector rc = ws.blockwise([&](std::size_t j, const ConeBlock& b, Index o, Index k) {
      Vector target = sigma * mu * jordan_identity(b) - jordan_product(b, dxs.segment(o, k), dss.segment(o, k));
      return Vector(-lam.segment(o, k) + jordan_divide(b, ws.sc[j], target));
    });
    direction(rc, dx, dy, ds);
    dxs = Ginv * dx;
    dss = G.transpose() * ds;
    double a = std::min(1.0, st.step_fraction * std::min(ws.step(dxs), ws.step(dss)));
    if (!(a > 1e-14) || !dx.allFinite() || !dy.allFinite() || !ds.allFinite()) break;
    // the scaled step bound can be off when the scaling is ill-conditioned; backtrack until interior
    int tries = 0;
    while (tries < 30 && !(strictly_interior(lp.cone, x + a * dx) && strictly_interior(lp.cone, s + a * ds))) {
      a *= 0.5;
      ++tries;
    }
    if (tries == 30) break;
    x += a * dx;
    y += a * dy;
    s += a * ds;
  }
  return best;
}

}  // namespace conefract
