#include "conefract/intersect.hpp"

#include "conefract/solvers/finders.hpp"

#include <algorithm>
#include <cmath>

namespace conefract {

DupMapping duplicate(const ConicLP& prob) {
  if (!prob.intersection) throw std::invalid_argument("intersection: field missing");
  const Index n = prob.cone.dim();
  if (prob.intersection->dim() != n)
    throw std::invalid_argument("intersection: coordinate count " + std::to_string(prob.intersection->dim()) +
                                " differs from cone coordinate count " + std::to_string(n));
  DupMapping m;
  m.n = n;
  m.k1 = prob.cone;
  m.k2 = *prob.intersection;
  std::vector<ConeBlock> blocks = m.k1.blocks();
  blocks.insert(blocks.end(), m.k2.blocks().begin(), m.k2.blocks().end());
  m.dup.cone = ConeProduct(blocks);
  m.dup.A.resize(prob.rows(), 2 * n);
  m.dup.A << prob.A, prob.A;
  m.dup.b = prob.b;
  m.dup.c.resize(2 * n);
  m.dup.c << prob.c, prob.c;
  return m;
}

FacePair split_face(const DupMapping& m, const FaceDescriptor& F) {
  if (!(F.cone == m.dup.cone)) throw std::invalid_argument("split_face: face is not over the duplicated cone");
  FacePair p;
  p.f1.cone = m.k1;
  p.f2.cone = m.k2;
  const std::size_t r1 = m.k1.size();
  p.f1.blocks.assign(F.blocks.begin(), F.blocks.begin() + std::ptrdiff_t(r1));
  p.f2.blocks.assign(F.blocks.begin() + std::ptrdiff_t(r1), F.blocks.end());
  return p;
}

FaceDescriptor join_faces(const DupMapping& m, const FacePair& p) {
  FaceDescriptor F;
  F.cone = m.dup.cone;
  F.blocks = p.f1.blocks;
  F.blocks.insert(F.blocks.end(), p.f2.blocks.begin(), p.f2.blocks.end());
  return F;
}

bool face_pair_contains(const FacePair& p, const Eigen::Ref<const Vector>& x, double tol) {
  return face_contains(p.f1, x, tol) && face_contains(p.f2, x, tol);
}

IntersectionCertificate recombine(const DupMapping& m, const ReductionCertificate& dup_cert) {
  IntersectionCertificate c;
  c.dup = dup_cert;
  c.status = dup_cert.status;
  for (const Vector& d : dup_cert.directions) {
    if (d.size() != 2 * m.n) throw std::invalid_argument("recombine: direction length");
    c.parts1.push_back(m.first(d));
    c.parts2.push_back(m.second(d));
    c.directions.push_back(m.first(d) + m.second(d));
  }
  for (const FaceDescriptor& F : dup_cert.faces) c.faces.push_back(split_face(m, F));
  if (dup_cert.slack_hat) c.slack_hat = m.first(*dup_cert.slack_hat);
  if (dup_cert.slack_prime) c.slack_prime = m.first(*dup_cert.slack_prime);
  return c;
}

namespace {

VerifyReport fail(VerifyReport rep, int step, const std::string& msg) {
  rep.ok = false;
  rep.failing_step = step;
  rep.message = msg;
  return rep;
}

}  // namespace

VerifyReport verify_intersection_certificate(const ConicLP& prob, const IntersectionCertificate& cert, double tol) {
  const DupMapping m = duplicate(prob);
  VerifyReport rep = verify_certificate(m.dup, cert.dup, tol);
  if (!rep.ok) {
    rep.message = "duplicated certificate: " + rep.message;
    return rep;
  }
  const std::size_t L = cert.directions.size();
  if (L != cert.dup.directions.size() || cert.parts1.size() != L || cert.parts2.size() != L ||
      cert.faces.size() != cert.dup.faces.size())
    return fail(rep, -1, "pair certificate length mismatch");
  const bool infeasible = cert.status == CertStatus::InfeasibleStrong || cert.status == CertStatus::InfeasibleWeak;
  const double anorm = prob.A.norm();
  for (std::size_t i = 0; i < L; ++i) {
    const Vector& d = cert.directions[i];
    const Vector& dd = cert.dup.directions[i];
    const double scale = std::max(1.0, d.norm());
    if ((m.first(dd) - cert.parts1[i]).norm() > 1e-12 * scale || (m.second(dd) - cert.parts2[i]).norm() > 1e-12 * scale ||
        (cert.parts1[i] + cert.parts2[i] - d).norm() > 1e-12 * scale)
      return fail(rep, int(i), "direction is not the sum of its stored pair");
    const double st = cert.dup.step_tol(i, tol);
    const double dn = d.norm();
    if (dn > 0) {
      if ((prob.A * d).norm() > st * (1.0 + anorm) * dn) return fail(rep, int(i), "A d != 0 on the original problem");
      if (prob.c.dot(d) > st * prob.c.norm() * dn) return fail(rep, int(i), "<c,d> > 0 on the original problem");
    }
    if (infeasible && i + 1 == L && !(prob.c.dot(d) < 0))
      return fail(rep, int(i), "infeasibility direction has <c,d> >= 0 on the original problem");
    if (!faces_equal(join_faces(m, cert.faces[i + 1]), cert.dup.faces[i + 1], 1e-9))
      return fail(rep, int(i), "face pair differs from the duplicated face");
  }
  if (cert.status == CertStatus::MinimalFaceFound) {
    if (!cert.slack_hat || !cert.dup.slack_hat) return fail(rep, -1, "slack_hat missing");
    const Vector& s = *cert.slack_hat;
    if ((m.second(*cert.dup.slack_hat) - s).norm() > tol * (1.0 + s.norm()))
      return fail(rep, -1, "duplicated slack copies differ");
    if (affine_residual(prob, s) > tol) return fail(rep, -1, "slack_hat not in c + range A^T");
    double ftol = std::max(tol, 1e-9);
    for (std::size_t i = 0; i < L; ++i) ftol = std::max(ftol, cert.dup.step_tol(i, tol));
    const double off = ftol * (1.0 + s.norm());
    const double m1 = ri_margin(cert.terminal().f1, s, off), m2 = ri_margin(cert.terminal().f2, s, off);
    if (!(std::min(m1, m2) >= tol)) return fail(rep, -1, "slack_hat not in ri F1 cap ri F2");
    rep.terminal_margin = std::min(m1, m2);
  }
  rep.log.push_back("pair certificate consistent with the original problem");
  return rep;
}

// ---- DNN chain -----------------------------------------------------------

namespace {

Index svec_index(Index i, Index j) {
  if (i > j) std::swap(i, j);
  return j * (j + 1) / 2 + i;
}

using MatQ = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

MatQ rational(const Eigen::Ref<const Matrix>& X) {
  MatQ q(X.rows(), X.cols());
  for (Index i = 0; i < X.rows(); ++i)
    for (Index j = 0; j < X.cols(); ++j) q(i, j) = to_rational(X(i, j));
  return q;
}

/// (I - U U^T) X == 0 exactly.
bool range_within(const Matrix& U, const Matrix& X) {
  const MatQ Uq = rational(U), Xq = rational(X);
  MatQ R = Xq - Uq * (Uq.transpose() * Xq);
  for (Index i = 0; i < R.rows(); ++i)
    for (Index j = 0; j < R.cols(); ++j)
      if (R(i, j) != 0) return false;
  return true;
}

bool support_within(const std::vector<Index>& support, const Matrix& W) {
  const Index n = W.rows();
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) {
      if (W(i, j) == 0.0) continue;
      if (W(i, j) < 0.0) return false;
      if (!std::binary_search(support.begin(), support.end(), svec_index(i, j))) return false;
    }
  return true;
}

bool in_chain_face(const DnnChainFace& f, const Matrix& W) {
  return exact_psd(W) && range_within(f.basis, W) && support_within(f.support, W);
}

}  // namespace

bool exact_psd(const Eigen::Ref<const Matrix>& X) {
  MatQ M = rational(X);
  const Index n = M.rows();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < i; ++j)
      if (M(i, j) != M(j, i)) return false;
  std::vector<bool> done(std::size_t(n), false);
  for (Index step = 0; step < n; ++step) {
    Index p = -1;
    for (Index i = 0; i < n; ++i) {
      if (done[std::size_t(i)]) continue;
      if (M(i, i) < 0) return false;
      if (M(i, i) > 0 && p < 0) p = i;
    }
    if (p < 0) {
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
          if (!done[std::size_t(i)] && !done[std::size_t(j)] && M(i, j) != 0) return false;
      return true;
    }
    done[std::size_t(p)] = true;
    for (Index i = 0; i < n; ++i) {
      if (done[std::size_t(i)]) continue;
      const Rational f = M(i, p) / M(p, p);
      for (Index j = 0; j < n; ++j)
        if (!done[std::size_t(j)]) M(i, j) -= f * M(p, j);
    }
  }
  return true;
}

std::vector<DnnChainFace> dnn_chain(Index n) {
  if (n < 1) throw std::invalid_argument("dnn_chain: n >= 1");
  std::vector<DnnChainFace> chain;
  DnnChainFace g;
  g.basis = Matrix(n, 0);
  chain.push_back(g);
  for (Index k = 1; k <= n; ++k) {
    DnnChainFace f;
    f.basis = Matrix::Identity(n, n).leftCols(k);
    for (Index i = 0; i < k; ++i) f.support.push_back(svec_index(i, i));
    std::sort(f.support.begin(), f.support.end());
    f.witness = Matrix::Zero(n, n);
    for (Index i = 0; i < k; ++i) f.witness(i, i) = 1.0;
    chain.push_back(f);
  }
  std::vector<Index> support = chain.back().support;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      DnnChainFace f;
      f.basis = Matrix::Identity(n, n);
      support.push_back(svec_index(i, j));
      std::sort(support.begin(), support.end());
      f.support = support;
      f.witness = Matrix::Identity(n, n);
      f.witness(i, j) = f.witness(j, i) = 1.0;
      chain.push_back(f);
    }
  return chain;
}

ChainCheck verify_dnn_chain(Index n, const std::vector<DnnChainFace>& chain) {
  ChainCheck c;
  auto bad = [&](int k, const std::string& msg) {
    c.ok = false;
    c.failing = k;
    c.message = msg;
    return c;
  };
  if (chain.empty()) return bad(0, "empty chain");
  if (chain[0].basis.cols() != 0 || !chain[0].support.empty()) return bad(0, "chain does not start at {0}");
  for (std::size_t k = 1; k < chain.size(); ++k) {
    const DnnChainFace &prev = chain[k - 1], &cur = chain[k];
    const Matrix& W = cur.witness;
    if (W.rows() != n || W.cols() != n) return bad(int(k), "witness has wrong shape");
    if (!in_chain_face(cur, W)) return bad(int(k), "witness not in its face");
    if (in_chain_face(prev, W)) return bad(int(k), "witness already in the previous face");
    if (!std::includes(cur.support.begin(), cur.support.end(), prev.support.begin(), prev.support.end()))
      return bad(int(k), "support not nested");
    if (prev.basis.cols() > 0 && !range_within(cur.basis, prev.basis)) return bad(int(k), "PSD face not nested");
  }
  const DnnChainFace& last = chain.back();
  if (last.basis.cols() != n || Index(last.support.size()) != svec_length(n))
    return bad(int(chain.size()) - 1, "chain does not end at the whole cone");
  return c;
}

}  // namespace conefract
