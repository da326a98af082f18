#include "conefract/cones.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace conefract {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double min_eig(const Matrix& M) {
  if (M.rows() == 0) return kInf;
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

void check_len(const ConeBlock& b, Index len) {
  if (len != b.coords())
    throw std::invalid_argument("dimension mismatch for " + to_string(b) + ": got " + std::to_string(len));
}

}  // namespace

std::string to_string(const ConeBlock& b) {
  switch (b.kind) {
    case ConeKind::NonNeg: return "NonNeg(" + std::to_string(b.size) + ")";
    case ConeKind::SOC: return "SOC(" + std::to_string(b.size) + ")";
    case ConeKind::PSD: return "PSD(" + std::to_string(b.size) + ")";
  }
  return "?";
}

ConeProduct::ConeProduct(std::vector<ConeBlock> blocks) : blocks_(std::move(blocks)) {
  offsets_.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    if (b.size < 1) throw std::invalid_argument("cone block size must be positive");
    offsets_.push_back(dim_);
    dim_ += b.coords();
  }
}

Index svec_length(Index side) { return side * (side + 1) / 2; }

Index svec_side(Index len) {
  Index n = static_cast<Index>(std::llround((std::sqrt(8.0 * double(len) + 1.0) - 1.0) / 2.0));
  if (svec_length(n) != len) throw std::invalid_argument("svec length " + std::to_string(len) + " is not triangular");
  return n;
}

Vector svec(const Eigen::Ref<const Matrix>& X) {
  const Index n = X.rows();
  Vector v(svec_length(n));
  const double r2 = std::sqrt(2.0);
  Index k = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) v(k++) = (i == j) ? X(i, i) : r2 * 0.5 * (X(i, j) + X(j, i));
  return v;
}

Matrix smat(const Eigen::Ref<const Vector>& v) {
  const Index n = svec_side(v.size());
  Matrix X(n, n);
  const double r2 = std::sqrt(2.0);
  Index k = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) {
      if (i == j) {
        X(i, i) = v(k++);
      } else {
        X(i, j) = X(j, i) = v(k++) / r2;
      }
    }
  return X;
}

Matrix SvecCodec::to_mat(const Eigen::Ref<const Vector>& v) const {
  if (v.size() != svec_length(side)) throw std::invalid_argument("svec length does not match side");
  return smat(v);
}

BlockFace full_face(const ConeBlock& b) {
  switch (b.kind) {
    case ConeKind::NonNeg: {
      NonNegFace f;
      for (Index i = 0; i < b.size; ++i) f.support.push_back(i);
      return f;
    }
    case ConeKind::SOC: return SocFace{};
    case ConeKind::PSD: return PsdFace{Matrix::Identity(b.size, b.size)};
  }
  return NonNegFace{};
}

FaceDescriptor FaceDescriptor::full(const ConeProduct& cone) {
  FaceDescriptor F{cone, {}};
  for (const auto& b : cone.blocks()) F.blocks.push_back(full_face(b));
  return F;
}

FaceDescriptor FaceDescriptor::zero(const ConeProduct& cone) {
  FaceDescriptor F{cone, {}};
  for (const auto& b : cone.blocks()) {
    switch (b.kind) {
      case ConeKind::NonNeg: F.blocks.push_back(NonNegFace{}); break;
      case ConeKind::SOC: F.blocks.push_back(SocFace{SocFace::State::Zero, {}}); break;
      case ConeKind::PSD: F.blocks.push_back(PsdFace{Matrix(b.size, 0)}); break;
    }
  }
  return F;
}

bool contains(const ConeBlock& b, const Eigen::Ref<const Vector>& x, double tol) {
  check_len(b, x.size());
  switch (b.kind) {
    case ConeKind::NonNeg: return x.size() == 0 || x.minCoeff() >= -tol;
    case ConeKind::SOC: return x(0) >= x.tail(b.size - 1).norm() - tol;
    case ConeKind::PSD: return min_eig(smat(x)) >= -tol;
  }
  return false;
}

bool contains(const ConeProduct& K, const Eigen::Ref<const Vector>& x, double tol) {
  if (x.size() != K.dim()) throw std::invalid_argument("dimension mismatch");
  for (std::size_t j = 0; j < K.size(); ++j)
    if (!contains(K.block(j), x.segment(K.offset(j), K.block(j).coords()), tol)) return false;
  return true;
}

Matrix span_basis(const ConeBlock& b, const BlockFace& f) {
  if (auto* nf = std::get_if<NonNegFace>(&f)) {
    Matrix P = Matrix::Zero(b.coords(), Index(nf->support.size()));
    for (std::size_t k = 0; k < nf->support.size(); ++k) P(nf->support[k], Index(k)) = 1.0;
    return P;
  }
  if (auto* sf = std::get_if<SocFace>(&f)) {
    switch (sf->state) {
      case SocFace::State::Full: return Matrix::Identity(b.size, b.size);
      case SocFace::State::Ray: return sf->ray;
      case SocFace::State::Zero: return Matrix(b.size, 0);
    }
  }
  const Matrix& U = std::get<PsdFace>(f).basis;
  const Index r = U.cols();
  Matrix P(b.coords(), svec_length(r));
  for (Index k = 0; k < P.cols(); ++k) {
    Vector e = Vector::Unit(P.cols(), k);
    P.col(k) = svec(U * smat(e) * U.transpose());
  }
  return P;
}

double ri_margin_block(const ConeBlock& b, const BlockFace& f, const Eigen::Ref<const Vector>& xj, double tol) {
  check_len(b, xj.size());
  Matrix P = span_basis(b, f);
  Vector z = P.transpose() * xj;
  if ((xj - P * z).norm() > tol) return -kInf;
  if (auto* nf = std::get_if<NonNegFace>(&f)) return nf->support.empty() ? kInf : z.minCoeff();
  if (auto* sf = std::get_if<SocFace>(&f)) {
    switch (sf->state) {
      case SocFace::State::Full: return b.size == 1 ? z(0) : z(0) - z.tail(b.size - 1).norm();
      case SocFace::State::Ray: return z(0);
      case SocFace::State::Zero: return kInf;
    }
  }
  return min_eig(smat(z));
}

double ri_margin(const FaceDescriptor& F, const Eigen::Ref<const Vector>& x, double tol) {
  if (x.size() != F.cone.dim()) throw std::invalid_argument("dimension mismatch");
  double m = kInf;
  for (std::size_t j = 0; j < F.blocks.size(); ++j)
    m = std::min(m, ri_margin_block(F.cone.block(j), F.blocks[j], x.segment(F.cone.offset(j), F.cone.block(j).coords()), tol));
  return m;
}

bool face_contains(const FaceDescriptor& F, const Eigen::Ref<const Vector>& x, double tol) {
  return ri_margin(F, x, tol) >= -tol;
}

namespace {

bool dual_block_contains(const ConeBlock& b, const BlockFace& f, const Eigen::Ref<const Vector>& xj, double tol) {
  check_len(b, xj.size());
  if (auto* nf = std::get_if<NonNegFace>(&f)) {
    for (Index i : nf->support)
      if (xj(i) < -tol) return false;
    return true;
  }
  if (auto* sf = std::get_if<SocFace>(&f)) {
    switch (sf->state) {
      case SocFace::State::Full: return contains(b, xj, tol);
      case SocFace::State::Ray: return xj.dot(sf->ray) >= -tol * xj.norm();
      case SocFace::State::Zero: return true;
    }
  }
  const Matrix& U = std::get<PsdFace>(f).basis;
  if (U.cols() == 0) return true;
  return min_eig(U.transpose() * smat(xj) * U) >= -tol;
}

}  // namespace

bool dual_face_contains(const FaceDescriptor& F, const Eigen::Ref<const Vector>& x, double tol) {
  if (x.size() != F.cone.dim()) throw std::invalid_argument("dimension mismatch");
  for (std::size_t j = 0; j < F.blocks.size(); ++j)
    if (!dual_block_contains(F.cone.block(j), F.blocks[j], x.segment(F.cone.offset(j), F.cone.block(j).coords()), tol))
      return false;
  return true;
}

BlockFace intersect_hyperplane(const ConeBlock& b, const BlockFace& f, const Eigen::Ref<const Vector>& dj, double tol,
                               double scale) {
  check_len(b, dj.size());
  const double thr = tol * scale;
  if (auto* nf = std::get_if<NonNegFace>(&f)) {
    NonNegFace out;
    for (Index i : nf->support) {
      if (dj(i) < -thr) throw CertificateViolation("negative entry on face support");
      if (dj(i) <= thr) out.support.push_back(i);
    }
    return out;
  }
  if (auto* sf = std::get_if<SocFace>(&f)) {
    switch (sf->state) {
      case SocFace::State::Zero: return *sf;
      case SocFace::State::Ray: {
        double ip = dj.dot(sf->ray);
        if (ip < -thr) throw CertificateViolation("direction negative on SOC ray");
        if (ip > thr) return SocFace{SocFace::State::Zero, {}};
        return *sf;
      }
      case SocFace::State::Full: {
        if (dj.norm() <= thr) return *sf;
        if (b.size == 1) {
          if (dj(0) < -thr) throw CertificateViolation("direction outside SOC(1)");
          return SocFace{SocFace::State::Zero, {}};
        }
        double gap = dj(0) - dj.tail(b.size - 1).norm();
        if (gap < -thr) throw CertificateViolation("direction outside SOC");
        if (gap > thr) return SocFace{SocFace::State::Zero, {}};
        Vector u(b.size);
        u(0) = dj(0);
        u.tail(b.size - 1) = -dj.tail(b.size - 1);
        return SocFace{SocFace::State::Ray, u / u.norm()};
      }
    }
  }
  const Matrix& U = std::get<PsdFace>(f).basis;
  if (U.cols() == 0) return f;
  Matrix M = U.transpose() * smat(dj) * U;
  M = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  const Vector& lam = es.eigenvalues();
  if (lam(0) < -thr) throw CertificateViolation("direction not PSD on face");
  Index k = 0;
  while (k < lam.size() && lam(k) <= thr) ++k;
  Matrix Unew = U * es.eigenvectors().leftCols(k);
  return PsdFace{Unew};
}

FaceDescriptor face_intersect_hyperplane(const FaceDescriptor& F, const Eigen::Ref<const Vector>& d, double tol) {
  if (d.size() != F.cone.dim()) throw std::invalid_argument("dimension mismatch");
  const double scale = d.norm();
  if (scale == 0.0) return F;
  FaceDescriptor out{F.cone, {}};
  for (std::size_t j = 0; j < F.blocks.size(); ++j)
    out.blocks.push_back(intersect_hyperplane(F.cone.block(j), F.blocks[j],
                                              d.segment(F.cone.offset(j), F.cone.block(j).coords()), tol, scale));
  return out;
}

Vector ri_point_block(const ConeBlock& b, const BlockFace& f) {
  Vector v = Vector::Zero(b.coords());
  if (auto* nf = std::get_if<NonNegFace>(&f)) {
    for (Index i : nf->support) v(i) = 1.0;
  } else if (auto* sf = std::get_if<SocFace>(&f)) {
    if (sf->state == SocFace::State::Full) v(0) = 1.0;
    if (sf->state == SocFace::State::Ray) v = sf->ray;
  } else {
    const Matrix& U = std::get<PsdFace>(f).basis;
    v = svec(U * U.transpose());
  }
  return v;
}

Vector ri_dual_point_block(const ConeBlock& b, const BlockFace& f) {
  if (std::holds_alternative<PsdFace>(f)) return svec(Matrix::Identity(b.size, b.size));
  return ri_point_block(b, f);
}

namespace {
template <typename Fn>
Vector assemble(const FaceDescriptor& F, Fn fn) {
  Vector v(F.cone.dim());
  for (std::size_t j = 0; j < F.blocks.size(); ++j)
    v.segment(F.cone.offset(j), F.cone.block(j).coords()) = fn(F.cone.block(j), F.blocks[j]);
  return v;
}
}  // namespace

Vector ri_point(const FaceDescriptor& F) { return assemble(F, ri_point_block); }
Vector ri_dual_point(const FaceDescriptor& F) { return assemble(F, ri_dual_point_block); }

bool is_polyhedral(const ConeBlock& b, const BlockFace& f) {
  if (std::holds_alternative<NonNegFace>(f)) return true;
  if (auto* sf = std::get_if<SocFace>(&f)) return sf->state != SocFace::State::Full || b.size <= 2;
  return std::get<PsdFace>(f).basis.cols() <= 1;
}

bool is_polyhedral(const FaceDescriptor& F) {
  for (std::size_t j = 0; j < F.blocks.size(); ++j)
    if (!is_polyhedral(F.cone.block(j), F.blocks[j])) return false;
  return true;
}

int dist_to_polyhedrality(const ConeBlock& b, const BlockFace& f) {
  if (std::holds_alternative<NonNegFace>(f)) return 0;
  if (auto* sf = std::get_if<SocFace>(&f)) return (sf->state == SocFace::State::Full && b.size >= 3) ? 1 : 0;
  return std::max<int>(int(std::get<PsdFace>(f).basis.cols()) - 1, 0);
}

int dist_to_polyhedrality(const FaceDescriptor& F) {
  int s = 0;
  for (std::size_t j = 0; j < F.blocks.size(); ++j) s += dist_to_polyhedrality(F.cone.block(j), F.blocks[j]);
  return s;
}

int longest_chain_length(const ConeBlock& b) {
  switch (b.kind) {
    case ConeKind::NonNeg: return int(b.size) + 1;
    case ConeKind::SOC: return b.size == 1 ? 2 : 3;
    case ConeKind::PSD: return int(b.size) + 1;
  }
  return 0;
}

Index face_dimension(const ConeBlock& b, const BlockFace& f) {
  if (auto* nf = std::get_if<NonNegFace>(&f)) return Index(nf->support.size());
  if (auto* sf = std::get_if<SocFace>(&f)) {
    switch (sf->state) {
      case SocFace::State::Full: return b.size;
      case SocFace::State::Ray: return 1;
      case SocFace::State::Zero: return 0;
    }
  }
  return svec_length(std::get<PsdFace>(f).basis.cols());
}

Index face_dimension(const FaceDescriptor& F) {
  Index s = 0;
  for (std::size_t j = 0; j < F.blocks.size(); ++j) s += face_dimension(F.cone.block(j), F.blocks[j]);
  return s;
}

bool is_zero_face(const ConeBlock& b, const BlockFace& f) { return face_dimension(b, f) == 0; }

bool faces_equal(const FaceDescriptor& a, const FaceDescriptor& b, double tol) {
  if (!(a.cone == b.cone) || a.blocks.size() != b.blocks.size()) return false;
  for (std::size_t j = 0; j < a.blocks.size(); ++j) {
    const ConeBlock& blk = a.cone.block(j);
    // compare through the span projector and the face dimension; sufficient for these face types
    if (face_dimension(blk, a.blocks[j]) != face_dimension(blk, b.blocks[j])) return false;
    Matrix Pa = span_basis(blk, a.blocks[j]);
    Matrix Pb = span_basis(blk, b.blocks[j]);
    if ((Pa * Pa.transpose() - Pb * Pb.transpose()).norm() > tol) return false;
    if (auto* sa = std::get_if<SocFace>(&a.blocks[j])) {
      auto* sb = std::get_if<SocFace>(&b.blocks[j]);
      if (sa->state == SocFace::State::Ray && (sa->ray - sb->ray).norm() > tol) return false;
    }
  }
  return true;
}

}  // namespace conefract
