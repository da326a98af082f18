#include "conefract/embedding.hpp"

#include <Eigen/SVD>

#include <algorithm>

namespace conefract {

FaceEmbedding FaceEmbedding::of(const FaceDescriptor& F, std::vector<bool> relaxed) {
  FaceEmbedding E;
  E.face = F;
  if (relaxed.empty()) relaxed.assign(F.blocks.size(), false);
  E.relaxed = relaxed;
  const Index n = F.cone.dim();
  std::vector<Matrix> cols, free_cols;
  std::vector<ConeBlock> blocks;
  Index nc = 0, nf = 0;
  for (std::size_t j = 0; j < F.blocks.size(); ++j) {
    const ConeBlock& b = F.cone.block(j);
    Matrix S = span_basis(b, F.blocks[j]);
    if (S.cols() == 0) continue;
    Matrix full = Matrix::Zero(n, S.cols());
    full.middleRows(F.cone.offset(j), b.coords()) = S;
    if (relaxed[j]) {
      free_cols.push_back(full);
      nf += full.cols();
      continue;
    }
    cols.push_back(full);
    nc += full.cols();
    E.source_block.push_back(j);
    if (auto* nfc = std::get_if<NonNegFace>(&F.blocks[j])) {
      blocks.push_back(ConeBlock::nonneg(Index(nfc->support.size())));
    } else if (auto* sf = std::get_if<SocFace>(&F.blocks[j])) {
      if (sf->state == SocFace::State::Full && b.size >= 2) blocks.push_back(ConeBlock::soc(b.size));
      else blocks.push_back(ConeBlock::nonneg(1));
    } else {
      Index r = std::get<PsdFace>(F.blocks[j]).basis.cols();
      blocks.push_back(r == 1 ? ConeBlock::nonneg(1) : ConeBlock::psd(r));
    }
  }
  E.phi.resize(n, nc);
  Index k = 0;
  for (const auto& C : cols) {
    E.phi.middleCols(k, C.cols()) = C;
    k += C.cols();
  }
  E.phi_free.resize(n, nf);
  k = 0;
  for (const auto& C : free_cols) {
    E.phi_free.middleCols(k, C.cols()) = C;
    k += C.cols();
  }
  E.reduced_cone = ConeProduct(blocks);
  return E;
}

namespace {

Index numeric_rank(const Vector& sv, double thr) {
  Index r = 0;
  while (r < sv.size() && sv(r) > thr) ++r;
  return r;
}

}  // namespace

ReducedProblem reduce_problem(const ConicLP& prob, const FaceEmbedding& emb, double tol) {
  ReducedProblem R;
  R.emb = emb;
  R.A_amb = prob.A;
  R.c_amb = prob.c;
  const Index n = prob.cols(), m = prob.rows();
  Matrix Phi_all(n, emb.phi.cols() + emb.phi_free.cols());
  Phi_all << emb.phi, emb.phi_free;
  R.perp_ = Matrix::Identity(n, n) - Phi_all * Phi_all.transpose();
  const double scale = std::max(1.0, prob.A.norm());

  Vector rhs = R.perp_ * prob.c;
  if (m == 0) {
    R.y0 = Vector(0);
    R.N = Matrix(0, 0);
  } else {
    Matrix B = R.perp_ * prob.A.transpose();
    Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Index r = numeric_rank(svd.singularValues(), tol * scale);
    const Matrix& U = svd.matrixU();
    const Matrix& V = svd.matrixV();
    Vector coef = (U.leftCols(r).transpose() * rhs).cwiseQuotient(svd.singularValues().head(r));
    R.y0 = V.leftCols(r) * coef;
    R.N = V.rightCols(m - r);
    R.lift_pinv_ = U.leftCols(r) * svd.singularValues().head(r).cwiseInverse().asDiagonal() * V.leftCols(r).transpose();
  }
  Vector res = rhs - R.perp_ * (prob.A.transpose() * R.y0);
  if (res.norm() > 100.0 * tol * (1.0 + prob.c.norm())) R.infeasibility = -res / res.norm();

  // drop z-directions that do not move the reduced slack
  Matrix T = emb.phi.transpose() * prob.A.transpose() * R.N;  // n_red x k
  if (T.cols() > 0 && T.rows() > 0) {
    Eigen::JacobiSVD<Matrix> svd(T, Eigen::ComputeFullV);
    Index q = numeric_rank(svd.singularValues(), tol * scale);
    R.N = R.N * svd.matrixV().leftCols(q);
  } else {
    R.N = Matrix(m, 0);
  }
  R.red.cone = emb.reduced_cone;
  R.red.A = R.N.transpose() * prob.A * emb.phi;
  R.red.c = emb.phi.transpose() * (prob.c - prob.A.transpose() * R.y0);
  R.red.b = prob.b.size() == m ? Vector(R.N.transpose() * prob.b) : Vector::Zero(R.N.cols());
  return R;
}

Vector ReducedProblem::lift_direction(const Eigen::Ref<const Vector>& x_red) const {
  Vector v = emb.phi * x_red;
  if (A_amb.rows() == 0 || lift_pinv_.cols() == 0) return v;
  return v - lift_pinv_ * (A_amb * v);
}

}  // namespace conefract
