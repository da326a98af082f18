#include "conefract/instances.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <cstdlib>

namespace conefract {

namespace {

Vector unit_in(const ConeProduct& K, std::size_t block, Index local) {
  Vector v = Vector::Zero(K.dim());
  v(K.offset(block) + local) = 1.0;
  return v;
}

/// a^j_{i,k}: symmetric 0/1 matrix with ones at (i,k), (k,i); 1-based indices.
Vector psd_unit(const ConeProduct& K, std::size_t block, Index i, Index k) {
  const Index n = K.block(block).size;
  Matrix E = Matrix::Zero(n, n);
  E(i - 1, k - 1) = 1.0;
  E(k - 1, i - 1) = 1.0;
  Vector v = Vector::Zero(K.dim());
  v.segment(K.offset(block), K.block(block).coords()) = svec(E);
  return v;
}

/// Rows: orthonormal basis of the orthogonal complement of the columns of D.
Matrix complement_rows(const Matrix& D, Index n) {
  if (D.cols() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(D, Eigen::ComputeFullU);
  Index r = 0;
  const double thr = 1e-10 * std::max(1.0, svd.singularValues()(0));
  while (r < svd.singularValues().size() && svd.singularValues()(r) > thr) ++r;
  return svd.matrixU().rightCols(n - r).transpose();
}

/// m orthonormal rows, each orthogonal to every column of Z.
Matrix random_rows_perp(Index m, const Matrix& Z, Index n, Rng& rng) {
  std::normal_distribution<double> g;
  Matrix R(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) R(i, j) = g(rng);
  if (Z.cols() > 0) {
    Eigen::HouseholderQR<Matrix> qz(Z);
    Matrix Q = qz.householderQ() * Matrix::Identity(n, Z.cols());
    R -= Q * (Q.transpose() * R);
  }
  Eigen::HouseholderQR<Matrix> qr(R);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, m);
  return Q.transpose();
}

Vector random_vec(Index n, Rng& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

}  // namespace

std::vector<Vector> worst_case_directions(const std::vector<Index>& soc_dims, const std::vector<Index>& psd_sides) {
  if (soc_dims.empty() && psd_sides.empty()) throw std::invalid_argument("worst case: need at least one block");
  std::vector<ConeBlock> blocks;
  for (Index t : soc_dims) {
    if (t < 3) throw std::invalid_argument("worst case: SOC dimensions must be >= 3");
    blocks.push_back(ConeBlock::soc(t));
  }
  for (Index n : psd_sides) {
    if (n < 3) throw std::invalid_argument("worst case: PSD sides must be >= 3");
    blocks.push_back(ConeBlock::psd(n));
  }
  ConeProduct K(blocks);
  const std::size_t r1 = soc_dims.size(), r2 = psd_sides.size();
  std::vector<Vector> d;
  for (std::size_t j = 0; j < r1; ++j) {
    Vector v = unit_in(K, j, 0) + unit_in(K, j, 1);
    if (j > 0) v += unit_in(K, j - 1, 2);
    d.push_back(v);
  }
  for (std::size_t j = 0; j < r2; ++j) {
    const std::size_t b = r1 + j;
    const Index n = psd_sides[j];
    Vector link = psd_unit(K, b, 1, 1);
    if (j == 0 && r1 > 0) link += unit_in(K, r1 - 1, 2);
    if (j > 0) {
      const Index np = psd_sides[j - 1];
      link += psd_unit(K, b - 1, np - 1, np);
    }
    d.push_back(link);
    for (Index i = 2; i < n; ++i) d.push_back(psd_unit(K, b, i, i) + psd_unit(K, b, i - 1, i + 1));
  }
  return d;
}

Instance gen_worst_case(const std::vector<Index>& soc_dims, const std::vector<Index>& psd_sides) {
  std::vector<Vector> dirs = worst_case_directions(soc_dims, psd_sides);
  std::vector<ConeBlock> blocks;
  for (Index t : soc_dims) blocks.push_back(ConeBlock::soc(t));
  for (Index n : psd_sides) blocks.push_back(ConeBlock::psd(n));
  Instance I;
  I.kind = "worst-case";
  ConicLP& P = I.prob;
  P.cone = ConeProduct(blocks);
  const Index n = P.cone.dim();
  Matrix D(n, Index(dirs.size()));
  for (std::size_t k = 0; k < dirs.size(); ++k) D.col(Index(k)) = dirs[k];
  P.A = complement_rows(D, n);
  P.b = Vector::Zero(P.A.rows());
  P.c = Vector::Zero(n);

  FaceDescriptor F = FaceDescriptor::full(P.cone);
  Vector s = Vector::Zero(n);
  for (std::size_t j = 0; j < soc_dims.size(); ++j) {
    SocFace f;
    f.state = SocFace::State::Ray;
    f.ray = Vector::Zero(soc_dims[j]);
    f.ray(0) = 1.0 / std::sqrt(2.0);
    f.ray(1) = -1.0 / std::sqrt(2.0);
    s.segment(P.cone.offset(j), soc_dims[j]) = f.ray;
    F.blocks[j] = f;
  }
  for (std::size_t j = 0; j < psd_sides.size(); ++j) {
    const std::size_t b = soc_dims.size() + j;
    const Index m = psd_sides[j];
    PsdFace f;
    f.basis = Vector::Unit(m, m - 1);
    s.segment(P.cone.offset(b), P.cone.block(b).coords()) = svec(f.basis * f.basis.transpose());
    F.blocks[b] = f;
  }
  I.minimal_face = F;
  I.status = FeasibilityStatus::WeaklyFeasible;
  int expected = int(soc_dims.size());
  for (Index m : psd_sides) expected += int(m - 1);
  I.expected_steps = expected;
  I.y_feasible = -(P.A * s);
  OracleScript sc;
  sc.directions = dirs;
  sc.witness_y = I.y_feasible;
  I.scripts.push_back(sc);
  return I;
}

Instance gen_scripted_example() {
  Instance I;
  I.kind = "example";
  ConicLP& P = I.prob;
  P.cone = ConeProduct({ConeBlock::nonneg(2), ConeBlock::psd(2)});
  // slack M y = (y1, -y1) x [[y1, y2], [y2, y3]]
  Matrix M = Matrix::Zero(5, 3);
  M(0, 0) = 1;
  M(1, 0) = -1;
  M(2, 0) = 1;
  M(3, 1) = std::sqrt(2.0);
  M(4, 2) = 1;
  P.A = -M.transpose();
  P.b = Vector::Zero(3);
  P.c = Vector::Zero(5);
  Vector y(3);
  y << 0, 0, 1;
  I.y_feasible = y;
  FaceDescriptor F = FaceDescriptor::full(P.cone);
  F.blocks[0] = NonNegFace{{}};
  F.blocks[1] = PsdFace{Vector::Unit(2, 1)};
  I.minimal_face = F;
  I.status = FeasibilityStatus::WeaklyFeasible;
  for (double first : {1.0, 0.0}) {
    Vector d(5);
    d << first, first + 1.0, 1, 0, 0;
    OracleScript s;
    s.directions = {d};
    s.witness_y = y;
    I.scripts.push_back(s);
  }
  return I;
}

FaceDescriptor random_face(const ConeProduct& K, Rng& rng) {
  FaceDescriptor F = FaceDescriptor::full(K);
  std::uniform_int_distribution<int> coin(0, 1);
  for (std::size_t j = 0; j < K.size(); ++j) {
    const ConeBlock& b = K.block(j);
    switch (b.kind) {
      case ConeKind::NonNeg: {
        NonNegFace f;
        for (Index i = 0; i < b.size; ++i)
          if (coin(rng)) f.support.push_back(i);
        F.blocks[j] = f;
        break;
      }
      case ConeKind::SOC: {
        std::uniform_int_distribution<int> st(0, 2);
        const int k = b.size >= 2 ? st(rng) : 2 * coin(rng);
        SocFace f;
        if (k == 0) {
          f.state = SocFace::State::Full;
        } else if (k == 1) {
          f.state = SocFace::State::Ray;
          Vector u = random_vec(b.size - 1, rng).normalized();
          f.ray = Vector(b.size);
          f.ray(0) = 1.0;
          f.ray.tail(b.size - 1) = u;
          f.ray /= std::sqrt(2.0);
        } else {
          f.state = SocFace::State::Zero;
        }
        if (b.size == 1 && k == 2) f.state = SocFace::State::Zero;
        F.blocks[j] = f;
        break;
      }
      case ConeKind::PSD: {
        std::uniform_int_distribution<Index> rk(0, b.size);
        const Index r = rk(rng);
        PsdFace f;
        if (r == 0) {
          f.basis = Matrix(b.size, 0);
        } else {
          Matrix G(b.size, r);
          for (Index c = 0; c < r; ++c) G.col(c) = random_vec(b.size, rng);
          Eigen::HouseholderQR<Matrix> qr(G);
          f.basis = qr.householderQ() * Matrix::Identity(b.size, r);
        }
        F.blocks[j] = f;
        break;
      }
    }
  }
  return F;
}

Vector exposing_vector(const FaceDescriptor& F) {
  const ConeProduct& K = F.cone;
  Vector z = Vector::Zero(K.dim());
  for (std::size_t j = 0; j < K.size(); ++j) {
    const ConeBlock& b = K.block(j);
    auto seg = z.segment(K.offset(j), b.coords());
    if (auto* nf = std::get_if<NonNegFace>(&F.blocks[j])) {
      seg.setOnes();
      for (Index i : nf->support) seg(i) = 0.0;
    } else if (auto* sf = std::get_if<SocFace>(&F.blocks[j])) {
      if (sf->state == SocFace::State::Ray) {
        seg(0) = sf->ray(0);
        seg.tail(b.size - 1) = -sf->ray.tail(b.size - 1);
      } else if (sf->state == SocFace::State::Zero) {
        seg(0) = 1.0;
      }
    } else {
      const Matrix& U = std::get<PsdFace>(F.blocks[j]).basis;
      seg = svec(Matrix::Identity(b.size, b.size) - U * U.transpose());
    }
  }
  return z;
}

Instance gen_planted(const ConeProduct& K, const FaceDescriptor& target, FeasibilityStatus status,
                     std::uint64_t seed) {
  Rng rng(seed);
  Instance I;
  I.kind = "planted";
  I.seed = seed;
  ConicLP& P = I.prob;
  P.cone = K;
  const Index n = K.dim();
  std::uniform_int_distribution<Index> mdist(1, std::max<Index>(1, n - 1));
  const Index m = mdist(rng);
  if (status == FeasibilityStatus::StronglyInfeasible) {
    const Vector xbar = ri_dual_point(FaceDescriptor::full(K));
    P.A = random_rows_perp(std::min(m, n - 1), xbar, n, rng);
    Vector c = random_vec(n, rng);
    c -= (c.dot(xbar) + 1.0) / xbar.squaredNorm() * xbar;
    P.c = c;
    P.b = Vector::Zero(P.A.rows());
    I.status = status;
    I.infeasibility = xbar;
    return I;
  }
  if (status == FeasibilityStatus::WeaklyInfeasible) throw std::invalid_argument("planted: weak infeasibility not supported");
  FaceDescriptor T = status == FeasibilityStatus::StronglyFeasible ? FaceDescriptor::full(K) : target;
  const Vector z = exposing_vector(T);
  if (z.norm() > 0) P.A = random_rows_perp(std::min(m, n - 1), z, n, rng);
  else P.A = random_rows_perp(m, Matrix(n, 0), n, rng);
  const Vector sbar = ri_point(T);
  const Vector ybar = random_vec(P.A.rows(), rng);
  P.c = sbar + P.A.transpose() * ybar;
  P.b = Vector::Zero(P.A.rows());
  I.y_feasible = ybar;
  I.minimal_face = T;
  I.status = face_dimension(T) == n ? FeasibilityStatus::StronglyFeasible : FeasibilityStatus::WeaklyFeasible;
  return I;
}

Instance gen_planted_orthant(Index n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("planted orthant: n >= 2");
  Rng rng(seed);
  Instance I;
  I.kind = "planted-orthant";
  I.seed = seed;
  ConicLP& P = I.prob;
  P.cone = ConeProduct({ConeBlock::nonneg(n)});
  std::uniform_int_distribution<int> coin(0, 1), coef(-3, 3), pos(1, 3);
  NonNegFace S;
  std::vector<Index> off;
  for (Index i = 0; i < n; ++i) (coin(rng) ? S.support : off).push_back(i);
  if (off.empty()) {
    off.push_back(S.support.back());
    S.support.pop_back();
  }
  std::uniform_int_distribution<Index> mdist(1, n - 1);
  const Index m = mdist(rng);
  // integer rows with A z = 0 for z = indicator of the complement of S
  P.A = Matrix::Zero(m, n);
  for (Index r = 0; r < m; ++r) {
    for (Index i = 0; i < n; ++i) P.A(r, i) = coef(rng);
    double s = 0;
    for (std::size_t k = 1; k < off.size(); ++k) s += P.A(r, off[k]);
    P.A(r, off[0]) = -s;
  }
  Vector ybar(m), sbar = Vector::Zero(n);
  for (Index r = 0; r < m; ++r) ybar(r) = coef(rng);
  for (Index i : S.support) sbar(i) = pos(rng);
  P.c = sbar + P.A.transpose() * ybar;
  P.b = Vector::Zero(m);
  FaceDescriptor F = FaceDescriptor::full(P.cone);
  F.blocks[0] = S;
  I.minimal_face = F;
  I.status = FeasibilityStatus::WeaklyFeasible;
  I.y_feasible = ybar;
  return I;
}

Instance gen_planted_dnn(Index n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("planted dnn: n >= 2");
  Rng rng(seed);
  Instance I;
  I.kind = "planted-dnn";
  I.seed = seed;
  const Index N = svec_length(n);
  ConicLP& P = I.prob;
  P.cone = ConeProduct({ConeBlock::psd(n)});
  P.intersection = ConeProduct({ConeBlock::nonneg(N)});
  std::uniform_int_distribution<Index> rk(1, n - 1);
  std::uniform_real_distribution<double> val(0.5, 2.0), u01(0.0, 1.0);
  const Index r = rk(rng);
  Matrix S = Matrix::Zero(n, n);
  for (Index k = 0; k < r; ++k) {
    Vector u = Vector::Zero(n);
    while (u.isZero()) {
      for (Index i = 0; i < n; ++i) u(i) = u01(rng) < 0.4 ? 0.0 : val(rng);
    }
    S += u * u.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  Index rank = 0;
  for (Index i = 0; i < n; ++i)
    if (es.eigenvalues()(i) > 1e-9 * es.eigenvalues()(n - 1)) ++rank;
  PsdFace pf;
  pf.basis = es.eigenvectors().rightCols(rank);
  const Vector sv = svec(S);
  NonNegFace nf;
  for (Index i = 0; i < N; ++i)
    if (sv(i) > 0) nf.support.push_back(i);

  ConeProduct dup({ConeBlock::psd(n), ConeBlock::nonneg(N)});
  FaceDescriptor F = FaceDescriptor::full(dup);
  F.blocks[0] = pf;
  F.blocks[1] = nf;
  const Vector zz = exposing_vector(F);
  const Vector z = zz.head(N) + zz.tail(N);
  std::uniform_int_distribution<Index> mdist(1, N - 1);
  P.A = random_rows_perp(mdist(rng), z, N, rng);
  const Vector ybar = random_vec(P.A.rows(), rng);
  P.c = sv + P.A.transpose() * ybar;
  P.b = Vector::Zero(P.A.rows());
  I.minimal_face = F;
  I.status = FeasibilityStatus::WeaklyFeasible;
  I.y_feasible = ybar;
  return I;
}

ConeProduct family_cone(const std::string& family, Rng& rng) {
  std::uniform_int_distribution<Index> d24(2, 4), d34(3, 4), d23(2, 3), d12(1, 2);
  if (family == "nonneg") return ConeProduct({ConeBlock::nonneg(d24(rng))});
  if (family == "soc") {
    std::vector<ConeBlock> b;
    const Index k = d12(rng);
    for (Index i = 0; i < k; ++i) b.push_back(ConeBlock::soc(d34(rng)));
    return ConeProduct(b);
  }
  if (family == "psd") return ConeProduct({ConeBlock::psd(d24(rng))});
  if (family == "mixed")
    return ConeProduct({ConeBlock::nonneg(d12(rng)), ConeBlock::soc(d34(rng)), ConeBlock::psd(d23(rng))});
  throw std::invalid_argument("unknown family '" + family + "'");
}

Instance gen_planted_family(const std::string& family, std::uint64_t seed) {
  Rng rng(seed);
  ConeProduct K = family_cone(family, rng);
  std::uniform_int_distribution<int> pick(0, 9);
  const int p = pick(rng);
  FeasibilityStatus st = p < 2 ? FeasibilityStatus::StronglyFeasible
                         : p < 4 ? FeasibilityStatus::StronglyInfeasible
                                 : FeasibilityStatus::WeaklyFeasible;
  FaceDescriptor T = random_face(K, rng);
  Instance I = gen_planted(K, T, st, rng());
  I.kind = "planted-" + family;
  I.seed = seed;
  return I;
}

Json Instance::metadata() const {
  Json j = Json::object();
  j["kind"] = kind;
  j["seed"] = seed;
  if (status) j["status"] = to_string(*status);
  if (expected_steps) j["expected_steps"] = *expected_steps;
  if (minimal_face) {
    j["minimal_face"] = face_to_json(*minimal_face);
    j["minimal_face_cone"] = cone_to_json(minimal_face->cone);
  }
  if (y_feasible) j["y_feasible"] = vector_to_json(*y_feasible);
  if (infeasibility) j["infeasibility"] = vector_to_json(*infeasibility);
  Json s = Json::array();
  for (const OracleScript& sc : scripts) s.push_back(oracle_script_to_json(sc));
  j["scripts"] = s;
  return j;
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* v = std::getenv("CONEFRACT_SEED");
  if (v == nullptr || *v == '\0') return fallback;
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw InputError("CONEFRACT_SEED", "not an unsigned integer");
  }
}

}  // namespace conefract
