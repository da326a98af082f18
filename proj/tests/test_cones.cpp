#include <doctest.h>

#include "conefract/cones.hpp"

#include <random>

using namespace conefract;

namespace {
Vector vec(std::initializer_list<double> v) {
  Vector x(Index(v.size()));
  Index i = 0;
  for (double a : v) x(i++) = a;
  return x;
}
Matrix mat2(double a, double b, double c) {
  Matrix M(2, 2);
  M << a, b, b, c;
  return M;
}
}  // namespace

TEST_CASE("svec round trip and inner product") {
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  for (Index n = 1; n <= 5; ++n) {
    Matrix X(n, n), Y(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) X(i, j) = g(rng), Y(i, j) = g(rng);
    X = X + X.transpose().eval();
    Y = Y + Y.transpose().eval();
    CHECK((smat(svec(X)) - X).norm() < 1e-12);
    CHECK(std::abs(svec(X).dot(svec(Y)) - (X * Y).trace()) < 1e-12);
  }
  CHECK(svec_side(6) == 3);
  CHECK_THROWS_AS(svec_side(5), std::invalid_argument);
}

TEST_CASE("contains examples") {
  CHECK(contains(ConeBlock::nonneg(2), vec({0, 0}), 0.0));
  CHECK(contains(ConeBlock::soc(3), vec({1, 1, 0}), 0.0));
  CHECK_FALSE(contains(ConeBlock::psd(2), svec(mat2(1, 2, 1)), 0.0));
  CHECK_THROWS_AS(contains(ConeBlock::soc(3), vec({1, 1}), 0.0), std::invalid_argument);
}

TEST_CASE("face_intersect_hyperplane examples") {
  ConeProduct soc({ConeBlock::soc(3)});
  auto F = face_intersect_hyperplane(FaceDescriptor::full(soc), vec({1, 1, 0}), 1e-8);
  const auto& s = std::get<SocFace>(F.blocks[0]);
  REQUIRE(s.state == SocFace::State::Ray);
  CHECK((s.ray - vec({1, -1, 0}) / std::sqrt(2.0)).norm() < 1e-12);

  ConeProduct psd({ConeBlock::psd(2)});
  auto G = face_intersect_hyperplane(FaceDescriptor::full(psd), svec(mat2(1, 0, 0)), 1e-8);
  const Matrix& U = std::get<PsdFace>(G.blocks[0]).basis;
  REQUIRE(U.cols() == 1);
  CHECK(std::abs(std::abs(U(1, 0)) - 1.0) < 1e-12);

  ConeProduct nn({ConeBlock::nonneg(2)});
  auto H = face_intersect_hyperplane(FaceDescriptor::full(nn), vec({1, 2}), 1e-8);
  CHECK(std::get<NonNegFace>(H.blocks[0]).support.empty());

  CHECK_THROWS_AS(face_intersect_hyperplane(FaceDescriptor::full(psd), svec(mat2(1, 2, 1)), 1e-8),
                  CertificateViolation);
  auto R = face_intersect_hyperplane(F, vec({1, 1, 0}), 1e-8);
  CHECK(std::get<SocFace>(R.blocks[0]).state == SocFace::State::Ray);
  auto Z = face_intersect_hyperplane(F, vec({1, 0, 0}), 1e-8);
  CHECK(std::get<SocFace>(Z.blocks[0]).state == SocFace::State::Zero);
  auto I = face_intersect_hyperplane(FaceDescriptor::full(soc), vec({2, 1, 0}), 1e-8);
  CHECK(std::get<SocFace>(I.blocks[0]).state == SocFace::State::Zero);
}

TEST_CASE("dual_face_contains examples") {
  ConeProduct soc({ConeBlock::soc(3)});
  FaceDescriptor ray{soc, {SocFace{SocFace::State::Ray, vec({1, -1, 0}) / std::sqrt(2.0)}}};
  CHECK(dual_face_contains(ray, vec({1, 1, 0}), 0.0));

  ConeProduct psd({ConeBlock::psd(2)});
  Matrix e2 = Matrix::Zero(2, 1);
  e2(1, 0) = 1;
  FaceDescriptor F{psd, {PsdFace{e2}}};
  CHECK(dual_face_contains(F, svec(mat2(-5, 0, 1)), 0.0));

  ConeProduct nn({ConeBlock::nonneg(3)});
  FaceDescriptor Z{nn, {NonNegFace{}}};
  CHECK(dual_face_contains(Z, vec({-3, -1, -7}), 0.0));
}

TEST_CASE("ri points") {
  ConeProduct psd({ConeBlock::psd(3)});
  auto F = FaceDescriptor::full(psd);
  CHECK((ri_point(F) - svec(Matrix::Identity(3, 3))).norm() == 0.0);
  CHECK((ri_dual_point(F) - svec(Matrix::Identity(3, 3))).norm() == 0.0);

  ConeProduct soc({ConeBlock::soc(3)});
  Vector u = vec({1, 0, 1}) / std::sqrt(2.0);
  FaceDescriptor R{soc, {SocFace{SocFace::State::Ray, u}}};
  CHECK(ri_point(R) == u);
  CHECK(ri_dual_point(R) == u);

  ConeProduct nn({ConeBlock::nonneg(3)});
  FaceDescriptor N{nn, {NonNegFace{{1}}}};
  CHECK(ri_point(N) == vec({0, 1, 0}));
}

TEST_CASE("polyhedrality and chain lengths") {
  Matrix u = Matrix::Zero(3, 1);
  u(0, 0) = 1;
  CHECK(is_polyhedral(ConeBlock::psd(3), PsdFace{u}));
  CHECK_FALSE(is_polyhedral(ConeBlock::soc(3), SocFace{}));
  CHECK(is_polyhedral(ConeBlock::soc(2), SocFace{}));
  CHECK(is_polyhedral(ConeBlock::soc(4), SocFace{SocFace::State::Zero, {}}));

  CHECK(dist_to_polyhedrality(ConeBlock::psd(3), full_face(ConeBlock::psd(3))) == 2);
  CHECK(dist_to_polyhedrality(ConeBlock::soc(5), full_face(ConeBlock::soc(5))) == 1);
  CHECK(dist_to_polyhedrality(ConeBlock::nonneg(7), full_face(ConeBlock::nonneg(7))) == 0);

  CHECK(longest_chain_length(ConeBlock::psd(4)) == 5);
  CHECK(longest_chain_length(ConeBlock::soc(9)) == 3);
  CHECK(longest_chain_length(ConeBlock::nonneg(3)) == 4);
  CHECK(longest_chain_length(ConeBlock::soc(2)) == 3);
  CHECK(longest_chain_length(ConeBlock::soc(1)) == 2);
}

namespace {

// Random d in the dual of F: nonnegative combination of ri_dual_point and random dual elements
// that vanish on a random subface, so intersections are proper.
Vector random_dual(const FaceDescriptor& F, std::mt19937& rng) {
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> coin(0, 2);
  Vector d = Vector::Zero(F.cone.dim());
  for (std::size_t j = 0; j < F.blocks.size(); ++j) {
    const ConeBlock& b = F.cone.block(j);
    auto dj = d.segment(F.cone.offset(j), b.coords());
    Matrix P = span_basis(b, F.blocks[j]);
    Vector perp = Vector::Zero(b.coords());
    for (Index i = 0; i < b.coords(); ++i) perp(i) = g(rng);
    perp -= P * (P.transpose() * perp);
    int mode = coin(rng);
    if (auto* nf = std::get_if<NonNegFace>(&F.blocks[j])) {
      for (Index i : nf->support) dj(i) = (mode == 0 || g(rng) > 0) ? 0.0 : std::abs(g(rng));
    } else if (auto* sf = std::get_if<SocFace>(&F.blocks[j])) {
      if (sf->state == SocFace::State::Full) {
        Vector v(b.size);
        for (Index i = 0; i < b.size; ++i) v(i) = g(rng);
        if (b.size > 1) v(0) = v.tail(b.size - 1).norm() + (mode == 1 ? std::abs(g(rng)) : 0.0);
        else v(0) = std::abs(v(0));
        if (mode != 0) dj = v;
      } else if (sf->state == SocFace::State::Ray) {
        if (mode == 1) dj = sf->ray;
      }
    } else {
      const Matrix& U = std::get<PsdFace>(F.blocks[j]).basis;
      Index r = U.cols();
      if (r > 0 && mode != 0) {
        Index k = 1 + Index(rng() % r);
        Matrix G(r, k);
        for (Index a = 0; a < r; ++a)
          for (Index c = 0; c < k; ++c) G(a, c) = g(rng);
        dj = svec(U * G * G.transpose() * U.transpose());
      }
    }
    dj += perp;
  }
  return d;
}

}  // namespace

TEST_CASE("property: intersected face is a subset and orthogonal to d") {
  std::mt19937 rng(11);
  ConeProduct K({ConeBlock::nonneg(3), ConeBlock::soc(3), ConeBlock::psd(3), ConeBlock::soc(2)});
  for (int trial = 0; trial < 200; ++trial) {
    FaceDescriptor F = FaceDescriptor::full(K);
    for (int step = 0; step < 3; ++step) {
      Vector d = random_dual(F, rng);
      REQUIRE(dual_face_contains(F, d, 1e-9));
      int dp = dist_to_polyhedrality(F);
      FaceDescriptor G = face_intersect_hyperplane(F, d, 1e-8);
      for (int s = 0; s < 5; ++s) {
        Vector x = sample_face_point(G, rng);
        CHECK(face_contains(F, x, 1e-9));
        CHECK(contains(K, x, 1e-9));
        CHECK(std::abs(x.dot(d)) < 1e-9 * (1 + d.norm() * x.norm()));
      }
      CHECK(dist_to_polyhedrality(G) <= dp);
      for (std::size_t j = 0; j < F.blocks.size(); ++j) {
        if (auto* pf = std::get_if<PsdFace>(&F.blocks[j])) {
          const Matrix& U = pf->basis;
          Vector dj = d.segment(K.offset(j), K.block(j).coords());
          Matrix M = U.transpose() * smat(dj) * U;
          if (M.norm() > 1e-6 * d.norm() && U.cols() >= 2)
            CHECK(dist_to_polyhedrality(K.block(j), G.blocks[j]) <= dist_to_polyhedrality(K.block(j), F.blocks[j]) - 1);
        }
      }
      F = G;
    }
  }
}

TEST_CASE("property: dual membership is consistent with face points") {
  std::mt19937 rng(5);
  ConeProduct K({ConeBlock::nonneg(2), ConeBlock::soc(4), ConeBlock::psd(3)});
  std::normal_distribution<double> g;
  int tested = 0;
  for (int trial = 0; trial < 300; ++trial) {
    FaceDescriptor F = FaceDescriptor::full(K);
    F = face_intersect_hyperplane(F, random_dual(F, rng), 1e-8);
    Vector x = random_dual(F, rng);
    if (!dual_face_contains(F, x, 0.0)) continue;
    ++tested;
    for (int s = 0; s < 5; ++s) {
      Vector y = sample_face_point(F, rng);
      CHECK(x.dot(y) >= -1e-9);
    }
  }
  CHECK(tested > 100);
}

TEST_CASE("property: polyhedral faces have zero distP") {
  ConeBlock s5 = ConeBlock::soc(5);
  CHECK(is_polyhedral(s5, SocFace{SocFace::State::Zero, {}}));
  CHECK(is_polyhedral(s5, SocFace{SocFace::State::Ray, Vector::Unit(5, 0)}));
  std::mt19937 rng(3);
  ConeProduct K({ConeBlock::nonneg(2), ConeBlock::soc(3), ConeBlock::psd(3)});
  for (int t = 0; t < 100; ++t) {
    FaceDescriptor F = face_intersect_hyperplane(FaceDescriptor::full(K), random_dual(FaceDescriptor::full(K), rng), 1e-8);
    for (std::size_t j = 0; j < F.blocks.size(); ++j)
      if (is_polyhedral(K.block(j), F.blocks[j])) CHECK(dist_to_polyhedrality(K.block(j), F.blocks[j]) == 0);
  }
}

TEST_CASE("ri margin and face equality") {
  ConeProduct K({ConeBlock::soc(3), ConeBlock::psd(2)});
  auto F = FaceDescriptor::full(K);
  CHECK(ri_margin(F, ri_point(F), 1e-12) > 0.5);
  Vector x = Vector::Zero(K.dim());
  x.head(3) = vec({1, 1, 0});
  x.tail(3) = svec(mat2(1, 0, 1));
  CHECK(std::abs(ri_margin(F, x, 1e-12)) < 1e-12);
  CHECK(faces_equal(F, F, 1e-12));
  auto G = face_intersect_hyperplane(F, x, 1e-8);
  CHECK_FALSE(faces_equal(F, G, 1e-9));
}
