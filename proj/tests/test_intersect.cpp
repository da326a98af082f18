#include <doctest.h>

#include "conefract/fra.hpp"
#include "conefract/instances.hpp"
#include "conefract/intersect.hpp"

#include <random>

using namespace conefract;

namespace {

ConicLP dnn_problem(Index n) {
  const Index N = svec_length(n);
  ConicLP p;
  p.cone = ConeProduct({ConeBlock::psd(n)});
  p.intersection = ConeProduct({ConeBlock::nonneg(N)});
  p.A = Matrix::Zero(1, N);
  p.A(0, 0) = 1.0;
  p.b = Vector::Zero(1);
  p.c = svec(Matrix::Identity(n, n));
  return p;
}

}  // namespace

TEST_CASE("duplication doubles the variables and copies the slack") {
  ConicLP p = dnn_problem(2);
  DupMapping m = duplicate(p);
  CHECK(m.dup.cols() == 6);
  CHECK(m.dup.rows() == 1);
  CHECK(m.dup.cone.size() == 2);
  Vector y = Vector::Constant(1, 0.7);
  Vector s = m.dup.c - m.dup.A.transpose() * y;
  CHECK((m.first(s) - m.second(s)).norm() == 0.0);
  CHECK((m.first(s) - (p.c - p.A.transpose() * y)).norm() == 0.0);
  // x2 = 0 keeps A x1
  Vector x = Vector::Zero(6);
  x.head(3) = Vector::Unit(3, 1);
  CHECK((m.dup.A * x - p.A * m.first(x)).norm() == 0.0);

  ConicLP q = p;
  q.intersection.reset();
  CHECK_THROWS_WITH_AS(duplicate(q), doctest::Contains("intersection"), std::invalid_argument);
  q.intersection = ConeProduct({ConeBlock::nonneg(2)});
  CHECK_THROWS_AS(duplicate(q), std::invalid_argument);
}

TEST_CASE("recombine on trivial certificates") {
  ConicLP p = dnn_problem(2);
  DupMapping m = duplicate(p);
  ReductionCertificate none;
  none.faces.push_back(FaceDescriptor::full(m.dup.cone));
  IntersectionCertificate c0 = recombine(m, none);
  CHECK(c0.steps() == 0);
  CHECK(faces_equal(c0.terminal().f1, FaceDescriptor::full(m.k1), 0.0));
  CHECK(faces_equal(c0.terminal().f2, FaceDescriptor::full(m.k2), 0.0));

  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1.0;
  Vector dd = Vector::Zero(6);
  dd.head(3) = svec(D);
  ReductionCertificate one = none;
  one.directions.push_back(dd);
  one.faces.push_back(face_intersect_hyperplane(none.faces[0], dd, 1e-12));
  IntersectionCertificate c1 = recombine(m, one);
  REQUIRE(c1.steps() == 1);
  CHECK((c1.directions[0] - svec(D)).norm() == 0.0);
  CHECK(c1.parts2[0].isZero());
  CHECK(faces_equal(join_faces(m, c1.faces[1]), one.faces[1], 0.0));
}

TEST_CASE("property: split sums and pair faces, sampled") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Index n = 3, N = svec_length(n);
  const ConeProduct K1({ConeBlock::psd(n)}), K2({ConeBlock::nonneg(N)});
  const ConeProduct K12({ConeBlock::psd(n), ConeBlock::nonneg(N)});
  auto nonneg_vec = [&](double zero_prob) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = u01(rng) < zero_prob ? 0.0 : 0.5 + u01(rng);
    return v;
  };
  int first_hits = 0, second_hits = 0;
  for (int it = 0; it < 1000; ++it) {
    // d1 in K1* = PSD, d2 in K2* = orthant, both with random zero patterns
    const Vector w = nonneg_vec(0.5);
    const Vector d1 = svec(w * w.transpose());
    Vector d2(N);
    for (Index i = 0; i < N; ++i) d2(i) = u01(rng) < 0.6 ? 0.0 : u01(rng);

    // (K1 x K2) cap {(d1,d2)}^perp  iff  z1 in K1 cap d1^perp and z2 in K2 cap d2^perp
    const Vector a = nonneg_vec(0.5);
    Vector z1 = svec(a * a.transpose());
    if (it % 4 == 0) z1 += 0.3 * svec(Matrix::Identity(n, n));
    Vector z2(N);
    for (Index i = 0; i < N; ++i) z2(i) = d2(i) > 0 && u01(rng) < 0.7 ? 0.0 : std::abs(g(rng));
    if (it % 5 == 0) z2(0) = -0.5;
    Vector z(2 * N);
    z << z1, z2;
    Vector d(2 * N);
    d << d1, d2;
    const bool lhs = contains(K12, z, 1e-9) && std::abs(d.dot(z)) <= 1e-9;
    const bool rhs = contains(K1, z1, 1e-9) && std::abs(d1.dot(z1)) <= 1e-9 && contains(K2, z2, 1e-9) &&
                     std::abs(d2.dot(z2)) <= 1e-9;
    CHECK(lhs == rhs);
    first_hits += lhs;

    // x in K1 cap K2: x perp d1 and x perp d2  iff  x perp d1 + d2
    const Vector x = z1;  // nonnegative PSD matrix, so in K1 cap K2
    REQUIRE(contains(K1, x, 1e-12));
    REQUIRE(contains(K2, x, 1e-12));
    const bool both = std::abs(d1.dot(x)) <= 1e-9 && std::abs(d2.dot(x)) <= 1e-9;
    const bool sum = std::abs((d1 + d2).dot(x)) <= 1e-9;
    CHECK(both == sum);
    second_hits += sum;
  }
  // both branches of each equivalence were exercised
  CHECK(first_hits > 20);
  CHECK(first_hits < 980);
  CHECK(second_hits > 20);
  CHECK(second_hits < 980);
}

TEST_CASE("property: planted DNN instances reduce in at most n steps") {
  for (Index n : {2, 3}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Instance I = gen_planted_dnn(n, 500 + seed);
      DupMapping m = duplicate(I.prob);
      NumericFinder f;
      FraOptions o;
      o.tol = 1e-6;
      FraRun r = fra_poly(m.dup, f, o);
      CHECK(r.cert.steps() <= n);
      CHECK(faces_equal(r.cert.terminal(), *I.minimal_face, 1e-4));
      IntersectionCertificate ic = recombine(m, r.cert);
      CHECK(verify_intersection_certificate(I.prob, ic, 1e-6).ok);
      // membership at the loosest face tolerance the run recorded
      double ftol = 1e-6;
      for (double t : r.cert.step_tols) ftol = std::max(ftol, t);
      CHECK(face_pair_contains(ic.terminal(), *ic.slack_hat, ftol * (1.0 + ic.slack_hat->norm())));
    }
  }
}

TEST_CASE("pair verification rejects an inconsistent split") {
  Instance I = gen_planted_dnn(3, 42);
  DupMapping m = duplicate(I.prob);
  NumericFinder f;
  FraOptions o;
  o.tol = 1e-6;
  IntersectionCertificate ic = recombine(m, fra_poly(m.dup, f, o).cert);
  REQUIRE(ic.steps() >= 1);
  REQUIRE(verify_intersection_certificate(I.prob, ic, 1e-6).ok);
  IntersectionCertificate bad = ic;
  bad.parts1[0] *= 2.0;
  CHECK_FALSE(verify_intersection_certificate(I.prob, bad, 1e-6).ok);
  bad = ic;
  bad.slack_hat = *ic.slack_hat + Vector::Constant(ic.slack_hat->size(), 1e-3);
  CHECK_FALSE(verify_intersection_certificate(I.prob, bad, 1e-6).ok);
}

TEST_CASE("DNN bounds rows for n = 2, 3, 4") {
  for (Index n : {2, 3, 4}) {
    BoundsReport r = bounds_report(dnn_problem(n));
    CHECK(r.row == "dnn");
    CHECK(r.poly == n);
    CHECK(r.classic == 1 + n * (n + 1) / 2);
  }
}

TEST_CASE("DNN face chain: length and strictness witnesses") {
  CHECK(dnn_chain(2).size() == 4);
  CHECK(dnn_chain(3).size() == 7);
  CHECK(dnn_chain(4).size() == 11);
  for (Index n : {2, 3, 4}) {
    auto chain = dnn_chain(n);
    ChainCheck c = verify_dnn_chain(n, chain);
    CHECK(c.ok);
    for (std::size_t k = 1; k < chain.size(); ++k) {
      CHECK(exact_psd(chain[k].witness));
      CHECK((chain[k].witness.array() >= 0).all());
    }
  }
  auto chain = dnn_chain(3);
  auto swapped = chain;
  std::swap(swapped[2], swapped[3]);
  CHECK_FALSE(verify_dnn_chain(3, swapped).ok);
  auto stale = chain;
  stale[5].witness = stale[4].witness;
  ChainCheck c = verify_dnn_chain(3, stale);
  CHECK_FALSE(c.ok);
  CHECK(c.failing == 5);
  auto shortened = chain;
  shortened.pop_back();
  CHECK_FALSE(verify_dnn_chain(3, shortened).ok);
}

TEST_CASE("exact PSD test") {
  Matrix A(2, 2);
  A << 1, 1, 1, 1;
  CHECK(exact_psd(A));
  A(1, 1) = 0.999;
  CHECK_FALSE(exact_psd(A));
  Matrix B = Matrix::Zero(3, 3);
  B(0, 1) = B(1, 0) = 1;
  CHECK_FALSE(exact_psd(B));
  CHECK(exact_psd(Matrix::Zero(3, 3)));
}
