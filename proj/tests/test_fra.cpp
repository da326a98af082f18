#include <doctest.h>

#include "conefract/fra.hpp"
#include "conefract/instances.hpp"
#include "conefract/intersect.hpp"

#include <random>

using namespace conefract;

namespace {

FraOptions numeric_opts() {
  FraOptions o;
  o.tol = 1e-6;
  return o;
}

// b = 0 toys for the weak-infeasibility analyzer
ConicLP toy(const ConeProduct& K, const Matrix& A, const Vector& c) {
  ConicLP p;
  p.cone = K;
  p.A = A;
  p.b = Vector::Zero(A.rows());
  p.c = c;
  return p;
}

Matrix row(std::initializer_list<double> v) {
  Matrix r(1, Index(v.size()));
  Index i = 0;
  for (double x : v) r(0, i++) = x;
  return r;
}

}  // namespace

TEST_CASE("scripted example: phase 1 alone, or phase 1 then phase 2") {
  Instance ex = gen_scripted_example();
  REQUIRE(ex.scripts.size() == 2);

  OracleFinder a(ex.scripts[0]);
  FraRun r0 = fra_poly(ex.prob, a);
  CHECK(r0.cert.status == CertStatus::MinimalFaceFound);
  CHECK(r0.cert.steps() == 1);
  CHECK(r0.cert.phase1_steps == 1);
  CHECK(faces_equal(r0.cert.terminal(), *ex.minimal_face, 1e-12));
  CHECK(verify_certificate(ex.prob, r0.cert, 1e-9).ok);
  CHECK(classify(r0.cert) == FeasibilityStatus::WeaklyFeasible);

  OracleFinder b(ex.scripts[1]);
  FraRun r1 = fra_poly(ex.prob, b);
  CHECK(r1.cert.status == CertStatus::MinimalFaceFound);
  CHECK(r1.cert.steps() == 2);
  CHECK(r1.cert.phase1_steps == 1);
  CHECK(faces_equal(r1.cert.terminal(), *ex.minimal_face, 1e-12));
  CHECK(verify_certificate(ex.prob, r1.cert, 1e-9).ok);

  // phase 1 on its own stops at a polyhedral face with a PPS witness
  OracleFinder c(ex.scripts[1]);
  FraRun p1 = fra_poly_phase1(ex.prob, c);
  CHECK(p1.cert.status == CertStatus::PPSRestored);
  CHECK(p1.cert.mode == CertMode::PolyPhase1);
  CHECK(is_polyhedral(p1.cert.terminal()));
  CHECK(verify_certificate(ex.prob, p1.cert, 1e-9).ok);
  CHECK_FALSE(classify(p1.cert).has_value());
}

TEST_CASE("scripted example: numeric finder reaches the same face") {
  Instance ex = gen_scripted_example();
  NumericFinder f;
  FraRun r = fra_poly(ex.prob, f, numeric_opts());
  CHECK(faces_equal(r.cert.terminal(), *ex.minimal_face, 1e-4));
  CHECK(verify_certificate(ex.prob, r.cert, 1e-6).ok);
}

TEST_CASE("worst-case family: scripted step counts and forced order") {
  const std::vector<std::pair<std::vector<Index>, std::vector<Index>>> sizes = {
      {{3}, {}}, {{}, {3}}, {{3, 3}, {3, 3}}, {{3}, {3, 4}}, {{4}, {5}}};
  for (const auto& [t, n] : sizes) {
    Instance w = gen_worst_case(t, n);
    REQUIRE(w.expected_steps.has_value());
    // expected count: r1 + sum n_j - r2, with r1 SOC and r2 PSD blocks
    int expected = int(t.size()) - int(n.size());
    for (Index s : n) expected += int(s);
    CHECK(*w.expected_steps == expected);
    OracleFinder f(w.scripts[0]);
    FraRun r = generic_fra(w.prob, f);
    CHECK(r.cert.steps() == expected);
    CHECK(faces_equal(r.cert.terminal(), *w.minimal_face, 1e-12));
    CHECK(verify_certificate(w.prob, r.cert, 1e-9).ok);
    CHECK(r.cert.steps() <= bounds_report(w.prob).poly);
    // each direction is only reducing once its predecessors have cut the face
    const auto& D = r.cert.directions;
    for (std::size_t i = 0; i + 1 < D.size(); ++i)
      CHECK_FALSE(check_reducing_direction(w.prob, r.cert.faces[i], D[i + 1], 1e-9).valid);
  }
  CHECK_THROWS_AS(gen_worst_case({2}, {}), std::invalid_argument);
  CHECK_THROWS_AS(gen_worst_case({}, {2}), std::invalid_argument);
}

TEST_CASE("worst-case family: numeric poly driver within the bound") {
  for (const auto& [t, n] : std::vector<std::pair<std::vector<Index>, std::vector<Index>>>{{{3}, {3}}, {{3, 3}, {3, 3}}}) {
    Instance w = gen_worst_case(t, n);
    NumericFinder f;
    FraRun r = fra_poly(w.prob, f, numeric_opts());
    CHECK(faces_equal(r.cert.terminal(), *w.minimal_face, 1e-4));
    CHECK(verify_certificate(w.prob, r.cert, 1e-6).ok);
    CHECK(r.cert.steps() <= 1 + sum_dist_poly(w.prob.cone));
  }
}

TEST_CASE("property: planted ground truth recovered on every family") {
  for (const char* fam : {"nonneg", "soc", "psd", "mixed"}) {
    int bad = 0;
    for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
      Instance I = gen_planted_family(fam, seed);
      NumericFinder f;
      FraRun r = fra_poly(I.prob, f, numeric_opts());
      bool ok = verify_certificate(I.prob, r.cert, 1e-6).ok;
      if (*I.status == FeasibilityStatus::StronglyInfeasible)
        ok = ok && r.cert.status == CertStatus::InfeasibleStrong && classify(r.cert) == *I.status;
      else
        ok = ok && r.cert.status == CertStatus::MinimalFaceFound &&
             faces_equal(r.cert.terminal(), *I.minimal_face, 1e-4) && classify(r.cert) == *I.status;
      ok = ok && r.cert.steps() <= 1 + sum_dist_poly(I.prob.cone);
      if (!ok) {
        ++bad;
        MESSAGE(fam << " seed " << seed);
      }
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("property: exact and classic drivers agree on orthant instances") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Instance I = gen_planted_orthant(2 + Index(seed % 5), seed);
    ExactFinder e1, e2;
    FraRun poly = fra_poly(I.prob, e1);
    FraRun classic = generic_fra(I.prob, e2);
    CHECK(faces_equal(poly.cert.terminal(), *I.minimal_face, 0.0));
    CHECK(faces_equal(classic.cert.terminal(), *I.minimal_face, 0.0));
    CHECK(verify_certificate(I.prob, poly.cert, 1e-9).ok);
    CHECK(verify_certificate(I.prob, classic.cert, 1e-9).ok);
    CHECK(classic.cert.mode == CertMode::Classic);
  }
}

TEST_CASE("strict complementarity shortcut: one step on orthant instances") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Instance I = gen_planted_orthant(2 + Index(seed % 4), 700 + seed);
    FraRun a = shortcut_fra(I.prob);
    CHECK(a.cert.steps() <= 1);
    CHECK(faces_equal(a.cert.terminal(), *I.minimal_face, 0.0));
    CHECK(verify_certificate(I.prob, a.cert, 1e-9).ok);
  }
}

TEST_CASE("bounds report rows") {
  BoundsReport sp = bounds_report(
      ConeProduct({ConeBlock::soc(3), ConeBlock::soc(3), ConeBlock::psd(3), ConeBlock::psd(3)}), std::nullopt);
  CHECK(sp.row == "soc-psd");
  CHECK(sp.classic == 11);
  CHECK(sp.poly == 7);

  BoundsReport dnn =
      bounds_report(ConeProduct({ConeBlock::psd(3)}), ConeProduct({ConeBlock::nonneg(6)}));
  CHECK(dnn.row == "dnn");
  CHECK(dnn.classic == 7);
  CHECK(dnn.poly == 3);

  BoundsReport single = bounds_report(ConeProduct({ConeBlock::psd(3)}), std::nullopt);
  CHECK(single.row == "single");
  CHECK(single.classic == 4);
  CHECK(single.poly == 3);

  BoundsReport orth = bounds_report(ConeProduct({ConeBlock::nonneg(5)}), std::nullopt);
  CHECK(orth.classic == 6);  // faces of dimension 0..5
  CHECK(orth.poly == 1);

  BoundsReport mixed = bounds_report(ConeProduct({ConeBlock::nonneg(2), ConeBlock::soc(3)}), std::nullopt, 9);
  CHECK(mixed.row == "product");
  CHECK(mixed.classic == 5);  // 1 + (3 - 1) + (3 - 1)
  CHECK(mixed.poly == 2);
  CHECK_FALSE(mixed.within_poly());
}

TEST_CASE("property: the poly bound never exceeds the classic bound") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 300; ++it) {
    std::vector<ConeBlock> bl;
    const int k = 1 + int(rng() % 4);
    for (int j = 0; j < k; ++j) {
      const Index s = 1 + Index(rng() % 5);
      switch (rng() % 3) {
        case 0: bl.push_back(ConeBlock::nonneg(s)); break;
        case 1: bl.push_back(ConeBlock::soc(s)); break;
        default: bl.push_back(ConeBlock::psd(s)); break;
      }
    }
    ConeProduct K(bl);
    BoundsReport r = bounds_report(K, std::nullopt);
    CHECK(r.poly <= r.classic);
    CHECK(r.poly == 1 + sum_dist_poly(K));
    CHECK(r.classic == chain_length(K));
  }
}

TEST_CASE("snap_direction recovers a perturbed rational direction") {
  Instance w = gen_worst_case({3}, {3});
  OracleFinder f(w.scripts[0]);
  FraRun r = generic_fra(w.prob, f);
  const FaceDescriptor& F0 = r.cert.faces[0];
  const Vector& d = r.cert.directions[0];
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Vector noisy = d;
  for (Index i = 0; i < d.size(); ++i) noisy(i) += 1e-11 * g(rng);
  auto s = snap_direction(w.prob, F0, noisy, 1e-8, 1e-8);
  REQUIRE(s.has_value());
  CHECK((*s / s->norm() - d / d.norm()).norm() <= 1e-14);
  Vector junk = Vector::Zero(d.size());
  for (Index i = 0; i < d.size(); ++i) junk(i) = g(rng);
  CHECK_FALSE(snap_direction(w.prob, F0, junk, 1e-8, 1e-8).has_value());
}

TEST_CASE("analyzer: weakly infeasible SDP needs one direction") {
  Matrix C = Matrix::Zero(2, 2);
  C(0, 1) = C(1, 0) = 1.0;
  auto r = analyze_not_strongly_infeasible(toy(ConeProduct({ConeBlock::psd(2)}), row({-1, 0, 0}), svec(C)));
  CHECK_FALSE(r.strongly_infeasible);
  CHECK(r.dim == 1);
  CHECK(r.bound == 1);
  CHECK(r.no_certificate_exact);
  CHECK(r.no_certificate_aux == "Reduce");
  CHECK(r.dim <= r.bound);
}

TEST_CASE("analyzer: SOC and SOC x orthant toys") {
  auto r = analyze_not_strongly_infeasible(toy(ConeProduct({ConeBlock::soc(3)}), row({-1, -1, 0}), Vector::Unit(3, 2)));
  CHECK_FALSE(r.strongly_infeasible);
  CHECK(r.dim == 1);
  CHECK(r.dim <= r.bound);
  auto m = analyze_not_strongly_infeasible(
      toy(ConeProduct({ConeBlock::soc(3), ConeBlock::nonneg(1)}), row({-1, -1, 0, 0}), Vector::Unit(4, 2)));
  CHECK(m.dim == 1);
  CHECK(m.dim <= m.bound);
}

TEST_CASE("analyzer: strongly infeasible and strongly feasible inputs") {
  auto s = analyze_not_strongly_infeasible(toy(ConeProduct({ConeBlock::soc(3)}), row({0, -1, 0}), -Vector::Unit(3, 0)));
  CHECK(s.strongly_infeasible);
  REQUIRE(s.certificate.has_value());
  const Vector& d = *s.certificate;
  CHECK(std::abs(d(1)) <= 1e-12);  // A d = 0
  CHECK(d(0) >= std::hypot(d(1), d(2)) - 1e-12);
  CHECK(-d(0) < 0.0);

  auto f = analyze_not_strongly_infeasible(
      toy(ConeProduct({ConeBlock::psd(2)}), row({1, 0, 0}), svec(Matrix::Identity(2, 2))));
  CHECK_FALSE(f.strongly_infeasible);
  CHECK(f.dim == 0);
}

TEST_CASE("analyzer: PSD(3) chain of length two") {
  Matrix A(2, 6);
  Matrix E11 = Matrix::Zero(3, 3), E22 = Matrix::Zero(3, 3), C = Matrix::Zero(3, 3);
  E11(0, 0) = 1;
  E22(1, 1) = 1;
  C(0, 1) = C(1, 0) = C(1, 2) = C(2, 1) = 1;
  A.row(0) = -svec(E11).transpose();
  A.row(1) = -svec(E22).transpose();
  auto r = analyze_not_strongly_infeasible(toy(ConeProduct({ConeBlock::psd(3)}), A, svec(C)));
  CHECK_FALSE(r.strongly_infeasible);
  CHECK(r.dim == 1);
  CHECK(r.bound == 2);
  CHECK(r.basis.cols() == r.dim);
  for (const Vector& di : r.directions) CHECK(contains(ConeProduct({ConeBlock::psd(3)}), di, 1e-9));
}

TEST_CASE("partial alternative: each side on planted instances") {
  ConeProduct K({ConeBlock::soc(3), ConeBlock::nonneg(2)});
  Matrix A(2, 5);
  A << 2, 0.3, -0.2, 1, 0.5,  // interior of K in L
      0.1, 1, 0, -1, 2;
  AlternativeReport b = partial_alternative(A, K, 1e-7);
  CHECK(b.side_b);
  CHECK_FALSE(b.side_a);
  REQUIRE(b.s.has_value());
  CHECK(b.margin > 0.0);

  Vector x(5);
  x << 1, 0.6, 0.8, 0, 0.5;  // x^1 on the SOC boundary
  x.normalize();
  Matrix A2 = A - (A * x) * x.transpose();
  AlternativeReport a = partial_alternative(A2, K, 1e-7);
  CHECK(a.side_a);
  CHECK_FALSE(a.side_b);
  REQUIRE(a.x.has_value());
  CHECK((A2 * *a.x).norm() <= 1e-6 * a.x->norm());
  CHECK(contains(K, *a.x / a.x->norm(), 1e-6));

  AlternativeReport poly = partial_alternative(Matrix::Zero(1, 2), ConeProduct({ConeBlock::nonneg(2)}), 1e-7);
  CHECK(poly.side_b);
  CHECK_FALSE(poly.side_a);
}

TEST_CASE("property: exactly one side of the partial alternative holds") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  int both = 0, neither = 0;
  for (int it = 0; it < 60; ++it) {
    const Index k = 1 + it % 3, n = 3 + k;
    ConeProduct K({ConeBlock::soc(3), ConeBlock::nonneg(k)});
    const Index m = 1 + Index(rng() % std::uint64_t(n - 1));
    Matrix A(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) A(i, j) = g(rng);
    if (it % 3 == 2) {
      Vector x(n);
      x(0) = (it % 2) ? 1.0 : 1.5;
      Vector u(2);
      u << g(rng), g(rng);
      x.segment(1, 2) = u.normalized();
      for (Index i = 3; i < n; ++i) x(i) = (rng() % 2) ? std::abs(g(rng)) : 0.0;
      x.normalize();
      A -= (A * x) * x.transpose();
    }
    AlternativeReport r = partial_alternative(A, K, 1e-7);
    both += r.side_a && r.side_b;
    neither += !r.side_a && !r.side_b;
  }
  CHECK(both == 0);
  CHECK(neither == 0);
}

TEST_CASE("aux solves on degenerate DNN pairs converge past the square-root regime") {
  // not strictly complementary: the primal residual used to grow once the scaling degenerated
  for (auto [n, seed] : std::vector<std::pair<Index, std::uint64_t>>{{3, 9043}, {4, 9016}}) {
    Instance I = gen_planted_dnn(n, seed);
    DupMapping m = duplicate(I.prob);
    ReducedProblem v = reduce_problem(m.dup, FaceEmbedding::of(FaceDescriptor::full(m.dup.cone)));
    AuxPair a = build_aux_pair(m.dup, v, AuxPhase::Phase1);
    IpmResult r = solve_ipm(a.lp, IpmSettings::tight(), a.warm);
    CHECK(r.complementarity <= 1e-10);
    CHECK(r.pres <= 1e-10);
    CHECK(r.dres <= 1e-10);
  }
}

TEST_CASE("planted DNN faces match after the first cut") {
  for (auto [n, seed] : std::vector<std::pair<Index, std::uint64_t>>{{3, 9043}, {4, 9016}, {3, 9008}}) {
    Instance I = gen_planted_dnn(n, seed);
    DupMapping m = duplicate(I.prob);
    NumericFinder f;
    FraRun r = fra_poly(m.dup, f, numeric_opts());
    IntersectionCertificate ic = recombine(m, r.cert);
    CHECK(faces_equal(join_faces(m, ic.terminal()), *I.minimal_face, 1e-6));
    CHECK(verify_intersection_certificate(I.prob, ic, 1e-6).ok);
  }
}

TEST_CASE("phase 2 extrapolates when the phase-1 slack vanishes") {
  // c lies in range A^T, so s' = 0 and the reducing solve returns a tiny slack
  Instance I = gen_planted_family("nonneg", 100393);
  NumericFinder f;
  FraRun r = fra_poly(I.prob, f, numeric_opts());
  REQUIRE(r.cert.slack_prime.has_value());
  CHECK(r.cert.slack_prime->norm() <= 1e-12);
  CHECK(r.beta < 0.0);
  CHECK(faces_equal(r.cert.terminal(), *I.minimal_face, 0.0));
  VerifyReport v = verify_certificate(I.prob, r.cert, 1e-6);
  CHECK(v.ok);
  CHECK(v.terminal_margin >= 1e-6);
}
