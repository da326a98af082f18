#include <doctest.h>

#include "conefract/instances.hpp"

#include <cstdlib>

using namespace conefract;

namespace {

bool same_problem(const ConicLP& a, const ConicLP& b) {
  return a.cone == b.cone && a.A == b.A && a.b == b.b && a.c == b.c;
}

}  // namespace

TEST_CASE("property: planted faces are exposed by a vector orthogonal to range A^T") {
  for (const char* fam : {"nonneg", "soc", "psd", "mixed"}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Instance I = gen_planted_family(fam, seed);
      const ConicLP& P = I.prob;
      CHECK_NOTHROW(P.validate());
      CHECK((P.A * P.A.transpose() - Matrix::Identity(P.rows(), P.rows())).norm() <= 1e-10);
      if (*I.status == FeasibilityStatus::StronglyInfeasible) {
        REQUIRE(I.infeasibility.has_value());
        const Vector& x = *I.infeasibility;
        CHECK(dual_face_contains(FaceDescriptor::full(P.cone), x, 1e-12));
        CHECK((P.A * x).norm() <= 1e-10);
        CHECK(P.c.dot(x) == doctest::Approx(-1.0));
        continue;
      }
      REQUIRE(I.minimal_face.has_value());
      const FaceDescriptor& T = *I.minimal_face;
      const Vector z = exposing_vector(T);
      // K cap z^perp = T, and z is orthogonal to every slack
      CHECK(dual_face_contains(FaceDescriptor::full(P.cone), z, 1e-12));
      if (z.norm() <= 1e-12) {
        CHECK(face_dimension(T) == P.cone.dim());
      } else {
        CHECK(faces_equal(face_intersect_hyperplane(FaceDescriptor::full(P.cone), z, 1e-12), T, 1e-9));
        CHECK((P.A * z).norm() <= 1e-10 * z.norm());
        CHECK(std::abs(P.c.dot(z)) <= 1e-10 * z.norm());
      }
      const Vector s = P.c - P.A.transpose() * *I.y_feasible;
      CHECK(ri_margin(T, s, 1e-10) > 0.0);
      CHECK((face_dimension(T) == P.cone.dim()) == (*I.status == FeasibilityStatus::StronglyFeasible));
    }
  }
}

TEST_CASE("orthant instances carry integer data") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Instance I = gen_planted_orthant(2 + Index(seed % 5), seed);
    const ConicLP& P = I.prob;
    CHECK(P.A == P.A.array().round().matrix());
    CHECK(P.c == P.c.array().round().matrix());
    const auto& S = std::get<NonNegFace>(I.minimal_face->blocks[0]).support;
    CHECK(Index(S.size()) < P.cols());
    const Vector s = P.c - P.A.transpose() * *I.y_feasible;
    CHECK(ri_margin(*I.minimal_face, s, 1e-12) > 0.0);
  }
  CHECK_THROWS_AS(gen_planted_orthant(1, 0), std::invalid_argument);
}

TEST_CASE("DNN instances plant a face pair of the duplicated cone") {
  for (Index n : {2, 3, 4}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Instance I = gen_planted_dnn(n, seed);
      REQUIRE(I.prob.intersection.has_value());
      const Index N = svec_length(n);
      CHECK(I.prob.cone.dim() == N);
      CHECK(I.prob.intersection->dim() == N);
      const FaceDescriptor& F = *I.minimal_face;
      CHECK(F.cone.size() == 2);
      const Vector s = I.prob.c - I.prob.A.transpose() * *I.y_feasible;
      Vector ss(2 * N);
      ss << s, s;
      CHECK(ri_margin(F, ss, 1e-9) > 0.0);
      const Vector zz = exposing_vector(F);
      CHECK((I.prob.A * (zz.head(N) + zz.tail(N))).norm() <= 1e-9 * zz.norm());
    }
  }
}

TEST_CASE("worst-case instances: orthonormal rows, zero objective, forced directions") {
  Instance w = gen_worst_case({3, 4}, {3});
  const ConicLP& P = w.prob;
  CHECK(P.c.isZero());
  CHECK((P.A * P.A.transpose() - Matrix::Identity(P.rows(), P.rows())).norm() <= 1e-12);
  const auto dirs = worst_case_directions({3, 4}, {3});
  CHECK(Index(dirs.size()) == *w.expected_steps);
  CHECK(P.rows() + Index(dirs.size()) == P.cols());
  for (const Vector& d : dirs) CHECK((P.A * d).norm() <= 1e-12 * d.norm());
  const Vector s = P.c - P.A.transpose() * *w.y_feasible;
  CHECK(ri_margin(*w.minimal_face, s, 1e-12) > 0.0);
}

TEST_CASE("generators are deterministic in the seed") {
  CHECK(same_problem(gen_planted_family("mixed", 9).prob, gen_planted_family("mixed", 9).prob));
  CHECK_FALSE(same_problem(gen_planted_family("psd", 9).prob, gen_planted_family("psd", 10).prob));
  CHECK(same_problem(gen_planted_dnn(3, 4).prob, gen_planted_dnn(3, 4).prob));
  CHECK_THROWS_AS(gen_planted_family("cube", 1), std::invalid_argument);
}

TEST_CASE("seed override from the environment") {
  ::unsetenv("CONEFRACT_SEED");
  CHECK(seed_from_env(17) == 17);
  ::setenv("CONEFRACT_SEED", "4242", 1);
  CHECK(seed_from_env(17) == 4242);
  ::setenv("CONEFRACT_SEED", "abc", 1);
  CHECK_THROWS_AS(seed_from_env(17), InputError);
  ::unsetenv("CONEFRACT_SEED");
}

TEST_CASE("metadata sidecar carries the ground truth") {
  Instance I = gen_planted_family("soc", 3);
  Json j = I.metadata();
  CHECK(j["seed"] == 3);
  CHECK(j["kind"] == "planted-soc");
  CHECK(j.contains("status"));
  Instance w = gen_worst_case({3}, {3});
  Json k = Json::parse(dump_json(w.metadata()));
  CHECK(k["expected_steps"] == 3);
  FaceDescriptor F = face_from_json(k["minimal_face"], cone_from_json(k["minimal_face_cone"], "cone"), "minimal_face");
  CHECK(faces_equal(F, *w.minimal_face, 1e-12));
  CHECK(k["scripts"].size() == 1);
}
