#pragma once

#include "conefract/io.hpp"
#include "conefract/solvers/finders.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace conefract {

struct Instance {
  std::string kind;
  ConicLP prob;
  std::vector<OracleScript> scripts;          ///< oracle scripts (example: two variants)
  std::optional<FaceDescriptor> minimal_face; ///< over cone, or cone x intersection when duplicated
  std::optional<FeasibilityStatus> status;
  std::optional<int> expected_steps;
  std::optional<Vector> y_feasible;           ///< slack c - A^T y in ri of the minimal face
  std::optional<Vector> infeasibility;        ///< planted x in K* cap ker A, <c,x> = -1
  std::uint64_t seed = 0;

  /// Sidecar: seed, ground truth, expected steps, scripts.
  Json metadata() const;
};

/// Worst-case family over SOC(t_1..) x PSD(n_1..), c = 0, orthonormal A.
Instance gen_worst_case(const std::vector<Index>& soc_dims, const std::vector<Index>& psd_sides);
/// The forced directions, in order (spanning set of the orthogonal complement of range A^T).
std::vector<Vector> worst_case_directions(const std::vector<Index>& soc_dims, const std::vector<Index>& psd_sides);

/// NonNeg(2) x PSD(2) example; scripts[0] has first block (1,2), scripts[1] has (0,1).
Instance gen_scripted_example();

using Rng = std::mt19937_64;

/// Random face of a cone (NonNeg subsets, SOC full/ray/zero, PSD random rank).
FaceDescriptor random_face(const ConeProduct& K, Rng& rng);
/// Exposing vector z in K* with K cap z^perp = F.
Vector exposing_vector(const FaceDescriptor& F);

/// Planted instance with orthonormal A rows. status: StronglyFeasible (target ignored),
/// WeaklyFeasible (minimal face = target), StronglyInfeasible (target ignored).
Instance gen_planted(const ConeProduct& K, const FaceDescriptor& target, FeasibilityStatus status, std::uint64_t seed);
/// Orthant-only planted instance with integer data and minimal face = a random proper support.
Instance gen_planted_orthant(Index n, std::uint64_t seed);
/// PSD(n) cap NonNeg instance; minimal face pair planted from nonnegative vectors u_k.
Instance gen_planted_dnn(Index n, std::uint64_t seed);

/// Named families used by the corpus: "nonneg", "soc", "psd", "mixed".
ConeProduct family_cone(const std::string& family, Rng& rng);
Instance gen_planted_family(const std::string& family, std::uint64_t seed);

/// CONEFRACT_SEED overrides `fallback` when set.
std::uint64_t seed_from_env(std::uint64_t fallback);

}  // namespace conefract
