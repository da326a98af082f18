#pragma once

#include "conefract/embedding.hpp"
#include "conefract/solvers/ipm.hpp"

#include <optional>
#include <string>
#include <utility>

namespace conefract {

enum class AuxPhase { Phase1, Phase2, Generic };

/// Auxiliary pair for one reduction step. Variables (x, t, w) in K_red x R+ x R+.
struct AuxPair {
  AuxPhase phase = AuxPhase::Phase1;
  ConicLP prob;         ///< ambient problem
  ReducedProblem view;  ///< face, embedding, y parametrisation
  Vector e, e_star;     ///< reduced coordinates
  Vector e_amb, e_star_amb;
  ConicLP lp;           ///< rows: -<c,x - t e*> + t - w = 0, <e,x> + w = 1, A x - t A e* = 0
  IpmStart warm;        ///< interior start, y = (0, -1, 0)

  const FaceDescriptor& face() const { return view.emb.face; }
  Index n_red() const { return view.red.cols(); }
};

/// e_j = 0 on polyhedral reduced blocks, identity-like elsewhere; e* interior.
std::pair<Vector, Vector> choose_e_phase1(const ConeProduct& reduced);
/// e = e* = interior point of every block.
std::pair<Vector, Vector> choose_e_generic(const ConeProduct& reduced);
/// Blocks to relax to their span in phase 2 (the nonpolyhedral ones).
std::vector<bool> phase2_relaxation(const FaceDescriptor& face);

struct AuxLp {
  ConicLP lp;
  IpmStart warm;
};
AuxLp build_aux_lp(const ConicLP& red, const Eigen::Ref<const Vector>& e, const Eigen::Ref<const Vector>& e_star);

/// Builds the pair on an existing reduction view (which must be consistent).
AuxPair build_aux_pair(const ConicLP& prob, const ReducedProblem& view, AuxPhase phase);

/// Solution mapped to ambient coordinates. y3 is an ambient y; s' = c - A^T y3 / y1.
struct AuxSolution {
  Vector x;
  double t = 0, w = 0, y1 = 0, y2 = 0;
  Vector y3;
  Vector dual_slack;   ///< c y1 - e y2 - A^T y3
  double t_slack = 0;  ///< 1 - y1 (1 + <c,e*>) + <A e*, y3>
  double w_slack = 0;  ///< y1 - y2
  double gap = 0;
  double resolution = 0;  ///< numerical zero level of the solution (0 when exact)
  bool exact = false;
  bool sentinel = false;  ///< oracle PPS sentinel
  /// Face-cut tolerance from the primal-dual partition (x_i > s_i) on coordinatewise reduced cones,
  /// relative to ||x||; set only when the partition has a clean gap.
  std::optional<double> partition_tol;
};

enum class OutcomeKind { Infeasible, Reduce, PPSHolds, Ambiguous };
std::string to_string(OutcomeKind k);

struct AuxOutcome {
  OutcomeKind kind = OutcomeKind::Ambiguous;
  Vector direction;  ///< Infeasible / Reduce
  Vector slack;      ///< PPSHolds: s' = c - A^T y
  Vector y;
  double t = 0, cx = 0, threshold = 0;
  AuxSolution raw;
};

AuxOutcome interpret(const AuxPair& aux, const AuxSolution& sol, double tol);

/// Aux solution from a reducing direction: (alpha d, 0, -alpha <c,d>) with alpha = 1 / (<e,d> - <c,d>).
AuxSolution direction_solution(const AuxPair& aux, const Eigen::Ref<const Vector>& d);

}  // namespace conefract
