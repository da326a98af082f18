#pragma once

#include "conefract/aux.hpp"
#include "conefract/solvers/finders.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace conefract {

struct FraOptions {
  double tol = 1e-8;          ///< classification / face tolerance
  bool exact_phase2 = true;   ///< phase 2 through the exact finder when phase 1 used an exact one
  bool classify_weak = true;  ///< run the weak-infeasibility analyzer on non-K* infeasible exits
  bool snap_directions = true;  ///< try rational rounding of numeric directions (see snap_direction)
  IpmSettings ipm = IpmSettings::tight();  ///< for internal numeric solves (analyzer, phase 2 fallback)
};

struct StepLog {
  std::string phase;
  OutcomeKind kind = OutcomeKind::Ambiguous;
  double t = 0, cx = 0, threshold = 0;
  Index dim_before = 0, dim_after = 0;
  bool retried = false;
};

struct FraRun {
  ReductionCertificate cert;
  std::vector<StepLog> log;
  std::optional<Vector> y_prime, y_hat;
  double beta = 0;  ///< phase 2 weight on s'; negative when the combination extrapolates past s~
};

/// Driver failure carrying the partial run.
struct FraError : std::runtime_error {
  FraRun partial;
  FraError(const std::string& msg, FraRun run) : std::runtime_error(msg), partial(std::move(run)) {}
};

/// Rounds a numeric reducing direction to small rationals (PSD blocks in matrix entries, so the
/// sqrt(2) svec factor is kept) within `radius` after scaling to unit max-entry. Returned only if
/// the rounded vector is a reducing direction at tolerance 1e-10, keeps the sign class of <c,d>
/// (as judged at `step_tol`), and shrinks F.
std::optional<Vector> snap_direction(const ConicLP& prob, const FaceDescriptor& F, const Eigen::Ref<const Vector>& d,
                                     double radius, double step_tol);

int sum_dist_poly(const ConeProduct& K);
/// l_K of a product: 1 + sum (l_i - 1).
int chain_length(const ConeProduct& K);

FraRun fra_poly_phase1(const ConicLP& prob, Finder& finder, const FraOptions& opt = {});
/// Requires a phase-1 run that ended PPSRestored. A numeric `finder` (or exact_phase2 off) solves phase 2 itself.
FraRun fra_poly_phase2(const ConicLP& prob, const FraRun& phase1, Finder* finder, const FraOptions& opt = {});
FraRun fra_poly(const ConicLP& prob, Finder& finder, const FraOptions& opt = {});
FraRun generic_fra(const ConicLP& prob, Finder& finder, const FraOptions& opt = {});

struct ShortcutResult {
  FaceDescriptor face;  ///< F cap {x*}^perp
  Vector direction;
  Vector slack;  ///< c - A^T(y3 / y1), in ri of face
  Vector y;
  double t_margin = 0, w_margin = 0, ri_margin = 0;
};

/// One-step minimal face from a strictly complementary aux solution with w* = 0, if the checks pass.
std::optional<ShortcutResult> strict_comp_shortcut(const AuxPair& aux, const AuxSolution& sol, double tol);
/// Generic pair on the full cone, exact solve, then the shortcut. Certificate has one direction or none.
FraRun shortcut_fra(const ConicLP& prob, const FraOptions& opt = {});

struct BlockBound {
  ConeBlock block;
  int chain = 0;
  int dist_poly = 0;
};

struct BoundsReport {
  std::vector<BlockBound> blocks;
  int classic = 0;  ///< FRA column
  int poly = 0;     ///< FRA-Poly column
  std::string row;  ///< "single", "product", "soc-psd", "dnn"
  Index dnn_side = 0;
  std::optional<int> steps;
  bool within_poly() const { return !steps || *steps <= poly; }
};

BoundsReport bounds_report(const ConicLP& prob, std::optional<int> steps = std::nullopt);
BoundsReport bounds_report(const ConeProduct& K, const std::optional<ConeProduct>& intersection,
                           std::optional<int> steps = std::nullopt);

struct WeakInfeasibilityReport {
  bool strongly_infeasible = false;
  std::optional<Vector> certificate;  ///< d in K* cap ker A, <c,d> < 0
  std::vector<Vector> directions;     ///< d_i in range A^T cap K
  FaceDescriptor terminal;            ///< K cap d_1^perp cap ...
  Vector y_hat, s_hat;
  Matrix basis;  ///< orthonormal basis of L' = span d_i
  Index dim = 0;
  int bound = 0;  ///< sum distP of the dual blocks
  bool s_hat_in_dual_face = false;
  bool no_certificate_exact = false;  ///< generator check, only when terminal is polyhedral
  bool terminal_polyhedral = false;
  std::string no_certificate_aux;     ///< aux-pair outcome on (V', K)
};

WeakInfeasibilityReport analyze_not_strongly_infeasible(const ConicLP& prob, const FraOptions& opt = {});

/// Both sides of the partial polyhedral alternative for L = range A^T, with K^1 the nonpolyhedral
/// blocks of K and K^2 the polyhedral ones. Each side is decided on its own and carries a witness.
struct AlternativeReport {
  bool side_a = false;       ///< x in K* cap ker A with x^1 != 0
  bool side_b = false;       ///< s in L with s^1 in int K^1 and s^2 in K^2
  std::optional<Vector> x;   ///< side A witness (aux pair with c = 0)
  std::optional<Vector> s;   ///< side B witness (margin-maximising solve)
  double margin = 0;         ///< interior margin of s^1 after normalisation
  std::string aux_outcome;
};

AlternativeReport partial_alternative(const Matrix& A, const ConeProduct& K, double tol,
                                      const IpmSettings& ipm = IpmSettings::tight());

}  // namespace conefract
