#pragma once

#include "conefract/aux.hpp"
#include "conefract/io.hpp"
#include "conefract/solvers/ipm.hpp"

#include <boost/multiprecision/gmp.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace conefract {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;

/// Double -> rational: |v| < 1e-12 -> 0, small continued-fraction p/q (q <= 1e6) within 1e-13 relative,
/// otherwise the exact binary value.
Rational to_rational(double v);

struct FinderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solves aux pairs. Instances are stateful and single-threaded.
class Finder {
public:
  virtual ~Finder() = default;
  virtual AuxSolution solve(const AuxPair& aux) = 0;
  /// Tighter tolerances for a retry; false if nothing to tighten.
  virtual bool tighten() { return false; }
  virtual std::string name() const = 0;
  virtual bool exact() const { return false; }
};

class NumericFinder : public Finder {
public:
  explicit NumericFinder(IpmSettings s = IpmSettings::tight()) : settings_(s) { settings_.validate(); }
  AuxSolution solve(const AuxPair& aux) override;
  bool tighten() override;
  std::string name() const override { return "hsd"; }
  const IpmResult& last() const { return last_; }
  const IpmSettings& settings() const { return settings_; }

private:
  IpmSettings settings_;
  IpmResult last_;
};

/// Map a reduced-coordinate IPM solution of the aux LP back to ambient space.
AuxSolution lift_aux_solution(const AuxPair& aux, const IpmResult& r);

struct ExactLpInfo {
  bool strict = false;
  int pivots = 0;
  Index rows = 0, cols = 0;
};

/// Exact rational solve of a polyhedral pair with strictly complementary output.
/// Formulated over ambient coordinates: x in (F-hat)*, relaxed blocks contribute x_j perp span F_j.
class ExactFinder : public Finder {
public:
  explicit ExactFinder(bool strict = true) : strict_(strict) {}
  AuxSolution solve(const AuxPair& aux) override;
  std::string name() const override { return "exact"; }
  bool exact() const override { return true; }
  const ExactLpInfo& last() const { return info_; }

private:
  bool strict_;
  ExactLpInfo info_;
};

struct OracleScript {
  std::vector<Vector> directions;  ///< ambient
  std::optional<Vector> witness_y;
};
OracleScript oracle_script_from_json(const Json& j, Index n);
Json oracle_script_to_json(const OracleScript& s);

/// Replays scripted directions; when exhausted returns a PPS sentinel built from witness_y.
class OracleFinder : public Finder {
public:
  explicit OracleFinder(OracleScript s) : script_(std::move(s)) {}
  AuxSolution solve(const AuxPair& aux) override;
  std::string name() const override { return "oracle"; }
  bool exact() const override { return true; }
  std::size_t cursor() const { return cursor_; }

private:
  OracleScript script_;
  std::size_t cursor_ = 0;
};

}  // namespace conefract
