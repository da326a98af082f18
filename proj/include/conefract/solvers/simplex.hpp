#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace conefract {

template <typename S>
using MatrixS = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VectorS = Eigen::Matrix<S, Eigen::Dynamic, 1>;

/// Zero test: exact for rationals, absolute 1e-11 for doubles.
template <typename S>
struct SimplexTraits {
  static bool zero(const S& v) { return v == S(0); }
  static bool positive(const S& v) { return v > S(0); }
  static bool negative(const S& v) { return v < S(0); }
};
template <>
struct SimplexTraits<double> {
  static bool zero(double v) { return std::abs(v) <= 1e-11; }
  static bool positive(double v) { return v > 1e-11; }
  static bool negative(double v) { return v < -1e-11; }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <typename S>
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  VectorS<S> x;  ///< primal, x >= 0
  VectorS<S> y;  ///< dual, A^T y <= c
  S value = S(0);
  int pivots = 0;
};

namespace detail {

template <typename S>
class Tableau {
public:
  using T = SimplexTraits<S>;
  MatrixS<S> tab;  // rows 0..m-1 constraints, row m objective; last column rhs
  std::vector<Eigen::Index> basis;
  int pivots = 0;

  Eigen::Index rows() const { return tab.rows() - 1; }
  Eigen::Index rhs() const { return tab.cols() - 1; }

  void pivot(Eigen::Index r, Eigen::Index col) {
    ++pivots;
    const S p = tab(r, col);
    std::vector<Eigen::Index> nz;
    for (Eigen::Index j = 0; j < tab.cols(); ++j)
      if (!(tab(r, j) == S(0))) {
        tab(r, j) /= p;
        nz.push_back(j);
      }
    for (Eigen::Index i = 0; i < tab.rows(); ++i) {
      if (i == r) continue;
      const S f = tab(i, col);
      if (f == S(0)) continue;
      for (Eigen::Index j : nz) tab(i, j) -= f * tab(r, j);
      tab(i, col) = S(0);
    }
    basis[std::size_t(r)] = col;
  }

  /// Bland's rule over columns [0, ncols). Returns false when unbounded.
  bool optimize(Eigen::Index ncols) {
    const Eigen::Index m = rows();
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < ncols; ++j)
        if (T::negative(tab(m, j))) {
          enter = j;
          break;
        }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      S best = S(0);
      for (Eigen::Index i = 0; i < m; ++i) {
        if (!T::positive(tab(i, enter))) continue;
        S ratio = tab(i, rhs()) / tab(i, enter);
        if (leave < 0 || ratio < best || (ratio == best && basis[std::size_t(i)] < basis[std::size_t(leave)])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace detail

/// min c^T x s.t. A x = b, x >= 0. Two-phase dense tableau simplex with Bland's rule.
template <typename S>
LpResult<S> simplex_solve(const MatrixS<S>& A, const VectorS<S>& b, const VectorS<S>& c) {
  using Idx = Eigen::Index;
  using Tr = SimplexTraits<S>;
  const Idx m = A.rows(), n = A.cols();
  if (b.size() != m || c.size() != n) throw std::invalid_argument("simplex: dimension mismatch");
  LpResult<S> res;
  detail::Tableau<S> tb;
  tb.tab = MatrixS<S>::Zero(m + 1, n + m + 1);
  std::vector<bool> flipped(std::size_t(m), false);
  for (Idx i = 0; i < m; ++i) {
    const bool f = Tr::negative(b(i));
    flipped[std::size_t(i)] = f;
    for (Idx j = 0; j < n; ++j) tb.tab(i, j) = f ? S(-A(i, j)) : A(i, j);
    tb.tab(i, n + i) = S(1);
    tb.tab(i, n + m) = f ? S(-b(i)) : b(i);
  }
  tb.basis.resize(std::size_t(m));
  for (Idx i = 0; i < m; ++i) tb.basis[std::size_t(i)] = n + i;
  // phase 1: minimise the sum of artificials
  for (Idx j = 0; j < n; ++j) {
    S s = S(0);
    for (Idx i = 0; i < m; ++i) s += tb.tab(i, j);
    tb.tab(m, j) = -s;
  }
  {
    S s = S(0);
    for (Idx i = 0; i < m; ++i) s += tb.tab(i, n + m);
    tb.tab(m, n + m) = -s;
  }
  tb.optimize(n);
  if (Tr::negative(tb.tab(m, n + m))) {
    res.status = LpStatus::Infeasible;
    res.pivots = tb.pivots;
    return res;
  }
  // drive artificials out of the basis where possible
  for (Idx i = 0; i < m; ++i) {
    if (tb.basis[std::size_t(i)] < n) continue;
    for (Idx j = 0; j < n; ++j)
      if (!Tr::zero(tb.tab(i, j))) {
        tb.pivot(i, j);
        break;
      }
  }
  // phase 2 objective row
  for (Idx j = 0; j < n + m + 1; ++j) tb.tab(m, j) = j < n ? c(j) : S(0);
  for (Idx i = 0; i < m; ++i) {
    Idx bj = tb.basis[std::size_t(i)];
    S cb = bj < n ? c(bj) : S(0);
    if (cb == S(0)) continue;
    for (Idx j = 0; j < n + m + 1; ++j) tb.tab(m, j) -= cb * tb.tab(i, j);
  }
  if (!tb.optimize(n)) {
    res.status = LpStatus::Unbounded;
    res.pivots = tb.pivots;
    return res;
  }
  res.status = LpStatus::Optimal;
  res.x = VectorS<S>::Zero(n);
  for (Idx i = 0; i < m; ++i)
    if (tb.basis[std::size_t(i)] < n) res.x(tb.basis[std::size_t(i)]) = tb.tab(i, n + m);
  res.y = VectorS<S>(m);
  for (Idx i = 0; i < m; ++i) {
    S yi = -tb.tab(m, n + i);
    res.y(i) = flipped[std::size_t(i)] ? S(-yi) : yi;
  }
  res.value = S(0);
  for (Idx j = 0; j < n; ++j) res.value += c(j) * res.x(j);
  res.pivots = tb.pivots;
  return res;
}

template <typename S>
struct StrictLpResult {
  LpResult<S> lp;
  VectorS<S> x, y, s;  ///< s = c - A^T y
  bool strict = false; ///< x + s > 0 componentwise and x o s = 0
};

namespace detail {

/// Adds u_j <= v_j, u_j <= 1 for j in J on top of rows `base` (columns of v first) and
/// returns a maximiser of sum u.
template <typename S>
VectorS<S> max_capped_support(const MatrixS<S>& base, const VectorS<S>& rhs, Eigen::Index nv, Eigen::Index nbase,
                              const std::vector<Eigen::Index>& J, int& pivots) {
  using Idx = Eigen::Index;
  const Idx k = Idx(J.size());
  const Idx r0 = base.rows();
  // variables: base (nbase) | u (k) | a (k) | bslack (k)
  MatrixS<S> A = MatrixS<S>::Zero(r0 + 2 * k, nbase + 3 * k);
  VectorS<S> b = VectorS<S>::Zero(r0 + 2 * k);
  VectorS<S> c = VectorS<S>::Zero(nbase + 3 * k);
  A.topLeftCorner(r0, nbase) = base;
  b.head(r0) = rhs;
  for (Idx q = 0; q < k; ++q) {
    A(r0 + q, J[std::size_t(q)]) = S(1);
    A(r0 + q, nbase + q) = S(-1);
    A(r0 + q, nbase + k + q) = S(-1);
    A(r0 + k + q, nbase + q) = S(1);
    A(r0 + k + q, nbase + 2 * k + q) = S(1);
    b(r0 + k + q) = S(1);
    c(nbase + q) = S(-1);
  }
  (void)nv;
  LpResult<S> r = simplex_solve<S>(A, b, c);
  pivots += r.pivots;
  if (r.status != LpStatus::Optimal) throw std::runtime_error("support maximisation LP failed");
  return r.x.head(nbase);
}

}  // namespace detail

/// Optimal pair with maximal complementary supports (Goldman-Tucker partition).
template <typename S>
StrictLpResult<S> simplex_solve_strict(const MatrixS<S>& A, const VectorS<S>& b, const VectorS<S>& c) {
  using Idx = Eigen::Index;
  using Tr = SimplexTraits<S>;
  StrictLpResult<S> out;
  out.lp = simplex_solve<S>(A, b, c);
  if (out.lp.status != LpStatus::Optimal) return out;
  const Idx m = A.rows(), n = A.cols();
  const S v = out.lp.value;
  int piv = 0;

  // primal: cone {(x, tau) : A x = tau b, c^T x = tau v, x, tau >= 0}
  VectorS<S> x = out.lp.x;
  std::vector<Idx> J;
  for (Idx j = 0; j < n; ++j)
    if (!Tr::positive(x(j))) J.push_back(j);
  if (!J.empty()) {
    MatrixS<S> base = MatrixS<S>::Zero(m + 1, n + 1);
    base.topLeftCorner(m, n) = A;
    base.block(0, n, m, 1) = -b;
    base.block(m, 0, 1, n) = c.transpose();
    base(m, n) = -v;
    VectorS<S> z = detail::max_capped_support<S>(base, VectorS<S>::Zero(m + 1), n, n + 1, J, piv);
    S tau = z(n);
    x = (x + z.head(n)) / (tau + S(1));
  }

  // dual: cone {(y, s, tau) : A^T y + s = tau c, b^T y = tau v, s, tau >= 0}, y = y+ - y-
  VectorS<S> y = out.lp.y;
  VectorS<S> s = c - A.transpose() * y;
  std::vector<Idx> Js;
  for (Idx j = 0; j < n; ++j)
    if (!Tr::positive(x(j)) && !Tr::positive(s(j))) Js.push_back(j);
  if (!Js.empty()) {
    // columns: s (n) | y+ (m) | y- (m) | tau
    const Idx nb = n + 2 * m + 1;
    MatrixS<S> base = MatrixS<S>::Zero(n + 1, nb);
    base.topLeftCorner(n, n) = MatrixS<S>::Identity(n, n);
    base.block(0, n, n, m) = A.transpose();
    base.block(0, n + m, n, m) = -A.transpose();
    base.block(0, n + 2 * m, n, 1) = -c;
    base.block(n, n, 1, m) = b.transpose();
    base.block(n, n + m, 1, m) = -b.transpose();
    base(n, n + 2 * m) = -v;
    VectorS<S> z = detail::max_capped_support<S>(base, VectorS<S>::Zero(n + 1), n, nb, Js, piv);
    S tau = z(n + 2 * m);
    VectorS<S> yz = z.segment(n, m) - z.segment(n + m, m);
    y = (y + yz) / (tau + S(1));
    s = c - A.transpose() * y;
  }
  out.x = x;
  out.y = y;
  out.s = s;
  out.lp.pivots += piv;
  bool strict = true;
  for (Idx j = 0; j < n; ++j) {
    const bool xp = Tr::positive(x(j)), sp = Tr::positive(s(j));
    if (xp == sp) strict = false;
    if (Tr::negative(x(j)) || Tr::negative(s(j))) strict = false;
  }
  out.strict = strict;
  return out;
}

}  // namespace conefract
