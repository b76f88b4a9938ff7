#pragma once

// Bipartite fidelity f of the infinite antiferromagnetic XXZ chain.
//
// Three algebraically equivalent routes are provided:
//
//   raw         f = (x^2;x^4) (x^6;x^8,x^8)^2 (x^10;x^8,x^8)^2
//                   / [(x^4;x^8,x^8)^2 (x^12;x^8,x^8)^2]
//                   * (x^2;x^4,x^8)^2 / (x^4;x^4,x^8)^2
//   simplified  f = (x^2;x^4) (-x^4;x^4,x^4)^2 / (-x^2;x^4,x^4)^2
//   modular     f = x^{1/4} x~^{1/16} (-x~;x~) / (x~^{1/2};x~) * g
//
// with the g-factor
//
//   g = (-1;x^4,x^4)(-x^4;x^4,x^4) / (-x^2;x^4,x^4)^2,
//   ln g = sum_{N>=1} (-1)^{N+1} / (N (1 + x^{2N})^2).
//
// raw is evaluated with direct lattice products, simplified and modular with
// log series, so the routes share no evaluation code beyond the primitives.
// All assembly happens in log space; f = exp(ln f) underflows in double
// precision once eps drops below ~8.7e-4, ln_f stays exact.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xxzfid/elliptic.hpp"
#include "xxzfid/errors.hpp"
#include "xxzfid/numeric.hpp"
#include "xxzfid/qseries.hpp"

namespace xxzfid {

enum class FidelityPath { raw, simplified, modular };

inline std::string_view to_string(FidelityPath path) {
  switch (path) {
    case FidelityPath::raw: return "raw";
    case FidelityPath::simplified: return "simplified";
    case FidelityPath::modular: return "modular";
  }
  return "unknown";
}

template <RealNumber Real>
struct FidelityResult {
  Real f{1};
  Real ln_f{0};
  FidelityPath path = FidelityPath::simplified;
  double est_rel_error = 0.0;
  std::optional<double> cross_check_discrepancy;
};

template <RealNumber Real>
struct GFactor {
  Real g{1};
  Real ln_g{0};
  std::size_t terms = 0;
};

namespace detail {

template <RealNumber Real>
FidelityResult<Real> make_fidelity(const Real& ln_f, FidelityPath path, double error) {
  using std::exp;
  FidelityResult<Real> r;
  r.ln_f = ln_f;
  r.f = exp(ln_f);
  r.path = path;
  r.est_rel_error =
      error + machine_epsilon<Real>() * std::max(1.0, std::abs(to_double(ln_f)));
  return r;
}

template <RealNumber Real>
Real series_term(const Real& z, std::vector<Real> bases, const Tolerance& tol,
                 double& error) {
  using std::abs;
  const Real v = qproduct_log(QProductSpec<Real>{z, std::move(bases)}, tol);
  error += tol.rel_tol * std::max(1.0, to_double(abs(v)));
  return v;
}

template <RealNumber Real>
Real direct_log_term(const Real& z, std::vector<Real> bases, const Tolerance& tol,
                     double& error) {
  using std::log;
  const auto e = qproduct_direct_evaluate(QProductSpec<Real>{z, std::move(bases)}, tol);
  error += std::max(e.error_bound, tol.rel_tol);
  return log(e.value);
}

}  // namespace detail

template <RealNumber Real>
FidelityResult<Real> fidelity_raw(const ModelPoint<Real>& p,
                                  const Tolerance& tol = default_direct_tolerance<Real>()) {
  using std::pow;
  const Real& x = p.x;
  const Real x2 = x * x, x4 = x2 * x2, x8 = x4 * x4;
  double err = 0.0;
  auto term = [&](const Real& z, std::vector<Real> bases) {
    return detail::direct_log_term(z, std::move(bases), tol, err);
  };
  const Real eight_pair =
      term(x4 * x2, {x8, x8}) + term(x8 * x2, {x8, x8}) - term(x4, {x8, x8}) -
      term(x8 * x4, {x8, x8});
  const Real mixed = term(x2, {x4, x8}) - term(x4, {x4, x8});
  const Real ln_f = term(x2, {x4}) + 2 * eight_pair + 2 * mixed;
  return detail::make_fidelity(ln_f, FidelityPath::raw, 2 * err);
}

template <RealNumber Real>
FidelityResult<Real> fidelity_simplified(const ModelPoint<Real>& p,
                                         const Tolerance& tol = default_series_tolerance<Real>()) {
  const Real& x = p.x;
  const Real x2 = x * x, x4 = x2 * x2;
  double err = 0.0;
  const Real ln_f = detail::series_term(x2, {x4}, tol, err) +
                    2 * detail::series_term(-x4, {x4, x4}, tol, err) -
                    2 * detail::series_term(-x2, {x4, x4}, tol, err);
  return detail::make_fidelity(ln_f, FidelityPath::simplified, 2 * err);
}

/// ln g from its alternating series.
///
/// The terms tend to (-1)^{N+1}/N, so the series is rewritten as
/// ln 2 - sum (-1)^{N+1} h(x^{2N}) / N with h(y) = y(2+y)/(1+y)^2, whose
/// terms decrease monotonically and geometrically. Summation stops at the
/// first M with |t_{M+1}| < rel_tol |S_M|, then runs on to 2M and checks
/// that the extra terms moved the sum by no more than the bound |t_{M+1}|.
template <RealNumber Real>
GFactor<Real> ln_g_series(const ModelPoint<Real>& p,
                          const Tolerance& tol = default_series_tolerance<Real>()) {
  using std::abs;
  using std::exp;
  tol.validate<Real>();
  const Real two_eps = 2 * p.eps;
  auto term = [&](std::size_t n) {
    const Real y = exp(-two_eps * Real(n));
    return y * (2 + y) / ((1 + y) * (1 + y) * Real(n));
  };

  Real sum = ln2<Real>();
  std::size_t n = 1;
  Real bound(0);
  for (;; ++n) {
    if (n > tol.max_terms)
      throw NonConvergent("ln g series exceeded " + std::to_string(tol.max_terms) + " terms");
    const Real t = term(n);
    if (abs(t) < Real(tol.rel_tol) * abs(sum)) {
      bound = t;
      break;
    }
    sum += (n % 2 == 1) ? -t : t;
  }
  const std::size_t settled = n - 1;
  const Real settled_sum = sum;
  const std::size_t last = std::max<std::size_t>(2 * settled, settled + 1);
  for (; n <= last; ++n) {
    const Real t = term(n);
    sum += (n % 2 == 1) ? -t : t;
  }
  const Real slack = Real(16 * machine_epsilon<Real>()) * abs(sum) * Real(settled + 1);
  if (abs(sum - settled_sum) > bound + slack)
    throw NonConvergent("ln g series failed the doubling stability check");

  GFactor<Real> g;
  g.ln_g = sum;
  g.g = exp(sum);
  g.terms = last;
  return g;
}

enum class ProductRoute { direct, series };

/// ln g from its defining product. The series route evaluates (-1;x^4,x^4)
/// through (-1;x^4,x^4) = 2 (-x^4;x^4) (-x^4;x^4,x^4).
template <RealNumber Real>
Real ln_g_product(const ModelPoint<Real>& p, ProductRoute route,
                  const Tolerance& tol = default_direct_tolerance<Real>()) {
  using std::log;
  const Real x2 = p.x * p.x, q = x2 * x2;
  using Spec = QProductSpec<Real>;
  if (route == ProductRoute::direct) {
    return log(qproduct_direct(Spec{Real(-1), {q, q}}, tol)) +
           log(qproduct_direct(Spec{-q, {q, q}}, tol)) -
           2 * log(qproduct_direct(Spec{-x2, {q, q}}, tol));
  }
  const Real shifted = qproduct_log(Spec{-q, {q, q}}, tol);
  const Real unit = ln2<Real>() + qproduct_log(Spec{-q, {q}}, tol) + shifted;
  return unit + shifted - 2 * qproduct_log(Spec{-x2, {q, q}}, tol);
}

template <RealNumber Real>
FidelityResult<Real> fidelity_modular(const ModelPoint<Real>& p,
                                      const Tolerance& tol = default_series_tolerance<Real>()) {
  using std::abs;
  using std::exp;
  double err = 0.0;
  const Real dual = p.x_dual;
  const Real dual_root = exp(p.ln_x_dual / 2);
  const std::vector<Real> base{dual};
  const Real ln_plus = detail::log_qproduct_series(-dual, base, tol);
  const Real ln_half = detail::log_qproduct_series(dual_root, base, tol);
  err += 2 * tol.rel_tol;
  const auto g = ln_g_series(p, tol);
  err += tol.rel_tol * std::max(1.0, to_double(abs(g.ln_g)));
  const Real ln_f = -p.eps / 4 + p.ln_x_dual / 16 + ln_plus - ln_half + g.ln_g;
  return detail::make_fidelity(ln_f, FidelityPath::modular, err);
}

/// Relative residual of x^{-b/48} (x^{b/2};x^b) = sqrt(2) x~^{1/(6b)} (-x~^{4/b};x~^{4/b}),
/// computed in log space.
template <RealNumber Real>
double short_theta_identity_residual(const Real& b, const ModelPoint<Real>& p,
                                     const Tolerance& tol = default_series_tolerance<Real>()) {
  using std::exp;
  if (!(b > Real(0))) throw DomainError("short-theta exponent b must be positive");
  const Real base = exp(-b * p.eps);
  const Real dual_base = exp(Real(4) * p.ln_x_dual / b);
  if (!(base > Real(0) && base < Real(1))) throw DomainError("x^b outside (0,1)");
  if (!(dual_base > Real(0) && dual_base < Real(1))) throw DomainError("x~^{4/b} outside (0,1)");

  const Real lhs = b * p.eps / 48 +
                   qproduct_log(QProductSpec<Real>{exp(-b * p.eps / 2), {base}}, tol);
  const Real rhs = ln2<Real>() / 2 + p.ln_x_dual / (6 * b) +
                   qproduct_log(QProductSpec<Real>{-dual_base, {dual_base}}, tol);
  return detail::log_gap(lhs, rhs);
}

/// Relative residual of f = (x^2;x^4) / (2 (-x^4;x^4)) * g against the
/// simplified route.
template <RealNumber Real>
double decomposition_residual(const ModelPoint<Real>& p,
                              const Tolerance& tol = default_series_tolerance<Real>()) {
  using std::log;
  const Real x2 = p.x * p.x, x4 = x2 * x2;
  const Real prefactor = qproduct_log(QProductSpec<Real>{x2, {x4}}, tol) - ln2<Real>() -
                         qproduct_log(QProductSpec<Real>{-x4, {x4}}, tol);
  const Real ln_f = prefactor + ln_g_series(p, tol).ln_g;
  return detail::log_gap(ln_f, fidelity_simplified(p, tol).ln_f);
}

inline constexpr double kFidelityPathSwitch = 0.7;
inline constexpr double kCrossCheckLow = 0.6;
inline constexpr double kCrossCheckHigh = 0.9;

/// Simplified route for x <= 0.7, modular above. With cross_check set and x in
/// [0.6, 0.9] the other route is evaluated too and the discrepancy is folded
/// into est_rel_error.
template <RealNumber Real>
FidelityResult<Real> fidelity(const ModelPoint<Real>& p,
                              const Tolerance& tol = default_series_tolerance<Real>(),
                              bool cross_check = false) {
  const bool low = p.x <= Real(kFidelityPathSwitch);
  auto result = low ? fidelity_simplified(p, tol) : fidelity_modular(p, tol);
  if (cross_check && p.x >= Real(kCrossCheckLow) && p.x <= Real(kCrossCheckHigh)) {
    const auto other = low ? fidelity_modular(p, tol) : fidelity_simplified(p, tol);
    const double gap = detail::log_gap(result.ln_f, other.ln_f);
    result.cross_check_discrepancy = gap;
    result.est_rel_error += gap;
  }
  return result;
}

}  // namespace xxzfid
