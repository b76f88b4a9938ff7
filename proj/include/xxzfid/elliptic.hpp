#pragma once

// Elliptic modulus and dual modulus as nome products, the nome duality
// x = e^{-eps} <-> x~ = e^{-pi^2/eps}, and the XXZ correlation length.
//
//   k(z)  = 4 z^{1/2} (-z^2; z^2)^4 / (-z; z^2)^4
//   k'(z) = (z; z^2)^4 / (-z; z^2)^4
//   1/xi  = -1/2 ln k(x^2) = atanh k'(x),   k'(x) = k(x~)
//
// Everything is carried in log space: for eps below ~1e-2 both k'(x) and
// 1/xi are far outside the double exponent range.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "xxzfid/errors.hpp"
#include "xxzfid/numeric.hpp"
#include "xxzfid/qseries.hpp"

namespace xxzfid {

/// An anisotropy point. eps is the primary coordinate; x = e^{-eps},
/// delta = -(x + 1/x)/2 = -cosh(eps), x_dual = e^{-pi^2/eps}.
/// x_dual (and x, for very large eps) may underflow to zero; ln_x_dual is
/// always exact.
template <RealNumber Real>
struct ModelPoint {
  Real x{0};
  Real eps{0};
  Real delta{0};
  Real x_dual{0};
  Real ln_x_dual{0};

  static ModelPoint from_eps(const Real& eps) {
    using std::cosh;
    using std::exp;
    if (!(eps > Real(0)) || !is_finite(eps))
      throw DomainError("eps must be positive and finite, got " + std::to_string(to_double(eps)));
    ModelPoint p;
    p.eps = eps;
    p.x = exp(-eps);
    p.delta = -cosh(eps);
    p.ln_x_dual = -pi<Real>() * pi<Real>() / eps;
    p.x_dual = exp(p.ln_x_dual);
    return p;
  }

  static ModelPoint from_x(const Real& x) {
    using std::log;
    if (!(x > Real(0) && x < Real(1)))
      throw DomainError("x must lie in (0,1), got " + std::to_string(to_double(x)));
    ModelPoint p = from_eps(-log(x));
    p.x = x;
    return p;
  }
};

template <RealNumber Real>
ModelPoint<Real> dual_point(const ModelPoint<Real>& p) {
  return ModelPoint<Real>::from_eps(pi<Real>() * pi<Real>() / p.eps);
}

template <RealNumber Real>
struct EllipticModuli {
  Real k{0};
  Real kprime{0};
};

namespace detail {

template <RealNumber Real>
struct LogModulus {
  Real value{0};
  double error = 0.0;  // absolute error estimate of value
};

template <RealNumber Real>
LogModulus<Real> log_modulus_k_with_error(const Real& ln_z, const Tolerance& tol) {
  using std::abs;
  using std::exp;
  using std::log;
  tol.validate<Real>();
  const Real z = exp(ln_z);
  const Real z2 = z * z;
  const std::vector<Real> base{z2};
  const Real even = log_qproduct_series(-z2, base, tol);
  const Real odd = log_qproduct_series(-z, base, tol);
  LogModulus<Real> r;
  r.value = log(Real(4)) + ln_z / 2 + 4 * even - 4 * odd;
  r.error = 4 * (tol.rel_tol + machine_epsilon<Real>()) *
                (std::max(1.0, to_double(abs(even))) + std::max(1.0, to_double(abs(odd)))) +
            machine_epsilon<Real>() * to_double(abs(ln_z));
  return r;
}

}  // namespace detail

/// ln k(z) given ln z. Works for nomes that underflow.
template <RealNumber Real>
Real log_modulus_k(const Real& ln_z, const Tolerance& tol = default_series_tolerance<Real>()) {
  return detail::log_modulus_k_with_error(ln_z, tol).value;
}

/// ln k'(z) given ln z.
template <RealNumber Real>
Real log_modulus_kprime(const Real& ln_z, const Tolerance& tol = default_series_tolerance<Real>()) {
  using std::exp;
  tol.validate<Real>();
  const Real z = exp(ln_z);
  const std::vector<Real> base{z * z};
  return 4 * detail::log_qproduct_series(z, base, tol) -
         4 * detail::log_qproduct_series(-z, base, tol);
}

template <RealNumber Real>
Real modulus_k(const Real& z, const Tolerance& tol = default_series_tolerance<Real>()) {
  using std::exp;
  using std::log;
  if (!(z > Real(0) && z < Real(1))) throw DomainError("nome must lie in (0,1)");
  return exp(log_modulus_k(log(z), tol));
}

template <RealNumber Real>
Real modulus_kprime(const Real& z, const Tolerance& tol = default_series_tolerance<Real>()) {
  using std::exp;
  using std::log;
  if (!(z > Real(0) && z < Real(1))) throw DomainError("nome must lie in (0,1)");
  return exp(log_modulus_kprime(log(z), tol));
}

template <RealNumber Real>
EllipticModuli<Real> moduli(const Real& z, const Tolerance& tol = default_series_tolerance<Real>()) {
  return {modulus_k(z, tol), modulus_kprime(z, tol)};
}

enum class CorrelationBranch { direct, dual };

template <RealNumber Real>
struct CorrelationLength {
  Real xi{0};     // may overflow to +inf; ln_xi is authoritative
  Real ln_xi{0};
  CorrelationBranch branch = CorrelationBranch::direct;
};

/// 1/xi = -1/2 ln k(x^2), evaluated at the nome x^2.
template <RealNumber Real>
CorrelationLength<Real> correlation_length_direct(
    const ModelPoint<Real>& p, const Tolerance& tol = default_series_tolerance<Real>()) {
  using std::exp;
  using std::log;
  const auto ln_k = detail::log_modulus_k_with_error(Real(-2) * p.eps, tol);
  if (!is_finite(ln_k.value)) throw Underflow("k(x^2) rounds to zero");
  const Real inverse = -ln_k.value / 2;
  // Near x = 1, ln k(x^2) is a tiny difference of O(1/eps) sums.
  if (!(to_double(inverse) > 100.0 * ln_k.error))
    throw Underflow("1 - k(x^2) is below working precision; use the dual branch near x = 1");
  CorrelationLength<Real> r;
  r.branch = CorrelationBranch::direct;
  r.ln_xi = -log(inverse);
  r.xi = Real(1) / inverse;
  return r;
}

/// 1/xi = atanh k'(x) with k'(x) = k(x~): fast for x near 1.
template <RealNumber Real>
CorrelationLength<Real> correlation_length_dual(
    const ModelPoint<Real>& p, const Tolerance& tol = default_series_tolerance<Real>()) {
  using std::atanh;
  using std::exp;
  using std::log;
  const Real ln_kprime = log_modulus_k(p.ln_x_dual, tol);
  const Real kprime = exp(ln_kprime);
  if (!(kprime < Real(1))) throw DomainError("k'(x) >= 1: point too far from x = 1");
  Real ln_atanh = ln_kprime;
  if (kprime > Real(0)) ln_atanh += log(atanh(kprime) / kprime);
  CorrelationLength<Real> r;
  r.branch = CorrelationBranch::dual;
  r.ln_xi = -ln_atanh;
  r.xi = exp(r.ln_xi);
  return r;
}

inline constexpr double kCorrelationBranchSwitch = 0.7;

template <RealNumber Real>
CorrelationLength<Real> correlation_length(
    const ModelPoint<Real>& p, const Tolerance& tol = default_series_tolerance<Real>()) {
  if (p.x <= Real(kCorrelationBranchSwitch)) return correlation_length_direct(p, tol);
  return correlation_length_dual(p, tol);
}

}  // namespace xxzfid
