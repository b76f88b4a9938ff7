#pragma once

// Multi-base q-Pochhammer products
//
//   (z; a_1, ..., a_N)_inf = prod_{n_1,...,n_N >= 0} (1 - z a_1^{n_1} ... a_N^{n_N})
//
// evaluated by two independent strategies:
//
//  * qproduct_direct enumerates the index lattice and multiplies factors.
//    Subtrees are pruned once their total weight |z| a^n prod 1/(1-a_i) falls
//    under a cutoff; the pruned log-mass is accumulated as a rigorous bound
//    and the cutoff is tightened until that bound is below rel_tol.
//
//  * qproduct_log sums the power series
//
//      ln (z; a_1..a_N)_inf = - sum_{m>=1} z^m / (m prod_i (1 - a_i^m)),
//
//    valid for |z| < 1. Successive term ratios are bounded by |z|, so the
//    tail after term t_m is at most |t_m| |z| / (1 - |z|).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "xxzfid/errors.hpp"
#include "xxzfid/numeric.hpp"

namespace xxzfid {

template <RealNumber Real>
struct QProductSpec {
  Real z{0};
  std::vector<Real> bases;

  void validate() const {
    if (bases.empty()) throw InvalidSpec("q-product needs at least one base");
    for (const Real& a : bases) {
      if (!(a > Real(0) && a < Real(1)))
        throw InvalidSpec("q-product base " + std::to_string(to_double(a)) +
                          " is outside (0,1)");
    }
    if (!is_finite(z)) throw InvalidSpec("q-product argument is not finite");
  }
};

template <RealNumber Real>
struct QProductEvaluation {
  Real value{1};
  double error_bound = 0.0;  // bound on |ln(exact) - ln(value)| from truncation
  std::size_t factors = 0;
};

namespace detail {

template <RealNumber Real>
class LatticeProduct {
 public:
  LatticeProduct(const std::vector<Real>& bases, const Real& z, std::size_t max_terms)
      : bases_(bases), z_(z), max_terms_(max_terms), suffix_mass_(bases.size() + 1, 1.0) {
    for (std::size_t d = bases.size(); d-- > 0;)
      suffix_mass_[d] = suffix_mass_[d + 1] / (1.0 - to_double(bases[d]));
  }

  QProductEvaluation<Real> run(double cutoff) {
    cutoff_ = cutoff;
    result_ = {};
    visit(0, z_);
    return result_;
  }

 private:
  // Returns false once the product has hit an exact zero.
  bool visit(std::size_t depth, Real weight) {
    using std::abs;
    const bool leaf = depth + 1 == bases_.size();
    for (;;) {
      const double w = to_double(abs(weight));
      const double mass = w * suffix_mass_[depth];
      if (mass <= cutoff_) {
        result_.error_bound += mass / (1.0 - w);
        return true;
      }
      if (leaf) {
        const Real factor = Real(1) - weight;
        if (factor == Real(0)) {
          result_.value = Real(0);
          result_.error_bound = 0.0;
          return false;
        }
        result_.value *= factor;
        if (++result_.factors > max_terms_)
          throw NonConvergent("direct q-product exceeded " + std::to_string(max_terms_) +
                              " factors");
      } else if (!visit(depth + 1, weight)) {
        return false;
      }
      weight *= bases_[depth];
    }
  }

  const std::vector<Real>& bases_;
  Real z_;
  std::size_t max_terms_;
  std::vector<double> suffix_mass_;
  double cutoff_ = 0.0;
  QProductEvaluation<Real> result_;
};

// Series kernel without base validation: bases may be 0 (an underflowed
// nome), in which case the corresponding factor (1 - a^m) is 1.
template <RealNumber Real>
Real log_qproduct_series(const Real& z, const std::vector<Real>& bases, const Tolerance& tol) {
  using std::abs;
  if (z == Real(0)) return Real(0);
  const Real abs_z = abs(z);
  if (!(abs_z < Real(1)))
    throw DomainError("log-series q-product requires |z| < 1, got z = " +
                      std::to_string(to_double(z)));
  const double tail_factor = to_double(abs_z / (Real(1) - abs_z));

  std::vector<Real> base_power(bases);
  Real z_power = z;
  Real sum(0);
  for (std::size_t m = 1; m <= tol.max_terms; ++m) {
    Real denom(m);
    for (const Real& p : base_power) denom *= Real(1) - p;
    const Real term = z_power / denom;
    sum -= term;
    const double scale = std::max(to_double(abs(sum)), 1.0);
    if (to_double(abs(term)) * tail_factor < tol.rel_tol * scale) return sum;
    z_power *= z;
    for (std::size_t i = 0; i < bases.size(); ++i) base_power[i] *= bases[i];
  }
  throw NonConvergent("log-series q-product exceeded " + std::to_string(tol.max_terms) +
                      " terms");
}

}  // namespace detail

/// Direct lattice product with its truncation bound.
template <RealNumber Real>
QProductEvaluation<Real> qproduct_direct_evaluate(
    const QProductSpec<Real>& spec, const Tolerance& tol = default_direct_tolerance<Real>()) {
  spec.validate();
  tol.validate<Real>();
  using std::abs;
  if (abs(spec.z) > Real(1))
    throw DomainError("direct q-product supports |z| <= 1 only");

  detail::LatticeProduct<Real> lattice(spec.bases, spec.z, tol.max_terms);
  double cutoff = tol.rel_tol / 10.0;
  for (int pass = 0; pass < 8; ++pass) {
    auto result = lattice.run(cutoff);
    if (result.error_bound <= tol.rel_tol) return result;
    cutoff *= std::max(0.5 * tol.rel_tol / result.error_bound, 1e-6);
  }
  throw NonConvergent("direct q-product truncation bound did not reach rel_tol");
}

template <RealNumber Real>
Real qproduct_direct(const QProductSpec<Real>& spec,
                     const Tolerance& tol = default_direct_tolerance<Real>()) {
  return qproduct_direct_evaluate(spec, tol).value;
}

/// ln of the product via its power series in z; requires |z| < 1.
template <RealNumber Real>
Real qproduct_log(const QProductSpec<Real>& spec,
                  const Tolerance& tol = default_series_tolerance<Real>()) {
  spec.validate();
  tol.validate<Real>();
  return detail::log_qproduct_series(spec.z, spec.bases, tol);
}

struct QcalcResiduals {
  double doubling = 0.0;  // (z;x^2b,x^c)(zx^b;x^2b,x^c) = (z;x^b,x^c)
  double negation = 0.0;  // (z;x^b,x^c)(-z;x^b,x^c) = (z^2;x^2b,x^2c)
};

namespace detail {

template <RealNumber Real>
double relative_gap(const Real& lhs, const Real& rhs) {
  using std::abs;
  if (lhs == rhs) return 0.0;
  return to_double(abs(lhs - rhs) / abs(rhs));
}

template <RealNumber Real>
double log_gap(const Real& ln_lhs, const Real& ln_rhs) {
  using std::abs;
  using std::expm1;
  return to_double(abs(expm1(ln_lhs - ln_rhs)));
}

}  // namespace detail

/// Residuals of the base-doubling and argument-negation identities for
/// two-base products, maximised over the direct and log-series routes.
template <RealNumber Real>
QcalcResiduals verify_qcalc_identities(const Real& x, const Real& z, int b, int c,
                                       const Tolerance& tol = default_direct_tolerance<Real>()) {
  using std::abs;
  using std::pow;
  if (!(x > Real(0) && x < Real(1))) throw DomainError("x must lie in (0,1)");
  if (b < 1 || c < 1) throw DomainError("identity exponents b, c must be positive");
  if (!(abs(z) < Real(1))) throw DomainError("identity argument requires |z| < 1");

  const Real xb = pow(x, b), xc = pow(x, c), x2b = pow(x, 2 * b), x2c = pow(x, 2 * c);
  const QProductSpec<Real> d_lhs1{z, {x2b, xc}}, d_lhs2{z * xb, {x2b, xc}}, d_rhs{z, {xb, xc}};
  const QProductSpec<Real> n_lhs2{-z, {xb, xc}}, n_rhs{z * z, {x2b, x2c}};

  QcalcResiduals r;
  {
    const Real p1 = qproduct_direct(d_lhs1, tol), p2 = qproduct_direct(d_lhs2, tol);
    const Real p3 = qproduct_direct(d_rhs, tol);
    const Real p4 = qproduct_direct(n_lhs2, tol), p5 = qproduct_direct(n_rhs, tol);
    r.doubling = detail::relative_gap(p1 * p2, p3);
    r.negation = detail::relative_gap(p3 * p4, p5);
  }
  {
    const Real l1 = qproduct_log(d_lhs1, tol), l2 = qproduct_log(d_lhs2, tol);
    const Real l3 = qproduct_log(d_rhs, tol);
    const Real l4 = qproduct_log(n_lhs2, tol), l5 = qproduct_log(n_rhs, tol);
    r.doubling = std::max(r.doubling, detail::log_gap(l1 + l2, l3));
    r.negation = std::max(r.negation, detail::log_gap(l3 + l4, l5));
  }
  return r;
}

/// Relative residual of (-x^4; x^4, x^4) = (-1; x^4, x^4) / (2 (-x^4; x^4)).
/// The z = -1 product is only reachable by the direct route; the left side
/// is evaluated by the log series.
template <RealNumber Real>
double unit_argument_identity_residual(const Real& x,
                                       const Tolerance& tol = default_direct_tolerance<Real>()) {
  using std::log;
  if (!(x > Real(0) && x < Real(1))) throw DomainError("x must lie in (0,1)");
  const Real q = x * x * x * x;
  const Real lhs = qproduct_log(QProductSpec<Real>{-q, {q, q}}, tol);
  const Real unit = qproduct_direct(QProductSpec<Real>{Real(-1), {q, q}}, tol);
  const Real single = qproduct_direct(QProductSpec<Real>{-q, {q}}, tol);
  const Real rhs = log(unit) - log(Real(2) * single);
  return detail::log_gap(lhs, rhs);
}

}  // namespace xxzfid
