#pragma once

// Small-eps asymptotics of ln xi and -ln f, least-squares extraction of the
// expansion coefficients, and the ratio -ln f / ln xi against c/8.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "xxzfid/elliptic.hpp"
#include "xxzfid/fidelity.hpp"
#include "xxzfid/numeric.hpp"
#include "xxzfid/parallel.hpp"

namespace xxzfid {

/// Central charge of the UV theory of the antiferromagnetic XXZ chain.
inline constexpr double kXxzCentralCharge = 1.0;

constexpr double conjecture_target(double central_charge = kXxzCentralCharge) {
  return central_charge / 8.0;
}

/// ln xi ~ pi^2/(2 eps) - ln 4
template <RealNumber Real>
Real ln_xi_reference(const Real& eps) {
  using std::log;
  return pi<Real>() * pi<Real>() / (2 * eps) - log(Real(4));
}

/// -ln f ~ pi^2/(16 eps) - ln(2)/4
template <RealNumber Real>
Real minus_ln_f_reference(const Real& eps) {
  return pi<Real>() * pi<Real>() / (16 * eps) - ln2<Real>() / 4;
}

/// -ln f / ln xi from the modular fidelity route and the dual-branch
/// correlation length.
template <RealNumber Real>
Real conjecture_ratio(const ModelPoint<Real>& p,
                      const Tolerance& tol = default_series_tolerance<Real>()) {
  const auto f = fidelity_modular(p, tol);
  const auto xi = correlation_length_dual(p, tol);
  return -f.ln_f / xi.ln_xi;
}

struct Sample {
  double eps = 0.0;
  double y = 0.0;
};

/// y ~ A/eps + B + C eps
struct AsymptoticFit {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double max_residual = 0.0;
  std::size_t sample_count = 0;
};

using BasisFunction = std::function<double(double)>;

struct BasisFit {
  std::vector<double> coefficients;
  double max_residual = 0.0;
};

/// Linear least squares of y against the given basis functions of eps
/// (column-scaled Householder QR). Throws DomainError on bad samples and
/// SingularSystem on a rank-deficient design.
BasisFit fit_basis(std::span<const Sample> samples, std::span<const BasisFunction> basis);

AsymptoticFit fit_asymptote(std::span<const Sample> samples);

/// Fit of y ~ A/eps + B + C eps + D ln(eps); returns (A, B, C, D).
BasisFit fit_with_log_term(std::span<const Sample> samples);

/// Least-squares slope of ln|y| against ln eps.
double loglog_slope(std::span<const Sample> samples);

std::vector<double> log_spaced(double lo, double hi, std::size_t count);
std::vector<double> linear_spaced(double lo, double hi, std::size_t count);

/// -ln f on each eps via the modular route.
std::vector<Sample> minus_ln_f_samples(std::span<const double> eps,
                                       const Tolerance& tol = default_series_tolerance<double>(),
                                       unsigned threads = default_thread_count());

/// ln xi on each eps via the dual branch.
std::vector<Sample> ln_xi_samples(std::span<const double> eps,
                                  const Tolerance& tol = default_series_tolerance<double>(),
                                  unsigned threads = default_thread_count());

}  // namespace xxzfid
