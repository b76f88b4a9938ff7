#include "xxzfid/scaling.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "xxzfid/errors.hpp"

namespace xxzfid {

BasisFit fit_basis(std::span<const Sample> samples, std::span<const BasisFunction> basis) {
  const auto rows = static_cast<Eigen::Index>(samples.size());
  const auto cols = static_cast<Eigen::Index>(basis.size());
  if (cols == 0) throw DomainError("fit needs at least one basis function");
  if (rows < cols)
    throw DomainError("fit needs at least " + std::to_string(cols) + " samples, got " +
                      std::to_string(rows));
  for (const auto& s : samples) {
    if (!(s.eps > 0.0) || !std::isfinite(s.eps) || !std::isfinite(s.y))
      throw DomainError("fit samples need finite eps > 0 and finite y");
  }

  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    rhs(i) = samples[i].y;
    for (Eigen::Index j = 0; j < cols; ++j) design(i, j) = basis[j](samples[i].eps);
  }
  Eigen::VectorXd scale = design.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (scale(j) == 0.0) throw SingularSystem("basis function vanishes on every sample");
    design.col(j) /= scale(j);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-12);
  if (qr.rank() < cols)
    throw SingularSystem("design matrix has rank " + std::to_string(qr.rank()) + " < " +
                         std::to_string(cols) + "; eps values are not distinct enough");
  const Eigen::VectorXd scaled = qr.solve(rhs);

  BasisFit fit;
  fit.coefficients.resize(static_cast<std::size_t>(cols));
  for (Eigen::Index j = 0; j < cols; ++j) fit.coefficients[j] = scaled(j) / scale(j);
  for (Eigen::Index i = 0; i < rows; ++i) {
    double model = 0.0;
    for (Eigen::Index j = 0; j < cols; ++j)
      model += fit.coefficients[j] * basis[j](samples[i].eps);
    fit.max_residual = std::max(fit.max_residual, std::abs(model - samples[i].y));
  }
  return fit;
}

namespace {

const std::vector<BasisFunction>& asymptotic_basis() {
  static const std::vector<BasisFunction> basis{
      [](double e) { return 1.0 / e; }, [](double) { return 1.0; }, [](double e) { return e; }};
  return basis;
}

}  // namespace

AsymptoticFit fit_asymptote(std::span<const Sample> samples) {
  if (samples.size() < 3) throw DomainError("asymptotic fit needs at least 3 samples");
  const auto fit = fit_basis(samples, asymptotic_basis());
  return {fit.coefficients[0], fit.coefficients[1], fit.coefficients[2], fit.max_residual,
          samples.size()};
}

BasisFit fit_with_log_term(std::span<const Sample> samples) {
  std::vector<BasisFunction> basis = asymptotic_basis();
  basis.emplace_back([](double e) { return std::log(e); });
  return fit_basis(samples, basis);
}

double loglog_slope(std::span<const Sample> samples) {
  if (samples.size() < 2) throw DomainError("log-log slope needs at least 2 samples");
  double mean_u = 0.0, mean_v = 0.0;
  std::vector<double> u, v;
  for (const auto& s : samples) {
    if (!(s.eps > 0.0) || s.y == 0.0 || !std::isfinite(s.y))
      throw DomainError("log-log slope needs eps > 0 and finite nonzero y");
    u.push_back(std::log(s.eps));
    v.push_back(std::log(std::abs(s.y)));
    mean_u += u.back();
    mean_v += v.back();
  }
  const double n = static_cast<double>(samples.size());
  mean_u /= n;
  mean_v /= n;
  double suv = 0.0, suu = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    suv += (u[i] - mean_u) * (v[i] - mean_v);
    suu += (u[i] - mean_u) * (u[i] - mean_u);
  }
  if (suu == 0.0) throw SingularSystem("log-log slope needs distinct eps values");
  return suv / suu;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw DomainError("log spacing needs positive bounds");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> linear_spaced(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  out.back() = hi;
  return out;
}

std::vector<Sample> minus_ln_f_samples(std::span<const double> eps, const Tolerance& tol,
                                       unsigned threads) {
  return parallel_map(
      eps.size(),
      [&](std::size_t i) {
        const auto p = ModelPoint<double>::from_eps(eps[i]);
        return Sample{eps[i], -fidelity_modular(p, tol).ln_f};
      },
      threads);
}

std::vector<Sample> ln_xi_samples(std::span<const double> eps, const Tolerance& tol,
                                  unsigned threads) {
  return parallel_map(
      eps.size(),
      [&](std::size_t i) {
        const auto p = ModelPoint<double>::from_eps(eps[i]);
        return Sample{eps[i], correlation_length_dual(p, tol).ln_xi};
      },
      threads);
}

}  // namespace xxzfid
