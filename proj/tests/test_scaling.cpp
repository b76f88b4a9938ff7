#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "xxzfid/scaling.hpp"

using namespace xxzfid;
using Point = ModelPoint<double>;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

std::vector<Sample> model_samples(double a, double b, double c, const std::vector<double>& eps) {
  std::vector<Sample> s;
  for (double e : eps) s.push_back({e, a / e + b + c * e});
  return s;
}

}  // namespace

TEST_CASE("reference asymptotes") {
  CHECK(conjecture_target() == 0.125);
  CHECK(conjecture_target(0.5) == 0.0625);
  CHECK(ln_xi_reference(1.0) == doctest::Approx(kPi2 / 2 - std::log(4.0)));
  CHECK(minus_ln_f_reference(1.0) == doctest::Approx(kPi2 / 16 - std::numbers::ln2 / 4));
  CHECK(minus_ln_f_reference(kPi2 / 16) == doctest::Approx(1.0 - std::numbers::ln2 / 4).epsilon(1e-15));
  CHECK(std::abs(correlation_length(Point::from_eps(1e-3)).ln_xi - ln_xi_reference(1e-3)) < 1e-2);
  CHECK(std::abs(correlation_length(Point::from_eps(1e-5)).ln_xi - ln_xi_reference(1e-5)) < 1e-4);
  CHECK(std::abs(-fidelity_modular(Point::from_eps(1e-3)).ln_f - minus_ln_f_reference(1e-3)) < 1e-2);
  // the leading terms are in ratio 1/8 at every eps
  for (double eps : {1e-1, 1e-3})
    CHECK(minus_ln_f_reference(eps) / ln_xi_reference(eps) == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("grids") {
  const auto g = log_spaced(1e-3, 1e-2, 3);
  REQUIRE(g.size() == 3);
  CHECK(g[0] == doctest::Approx(1e-3).scale(0));
  CHECK(g[1] == doctest::Approx(std::sqrt(1e-5)).scale(0));
  CHECK(g[2] == doctest::Approx(1e-2).scale(0));
  const auto l = linear_spaced(0.0, 1.0, 5);
  CHECK(l[2] == doctest::Approx(0.5));
  CHECK(linear_spaced(0.3, 0.3, 1).size() == 1);
}

TEST_CASE("fit recovers an exact model") {
  const auto s = model_samples(2.0, 3.0, 5.0, log_spaced(1e-3, 1e-1, 12));
  const auto fit = fit_asymptote(s);
  CHECK(fit.A == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.B == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(fit.C == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(fit.max_residual < 1e-10);
  CHECK(fit.sample_count == 12);

  const auto log_fit = fit_with_log_term(s);
  REQUIRE(log_fit.coefficients.size() == 4);
  CHECK(std::abs(log_fit.coefficients[3]) < 1e-8);
}

TEST_CASE("fit errors") {
  const std::vector<Sample> duplicate{{1e-3, 1.0}, {1e-3, 1.0}, {1e-3, 1.0}, {1e-3, 1.0}};
  CHECK_THROWS_AS(fit_asymptote(duplicate), SingularSystem);
  const std::vector<Sample> too_few{{1e-3, 1.0}, {2e-3, 1.0}};
  CHECK_THROWS_AS(fit_asymptote(too_few), DomainError);
  const std::vector<Sample> negative{{-1e-3, 1.0}, {2e-3, 1.0}, {3e-3, 1.0}};
  CHECK_THROWS_AS(fit_asymptote(negative), DomainError);
  const std::vector<Sample> nan{{1e-3, NAN}, {2e-3, 1.0}, {3e-3, 1.0}};
  CHECK_THROWS_AS(fit_asymptote(nan), DomainError);
}

TEST_CASE("asymptote of -ln f on [1e-3, 1e-2]") {
  const auto eps = log_spaced(1e-3, 1e-2, 10);
  const auto fit = fit_asymptote(minus_ln_f_samples(eps));
  CHECK(std::abs(fit.A / (kPi2 / 16) - 1.0) < 1e-3);
  CHECK(std::abs(fit.B + std::numbers::ln2 / 4) < 1e-3);
}

TEST_CASE("asymptote of ln xi on [1e-3, 1e-2]") {
  const auto eps = log_spaced(1e-3, 1e-2, 10);
  const auto fit = fit_asymptote(ln_xi_samples(eps));
  CHECK(std::abs(fit.A / (kPi2 / 2) - 1.0) < 1e-3);
  CHECK(std::abs(fit.B + std::log(4.0)) < 1e-3);
  // corrections to ln xi are exponentially small in 1/eps
  CHECK(std::abs(fit.C) < 1e-6);
}

TEST_CASE("no ln eps term in -ln f") {
  const auto eps = log_spaced(1e-3, 1e-2, 10);
  const auto fit = fit_with_log_term(minus_ln_f_samples(eps));
  CHECK(std::abs(fit.coefficients[3]) < 1e-3);
}

TEST_CASE("remainder of -ln f vanishes at least linearly") {
  const auto eps = log_spaced(1e-3, 1e-1, 12);
  std::vector<Sample> remainder;
  for (const auto& s : minus_ln_f_samples(eps)) remainder.push_back({s.eps, s.y - minus_ln_f_reference(s.eps)});
  const double slope = loglog_slope(remainder);
  CHECK(slope >= 0.8);
  // the remainder is -eps^2/16 to leading order
  CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
  CHECK(remainder.front().y / (eps.front() * eps.front()) == doctest::Approx(-1.0 / 16).epsilon(1e-2).scale(0));
}

TEST_CASE("two-point shrink of the -ln f remainder") {
  auto remainder = [](double eps) { return -fidelity_modular(Point::from_eps(eps)).ln_f - minus_ln_f_reference(eps); };
  const double shrink = remainder(1e-2) / remainder(1e-3);
  // at least the O(eps) factor of 10; the measured factor is ~100 (eps^2)
  CHECK(shrink >= 10.0);
  CHECK(shrink == doctest::Approx(100.0).epsilon(0.02));
}

TEST_CASE("fits are bit-for-bit deterministic") {
  const auto samples = minus_ln_f_samples(log_spaced(1e-3, 1e-2, 10));
  const auto a = fit_asymptote(samples), b = fit_asymptote(samples);
  CHECK(a.A == b.A);
  CHECK(a.B == b.B);
  CHECK(a.C == b.C);
  CHECK(a.max_residual == b.max_residual);
}

TEST_CASE("conjecture ratio") {
  double previous = INFINITY;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double deviation = std::abs(conjecture_ratio(Point::from_eps(eps)) - 0.125);
    CAPTURE(eps);
    CHECK(deviation < 1e-3);
    CHECK(deviation < previous);
    previous = deviation;
  }
  SUBCASE("eps = 1e-6 with a larger term budget") {
    const Tolerance tol{default_series_tolerance<double>().rel_tol, 100'000'000};
    CHECK(std::abs(conjecture_ratio(Point::from_eps(1e-6), tol) - 0.125) < 1e-6);
  }
  SUBCASE("term cap is reported, not silently truncated") {
    CHECK_THROWS_AS(conjecture_ratio(Point::from_eps(1e-6), Tolerance{1e-13, 1000}), NonConvergent);
  }
}

TEST_CASE("samples are deterministic across thread counts") {
  const auto eps = log_spaced(1e-3, 1e-1, 9);
  const auto one = minus_ln_f_samples(eps, default_series_tolerance<double>(), 1);
  const auto many = minus_ln_f_samples(eps, default_series_tolerance<double>(), 4);
  REQUIRE(one.size() == many.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].eps == many[i].eps);
    CHECK(one[i].y == many[i].y);
  }
}
