#pragma once

// Real-number abstraction shared by the special-function modules.
//
// Every routine in qseries/elliptic/fidelity/scaling is a template over a
// type satisfying RealNumber. Elementary functions are called unqualified
// after a `using std::xxx;` so that argument-dependent lookup picks up the
// overloads of an extended-precision backend (long double, or any
// boost::multiprecision number with expression templates disabled).

#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <string>

#include "xxzfid/errors.hpp"

namespace xxzfid {

template <class T>
concept RealNumber = std::numeric_limits<T>::is_specialized &&
                     !std::numeric_limits<T>::is_integer &&
                     requires(const T a, const T b) {
                       { a + b } -> std::convertible_to<T>;
                       { a - b } -> std::convertible_to<T>;
                       { a * b } -> std::convertible_to<T>;
                       { a / b } -> std::convertible_to<T>;
                       { -a } -> std::convertible_to<T>;
                       { a < b } -> std::convertible_to<bool>;
                     };

template <RealNumber Real>
Real pi() {
  using std::acos;
  return acos(Real(-1));
}

template <RealNumber Real>
Real ln2() {
  using std::log;
  return log(Real(2));
}

template <RealNumber Real>
double to_double(const Real& v) {
  return static_cast<double>(v);
}

template <RealNumber Real>
bool is_finite(const Real& v) {
  using std::isfinite;
  return isfinite(v);
}

template <RealNumber Real>
double machine_epsilon() {
  return static_cast<double>(std::numeric_limits<Real>::epsilon());
}

// Truncation control for products and series.
struct Tolerance {
  double rel_tol = 1e-14;
  std::size_t max_terms = 10'000'000;

  template <RealNumber Real>
  void validate() const {
    if (!(rel_tol >= 10.0 * machine_epsilon<Real>()))
      throw InvalidSpec("rel_tol " + std::to_string(rel_tol) +
                        " is below 10 x machine epsilon");
    if (max_terms < 1) throw InvalidSpec("max_terms must be >= 1");
  }
};

inline constexpr std::size_t kDirectMaxTerms = 10'000'000;
inline constexpr std::size_t kSeriesMaxTerms = 1'000'000;

template <RealNumber Real>
Tolerance default_direct_tolerance() {
  return {32.0 * machine_epsilon<Real>(), kDirectMaxTerms};
}

template <RealNumber Real>
Tolerance default_series_tolerance() {
  return {32.0 * machine_epsilon<Real>(), kSeriesMaxTerms};
}

}  // namespace xxzfid
