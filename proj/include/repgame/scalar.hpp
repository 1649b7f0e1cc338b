#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <type_traits>
#include <vector>

namespace repgame {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

// Smallest-denominator rational whose nearest double is x.
Rational rationalize(double x);

template <class T>
T from_double(double x);
template <>
inline double from_double<double>(double x) {
  return x;
}
template <>
inline Rational from_double<Rational>(double x) {
  return rationalize(x);
}

template <class T>
T scalar_abs(const T& x) {
  return x < T(0) ? T(-x) : x;
}

template <class T>
T ipow(T base, int n) {
  T r(1);
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

template <class T>
T max_abs(const std::vector<T>& v) {
  T m(0);
  for (const T& x : v) {
    T a = scalar_abs(x);
    if (a > m) m = a;
  }
  return m;
}

std::string format_scalar(double x);
std::string format_scalar(const Rational& x);

// Relative tolerance band: |a - b| <= rel * max(1, |a|, |b|).
template <class T>
T band(const T& a, const T& b, double rel) {
  T scale(1);
  if (scalar_abs(a) > scale) scale = scalar_abs(a);
  if (scalar_abs(b) > scale) scale = scalar_abs(b);
  return from_double<T>(rel) * scale;
}

template <class T>
std::vector<T> convert_vector(const std::vector<double>& v) {
  std::vector<T> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(from_double<T>(x));
  return out;
}

template <class T>
std::vector<double> to_double_vector(const std::vector<T>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const T& x : v) out.push_back(to_double(x));
  return out;
}

}  // namespace repgame
