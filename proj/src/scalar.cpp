#include "repgame/scalar.hpp"

#include <cmath>
#include <cstdio>

#include "repgame/errors.hpp"

namespace repgame {

Rational rationalize(double x) {
  if (!std::isfinite(x)) throw FormatError("cannot rationalize a non-finite value");
  using boost::multiprecision::mpz_int;
  const bool negative = x < 0;
  const double target = std::fabs(x);
  Rational exact(target);
  mpz_int n = boost::multiprecision::numerator(exact);
  mpz_int d = boost::multiprecision::denominator(exact);
  mpz_int h_prev = 0, h = 1, k_prev = 1, k = 0;
  Rational result = exact;
  while (d != 0) {
    mpz_int a = n / d;
    mpz_int r = n - a * d;
    mpz_int h_next = a * h + h_prev;
    mpz_int k_next = a * k + k_prev;
    Rational candidate(h_next, k_next);
    if (candidate.convert_to<double>() == target) {
      result = candidate;
      break;
    }
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
    n = d;
    d = r;
  }
  return negative ? Rational(-result) : result;
}

std::string format_scalar(double x) {
  if (x == 0) x = 0;  // drop negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

std::string format_scalar(const Rational& x) { return x.str(); }

}  // namespace repgame
