#pragma once

#include <cstddef>

#include "cqkd/error.hpp"

namespace cqkd {

struct BisectionResult {
  double root = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t evaluations = 0;
};

// Root of f on [lower, upper] to a half-width of at most tol. Requires
// f(lower) and f(upper) of strictly opposite sign; throws BracketError
// otherwise. f_lower and f_upper are the already known endpoint values.
template <typename Function>
BisectionResult bisect(Function&& f, double lower, double upper, double f_lower, double f_upper,
                       double tol) {
  if (!(tol > 0.0)) throw PreconditionError("bisect: tolerance must be positive");
  if (!((f_lower > 0.0 && f_upper < 0.0) || (f_lower < 0.0 && f_upper > 0.0))) {
    throw BracketError("bisect: no sign change over the bracket");
  }
  const bool increasing = f_lower < 0.0;
  BisectionResult r{0.0, lower, upper, 0};
  while (0.5 * (r.upper - r.lower) > tol) {
    const double mid = 0.5 * (r.lower + r.upper);
    if (mid <= r.lower || mid >= r.upper) break;  // interval is one ulp wide
    const double value = f(mid);
    ++r.evaluations;
    if (value == 0.0) {
      r.lower = r.upper = mid;
      break;
    }
    if ((value < 0.0) == increasing) {
      r.lower = mid;
    } else {
      r.upper = mid;
    }
  }
  r.root = 0.5 * (r.lower + r.upper);
  return r;
}

}  // namespace cqkd
