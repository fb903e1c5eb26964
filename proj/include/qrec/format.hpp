#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace qrec {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

/// Smallest-denominator fraction p/q (q <= max_den) within `tol` of x.
std::optional<Rational> nearest_rational(double x, std::int64_t max_den, double tol);

std::string to_string(const Rational& r);

/// Probability rendered with 9 significant digits.
std::string format_probability(double p);

/// Real constant in the scenario-file syntax: exact small rationals and
/// square roots of rationals are written symbolically ("1/sqrt(12)",
/// "sqrt(2/3)"), anything else with 17 significant digits.
std::string format_real_constant(double x);

}  // namespace qrec
