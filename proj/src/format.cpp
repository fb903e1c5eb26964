#include "qrec/format.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace qrec {

std::optional<Rational> nearest_rational(double x, std::int64_t max_den, double tol) {
  if (!std::isfinite(x) || std::abs(x) > 1e6) return std::nullopt;
  for (std::int64_t q = 1; q <= max_den; ++q) {
    const double p = std::round(x * static_cast<double>(q));
    if (std::abs(x - p / static_cast<double>(q)) <= tol) {
      auto num = static_cast<std::int64_t>(p);
      const std::int64_t g = std::gcd(num < 0 ? -num : num, q);
      return Rational{num / g, q / g};
    }
  }
  return std::nullopt;
}

std::string to_string(const Rational& r) {
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", p);
  return buf;
}

std::string format_real_constant(double x) {
  constexpr double kSnap = 1e-14;
  constexpr std::int64_t kMaxDen = 144;
  if (x == 0.0) return "0";
  if (auto r = nearest_rational(x, kMaxDen, kSnap)) return to_string(*r);

  const std::string sign = x < 0 ? "-" : "";
  if (auto sq = nearest_rational(x * x, kMaxDen, kSnap); sq && sq->num > 0) {
    const double root = std::sqrt(static_cast<double>(sq->num) / static_cast<double>(sq->den));
    if (std::abs(std::abs(x) - root) <= kSnap) {
      if (sq->num == 1) return sign + "1/sqrt(" + std::to_string(sq->den) + ")";
      if (sq->den == 1) return sign + "sqrt(" + std::to_string(sq->num) + ")";
      return sign + "sqrt(" + to_string(*sq) + ")";
    }
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace qrec
