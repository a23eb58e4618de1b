#include "clonal/bd.hpp"

#include <cmath>
#include <string>

namespace clonal {
namespace {

void check_rates(const BDParams& bd, const char* where) {
  if (!(bd.b > 0.0) || !(bd.d > 0.0))
    throw DomainError(std::string(where) + ": requires b > 0 and d > 0");
}

// (d/b)^n evaluated as exp(n*log(d/b)); underflow clamps to 0, and the
// caller avoids the overflowing direction by factoring the ratio instead.
double ratio_pow(double log_ratio, double n) {
  const double e = n * log_ratio;
  if (e < -745.0) return 0.0;
  return std::exp(e);
}

}  // namespace

double hitting_prob(const BDParams& bd, std::int64_t i, std::int64_t j,
                    std::int64_t k) {
  check_rates(bd, "hitting_prob");
  if (!(i <= j && j <= k && i < k))
    throw DomainError("hitting_prob: requires i <= j <= k with i < k");
  if (j == i) return 0.0;
  if (j == k) return 1.0;

  const double a = static_cast<double>(j - i);
  const double n = static_cast<double>(k - i);
  const double log_ratio = std::log(bd.d) - std::log(bd.b);
  if (log_ratio == 0.0) return a / n;  // critical case: analytic limit
  if (log_ratio < 0.0) {
    // d < b: both powers are in (0,1); the direct form is stable.
    return -std::expm1(a * log_ratio) / -std::expm1(n * log_ratio);
  }
  // d > b: factor out the dominant power to avoid overflow:
  // (1-r^a)/(1-r^n) = r^(a-n) * (r^-a - 1)/(r^-n - 1).
  const double lead = ratio_pow(log_ratio, a - n);
  return lead * std::expm1(-a * log_ratio) / std::expm1(-n * log_ratio);
}

double extinction_cdf(const BDParams& bd, std::int64_t i, double t) {
  check_rates(bd, "extinction_cdf");
  if (bd.b == bd.d)
    throw DomainError("extinction_cdf: critical case b = d not covered");
  if (i < 0) throw DomainError("extinction_cdf: requires i >= 0");
  if (!(t >= 0.0)) throw DomainError("extinction_cdf: requires t >= 0");
  if (i == 0) return 1.0;

  const double exponent = (bd.d - bd.b) * t;
  double base;
  if (exponent <= 0.0) {
    const double e = std::exp(exponent);
    base = bd.d * -std::expm1(exponent) / (bd.b - bd.d * e);
  } else {
    // Subcritical with large t: divide through by e^{(d-b)t}.
    const double f = std::exp(-exponent);
    base = bd.d * (1.0 - f) / (bd.d - bd.b * f);
  }
  if (base <= 0.0) return 0.0;
  if (base >= 1.0) return 1.0;
  return std::pow(base, static_cast<double>(i));
}

double survival_prob(const BDParams& bd, std::int64_t i) {
  check_rates(bd, "survival_prob");
  if (!(bd.b > bd.d)) throw DomainError("survival_prob: requires b > d");
  if (i < 0) throw DomainError("survival_prob: requires i >= 0");
  const double log_ratio = std::log(bd.d) - std::log(bd.b);
  return -std::expm1(static_cast<double>(i) * log_ratio);
}

double hitting_time_scale(const BDParams& bd, std::int64_t level) {
  check_rates(bd, "hitting_time_scale");
  if (!(bd.b > bd.d)) throw DomainError("hitting_time_scale: requires b > d");
  if (level < 2) throw DomainError("hitting_time_scale: requires N >= 2");
  return std::log(static_cast<double>(level)) / (bd.b - bd.d);
}

}  // namespace clonal
