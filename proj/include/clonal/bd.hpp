// Closed-form linear birth-death process formulas: hitting probabilities,
// extinction-time distribution, survival probability and the logarithmic
// hitting-time scale.  These serve both as analytic oracles for simulator
// tests and as ingredients of sweep-duration predictions.
#pragma once

#include <cstdint>

#include "clonal/errors.hpp"

namespace clonal {

struct BDParams {
  double b = 0.0;  // individual birth rate
  double d = 0.0;  // individual death rate
};

// Probability that the chain started at j hits k before i (i <= j <= k,
// i < k).  Boundary starts return 0 (j == i) or 1 (j == k); the critical
// case b == d uses the analytic limit (j - i)/(k - i).
double hitting_prob(const BDParams& bd, std::int64_t i, std::int64_t j,
                    std::int64_t k);

// P(extinction time <= t) for a population of i individuals; requires b != d.
double extinction_cdf(const BDParams& bd, std::int64_t i, double t);

// Probability that a supercritical population of i individuals never goes
// extinct: 1 - (d/b)^i.  Requires b > d > 0.
double survival_prob(const BDParams& bd, std::int64_t i);

// Asymptotic time scale log(N)/(b - d) for a surviving supercritical chain
// to reach level N.  Requires b > d > 0 and N >= 2.
double hitting_time_scale(const BDParams& bd, std::int64_t level);

}  // namespace clonal
