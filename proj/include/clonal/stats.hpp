#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace clonal {

// Closed interval, used for confidence intervals.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return x >= lo && x <= hi; }
    double width() const { return hi - lo; }
};

double mean(const std::vector<double>& xs);

// Quantile with linear interpolation between order statistics (the common
// "type 7" rule). p must lie in [0, 1]; xs must be non-empty.
double quantile(std::vector<double> xs, double p);

double median(std::vector<double> xs);

// Wilson score interval for a binomial proportion. z defaults to the
// two-sided 95% normal quantile.
Interval wilson_ci(std::size_t successes, std::size_t trials,
                   double z = 1.959963984540054);

// Percentile bootstrap interval (2.5%..97.5%) for the p-quantile of xs.
// Deterministic for a fixed seed.
Interval bootstrap_quantile_ci(const std::vector<double>& xs, double p,
                               std::uint64_t seed,
                               std::size_t resamples = 2000);

}  // namespace clonal
