#include <clonal/stats.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <clonal/errors.hpp>
#include <clonal/rng.hpp>

namespace clonal {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw DomainError("mean of an empty sample is undefined");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double quantile(std::vector<double> xs, double p) {
    if (xs.empty()) throw DomainError("quantile of an empty sample is undefined");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
    std::sort(xs.begin(), xs.end());
    const double h = p * static_cast<double>(xs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return xs[lo] + frac * (xs[hi] - xs[lo]);
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

Interval wilson_ci(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) throw DomainError("Wilson interval needs at least one trial");
    if (successes > trials) throw DomainError("successes exceed trials");
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    return {center - half, center + half};
}

Interval bootstrap_quantile_ci(const std::vector<double>& xs, double p,
                               std::uint64_t seed, std::size_t resamples) {
    if (xs.empty()) throw DomainError("bootstrap of an empty sample is undefined");
    if (resamples == 0) throw DomainError("bootstrap needs at least one resample");
    if (xs.size() == 1) return {xs[0], xs[0]};
    Xoshiro256pp rng(seed);
    std::vector<double> stats(resamples);
    std::vector<double> draw(xs.size());
    for (std::size_t r = 0; r < resamples; ++r) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const std::uint64_t idx = rng.next_u64() % xs.size();
            draw[i] = xs[idx];
        }
        stats[r] = quantile(draw, p);
    }
    return {quantile(stats, 0.025), quantile(stats, 0.975)};
}

}  // namespace clonal
