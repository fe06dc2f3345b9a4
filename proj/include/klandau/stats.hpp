#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace klandau::stats {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Sample mean and its standard error (n-1 normalization).
MeanSe mean_se(std::span<const double> x);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_se = 0.0;
  double slope_se = 0.0;
};

/// Ordinary least squares y = a + b x, residual-based standard errors.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Weighted least squares with known per-point standard deviations.
LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> sigma);

/// Pool-adjacent-violators fit of a nonincreasing sequence (least squares).
std::vector<double> isotonic_nonincreasing(std::span<const double> y);

/// P(D_m > d) under the null, asymptotic Kolmogorov law with the Stephens
/// finite-sample correction.
double ks_pvalue(double d, std::size_t m);

/// Critical KS distance at level 0.05: 1.36 / sqrt(m).
inline double ks_critical_005(std::size_t m) { return 1.36 / std::sqrt(static_cast<double>(m)); }

/// One-sample KS statistic against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf cdf) {
  std::sort(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

}  // namespace klandau::stats
