#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sle {

struct MeanStderr {
  double mean = 0;
  double stderr_ = 0;
  std::size_t n = 0;
};

MeanStderr mean_stderr(std::span<const double> xs);

// Half-width of the Wilson score interval at `z` standard normal quantiles;
// used as the quoted uncertainty of Monte-Carlo hit fractions.
double wilson_halfwidth(std::uint64_t hits, std::uint64_t n, double z = 1.0);

struct KsResult {
  double d_stat = 0;
  double p_value = 0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct LinFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

LinFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace sle
