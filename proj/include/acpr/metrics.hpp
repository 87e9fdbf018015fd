// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace acpr {

/// Per-episode outcome of one run.
struct PerformanceVector {
  std::vector<std::uint64_t> steps;
  std::vector<std::int64_t> compute_ns;

  std::vector<double> steps_as_double() const;
};

struct SummaryStats {
  double mean = 0.0;
  double median = 0.0;
  double rmsd = 0.0;             // root mean squared deviation from the mean
  double step_volatility = 0.0;  // root mean square of consecutive differences
};

/// Throws ArgumentError on an empty input.
SummaryStats summarize(std::span<const double> values);
SummaryStats summarize(const PerformanceVector& v);

/// Trailing window means; output length = size - window + 1.
/// Throws ArgumentError unless 1 <= window <= size.
std::vector<double> moving_average(std::span<const double> values, std::size_t window);

/// a.steps - b.steps element-wise. Throws ArgumentError on a length mismatch.
std::vector<double> difference_vector(const PerformanceVector& a, const PerformanceVector& b);

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p_two_sided = 1.0;
};

/// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
/// freedom. Both samples need at least two values (ArgumentError otherwise).
/// Two constant samples with equal means give t = 0, p = 1; with different
/// means they give t = +-inf, p = 0 and dof = n_a + n_b - 2.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// Two-sided tail probability P(|T| >= |t|) of Student's t with `dof` degrees
/// of freedom, via the regularized incomplete beta function.
double student_t_two_sided_p(double t, double dof);

}  // namespace acpr
