// SPDX-License-Identifier: Apache-2.0

#include "acpr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "acpr/error.hpp"

namespace acpr {

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Unbiased sample variance.
double sample_variance(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

std::vector<double> PerformanceVector::steps_as_double() const {
  return {steps.begin(), steps.end()};
}

SummaryStats summarize(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("summarize: empty vector");
  const auto n = static_cast<double>(values.size());
  SummaryStats s;
  s.mean = mean_of(values);

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

  double ss = 0.0;
  for (double x : values) ss += (x - s.mean) * (x - s.mean);
  s.rmsd = std::sqrt(ss / n);

  if (values.size() > 1) {
    double sd = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
      const double d = values[i] - values[i - 1];
      sd += d * d;
    }
    s.step_volatility = std::sqrt(sd / static_cast<double>(values.size() - 1));
  }
  return s;
}

SummaryStats summarize(const PerformanceVector& v) {
  const auto steps = v.steps_as_double();
  return summarize(steps);
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window) {
  if (window < 1 || window > values.size())
    throw ArgumentError("moving_average: window must lie in [1, " +
                        std::to_string(values.size()) + "]");
  std::vector<double> out;
  out.reserve(values.size() - window + 1);
  // Direct sums per window keep constant inputs exactly constant.
  for (std::size_t i = 0; i + window <= values.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = i; k < i + window; ++k) sum += values[k];
    out.push_back(sum / static_cast<double>(window));
  }
  return out;
}

std::vector<double> difference_vector(const PerformanceVector& a, const PerformanceVector& b) {
  if (a.steps.size() != b.steps.size())
    throw ArgumentError("difference_vector: runs have " + std::to_string(a.steps.size()) +
                        " and " + std::to_string(b.steps.size()) + " episodes");
  std::vector<double> d(a.steps.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = static_cast<double>(a.steps[i]) - static_cast<double>(b.steps[i]);
  return d;
}

double student_t_two_sided_p(double t, double dof) {
  if (!(dof > 0.0)) throw ArgumentError("student_t_two_sided_p: dof must be positive");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double x = dof / (dof + t * t);
  return std::clamp(boost::math::ibeta(0.5 * dof, 0.5, x), 0.0, 1.0);
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw ArgumentError("welch_t_test: each sample needs at least two values");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  const double va = sample_variance(a, ma) / na;
  const double vb = sample_variance(b, mb) / nb;
  const double se2 = va + vb;

  WelchResult r;
  if (se2 == 0.0) {
    r.dof = na + nb - 2.0;
    if (ma == mb) return r;
    r.t = ma > mb ? std::numeric_limits<double>::infinity()
                  : -std::numeric_limits<double>::infinity();
    r.p_two_sided = 0.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  r.dof = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_two_sided = student_t_two_sided_p(r.t, r.dof);
  return r;
}

}  // namespace acpr
