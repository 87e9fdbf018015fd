// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "acpr/error.hpp"
#include "acpr/harness.hpp"

namespace acpr {

using nlohmann::json;

MeanMedianReading read_mean_median(const SummaryStats& s) noexcept {
  const double scale = std::max(std::abs(s.mean), std::abs(s.median));
  if (scale == 0.0 || std::abs(s.mean - s.median) <= kNearlyEqualTolerance * scale)
    return MeanMedianReading::nearly_equal;
  return s.median > s.mean ? MeanMedianReading::median_above_mean
                           : MeanMedianReading::mean_above_median;
}

std::string_view describe(MeanMedianReading r) noexcept {
  switch (r) {
    case MeanMedianReading::median_above_mean:
      return "learns successfully; forgetting has occasional strong impact";
    case MeanMedianReading::mean_above_median:
      return "occasional good episodes, but most episodes are degraded by forgetting";
    case MeanMedianReading::nearly_equal:
      return "learning and forgetting roughly balance";
  }
  return "?";
}

namespace {

std::string_view reading_key(MeanMedianReading r) noexcept {
  switch (r) {
    case MeanMedianReading::median_above_mean: return "median_above_mean";
    case MeanMedianReading::mean_above_median: return "mean_above_median";
    case MeanMedianReading::nearly_equal: return "nearly_equal";
  }
  return "?";
}

double mean_compute(const RunArtifact& a) {
  if (a.episodes.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& e : a.episodes) sum += static_cast<double>(e.compute_ns);
  return sum / static_cast<double>(a.episodes.size());
}

json stats_json(const SummaryStats& s) {
  return {{"mean", s.mean},
          {"median", s.median},
          {"rmsd", s.rmsd},
          {"step_volatility", s.step_volatility}};
}

// nlohmann::json writes non-finite numbers as null; keep the sign visible.
json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

ComparisonReport compare_runs(const RunArtifact& a, const RunArtifact& b,
                              std::size_t ma_window) {
  const PerformanceVector pa = a.performance();
  const PerformanceVector pb = b.performance();
  ComparisonReport r;
  r.label_a = a.config.output.empty() ? "a" : a.config.output;
  r.label_b = b.config.output.empty() ? "b" : b.config.output;
  r.ma_window = ma_window;
  r.difference = difference_vector(pa, pb);
  const auto sa = pa.steps_as_double();
  const auto sb = pb.steps_as_double();
  r.summary_a = summarize(sa);
  r.summary_b = summarize(sb);
  r.summary_difference = summarize(r.difference);
  r.moving_average_a = moving_average(sa, ma_window);
  r.moving_average_b = moving_average(sb, ma_window);
  r.moving_average_difference = moving_average(r.difference, ma_window);
  r.welch = welch_t_test(sa, sb);
  r.reading_a = read_mean_median(r.summary_a);
  r.reading_b = read_mean_median(r.summary_b);
  r.mean_compute_ns_a = mean_compute(a);
  r.mean_compute_ns_b = mean_compute(b);
  return r;
}

std::string ComparisonReport::to_text() const {
  std::ostringstream out;
  char line[256];
  out << "A: " << label_a << "\nB: " << label_b << "\n";
  out << "episodes: " << difference.size() << ", moving-average window: " << ma_window << "\n\n";
  std::snprintf(line, sizeof line, "%-22s %14s %14s %14s\n", "", "A", "B", "A-B");
  out << line;
  const auto row = [&](const char* name, double va, double vb, double vd) {
    std::snprintf(line, sizeof line, "%-22s %14.3f %14.3f %14.3f\n", name, va, vb, vd);
    out << line;
  };
  row("mean steps", summary_a.mean, summary_b.mean, summary_difference.mean);
  row("median steps", summary_a.median, summary_b.median, summary_difference.median);
  row("rmsd", summary_a.rmsd, summary_b.rmsd, summary_difference.rmsd);
  row("step volatility", summary_a.step_volatility, summary_b.step_volatility,
      summary_difference.step_volatility);
  row("mean compute (ms/ep)", mean_compute_ns_a * 1e-6, mean_compute_ns_b * 1e-6,
      (mean_compute_ns_a - mean_compute_ns_b) * 1e-6);
  if (!moving_average_a.empty()) {
    row("first window mean", moving_average_a.front(), moving_average_b.front(),
        moving_average_difference.front());
    row("last window mean", moving_average_a.back(), moving_average_b.back(),
        moving_average_difference.back());
  }
  out << "\nA: " << describe(reading_a) << "\nB: " << describe(reading_b) << "\n\n";
  std::snprintf(line, sizeof line, "Welch t-test on steps: t = %.4f, dof = %.2f, p = %.4g\n",
                welch.t, welch.dof, welch.p_two_sided);
  out << line;
  std::snprintf(line, sizeof line, "difference is %s at the %.2f level\n",
                welch.p_two_sided < significance_level ? "significant" : "not significant",
                significance_level);
  out << line;
  return out.str();
}

std::string ComparisonReport::to_json() const {
  json j = {{"format", "acpr-compare 1"},
            {"a", label_a},
            {"b", label_b},
            {"episodes", difference.size()},
            {"ma_window", ma_window},
            {"summary_a", stats_json(summary_a)},
            {"summary_b", stats_json(summary_b)},
            {"summary_difference", stats_json(summary_difference)},
            {"reading_a", {{"kind", reading_key(reading_a)}, {"text", describe(reading_a)}}},
            {"reading_b", {{"kind", reading_key(reading_b)}, {"text", describe(reading_b)}}},
            {"mean_compute_ns_a", mean_compute_ns_a},
            {"mean_compute_ns_b", mean_compute_ns_b},
            {"welch",
             {{"t", number_or_string(welch.t)},
              {"dof", welch.dof},
              {"p", welch.p_two_sided},
              {"significance_level", significance_level},
              {"significant", welch.p_two_sided < significance_level}}},
            {"difference", difference},
            {"moving_average_a", moving_average_a},
            {"moving_average_b", moving_average_b},
            {"moving_average_difference", moving_average_difference}};
  return j.dump(2) + "\n";
}

}  // namespace acpr
