#include "adastorm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace adastorm {

SandwichBounds lemma1_bounds(std::span<const double> c, double alpha) {
  if (c.empty()) throw std::invalid_argument("lemma1_bounds: empty sequence");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("lemma1_bounds: alpha must lie in (0, 1)");
  }
  double prefix = 0.0;
  double middle = 0.0;
  for (double ci : c) {
    if (!(ci > 0.0) || !std::isfinite(ci)) {
      throw std::invalid_argument("lemma1_bounds: entries must be positive and finite");
    }
    prefix += ci;
    middle += ci / std::pow(prefix, alpha);
  }
  const double lower = std::pow(prefix, 1.0 - alpha);
  const SandwichBounds b{lower, middle, lower / (1.0 - alpha)};
  if (b.middle < b.lower * (1.0 - kSandwichTolerance) ||
      b.middle > b.upper * (1.0 + kSandwichTolerance)) {
    throw std::logic_error("lemma1_bounds: sandwich violated (lower=" + std::to_string(b.lower) +
                           ", middle=" + std::to_string(b.middle) +
                           ", upper=" + std::to_string(b.upper) + ")");
  }
  return b;
}

SlopeFit fit_loglog_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw std::invalid_argument("fit_loglog_slope: need at least 2 points");
  SlopeFit fit;
  fit.points.reserve(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [T, metric] : points) {
    if (!(T > 0.0) || !(metric > 0.0) || !std::isfinite(T) || !std::isfinite(metric)) {
      throw std::invalid_argument("fit_loglog_slope: T and metric must be positive, got (" +
                                  std::to_string(T) + ", " + std::to_string(metric) + ")");
    }
    fit.points.emplace_back(std::log(T), std::log(metric));
    mx += fit.points.back().first;
    my += fit.points.back().second;
  }
  const auto k = static_cast<double>(fit.points.size());
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [lx, ly] : fit.points) {
    sxx += (lx - mx) * (lx - mx);
    sxy += (lx - mx) * (ly - my);
    syy += (ly - my) * (ly - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog_slope: all T values coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // A perfectly flat response is fitted exactly.
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

double average_grad_norm(const RunRecord& record) {
  if (record.rows.empty()) throw std::invalid_argument("average_grad_norm: empty trace");
  double s = 0.0;
  for (const auto& r : record.rows) s += r.grad_norm;
  return s / static_cast<double>(record.rows.size());
}

double tau_grad_norm(const RunRecord& record) {
  if (record.tau < 1 || record.tau > record.rows.size()) {
    throw std::out_of_range("tau_grad_norm: tau outside the trace");
  }
  return record.rows[record.tau - 1].grad_norm;
}

double final_quarter_grad_norm(const RunRecord& record) {
  const std::size_t n = record.rows.size();
  if (n == 0) throw std::invalid_argument("final_quarter_grad_norm: empty trace");
  const std::size_t count = (n + 3) / 4;
  double s = 0.0;
  for (std::size_t i = n - count; i < n; ++i) s += record.rows[i].grad_norm;
  return s / static_cast<double>(count);
}

MeanAndError mean_and_standard_error(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_and_standard_error: no values");
  // Summing in sorted order makes the result independent of input order.
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto k = static_cast<double>(sorted.size());
  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= k;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (k - 1.0)) / std::sqrt(k)};
}

RunSummary summarize(std::span<const RunRecord> records) {
  std::vector<const RunRecord*> ptrs;
  ptrs.reserve(records.size());
  for (const auto& r : records) ptrs.push_back(&r);
  return summarize(ptrs);
}

RunSummary summarize(std::span<const RunRecord* const> records) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  const RunConfigEcho& ref = records.front()->config;
  std::vector<double> avg;
  std::vector<double> tau;
  std::vector<double> quarter;
  for (const RunRecord* rp : records) {
    const RunRecord& r = *rp;
    if (r.config.algorithm != ref.algorithm || r.config.problem != ref.problem ||
        r.config.horizon != ref.horizon) {
      throw std::invalid_argument("summarize: records mix configurations");
    }
    avg.push_back(average_grad_norm(r));
    tau.push_back(tau_grad_norm(r));
    quarter.push_back(final_quarter_grad_norm(r));
  }
  const auto a = mean_and_standard_error(avg);
  const auto t = mean_and_standard_error(tau);
  const auto q = mean_and_standard_error(quarter);
  return RunSummary{records.size(), a.mean, a.standard_error, t.mean,
                    t.standard_error, q.mean, q.standard_error};
}

EstimatorErrorStats estimator_error_stats(const RunRecord& record) {
  const std::size_t n = record.rows.size();
  if (n == 0) throw std::invalid_argument("estimator_error_stats: empty trace");
  const std::size_t count = std::max<std::size_t>(1, n / 2);
  double s = 0.0;
  for (std::size_t i = n - count; i < n; ++i) {
    s += record.rows[i].est_error * record.rows[i].est_error;
  }
  EstimatorErrorStats out;
  out.mse_last_half = s / static_cast<double>(count);
  out.ratio = record.config.sample_variance > 0.0
                  ? out.mse_last_half / record.config.sample_variance
                  : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace adastorm
