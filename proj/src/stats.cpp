#include "matchlab/stats.hpp"

#include <cmath>
#include <numeric>

#include "matchlab/error.hpp"

namespace matchlab {

double harmonic(std::int64_t n) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "harmonic(n) needs n >= 1");
  double sum = 0.0;
  for (std::int64_t k = n; k >= 1; --k) sum += 1.0 / static_cast<double>(k);
  return sum;
}

double geometric_rank_pmf_unbounded(std::int64_t n, std::int64_t k) {
  if (k < 1) return 0.0;
  const double p = 1.0 / harmonic(n);
  return p * std::pow(1.0 - p, static_cast<double>(k - 1));
}

double geometric_rank_pmf(std::int64_t n, std::int64_t k) {
  if (n < 1 || k < 1 || k > n) {
    throw Error(ErrorKind::invalid_argument,
                "rank " + std::to_string(k) + " outside 1.." + std::to_string(n));
  }
  return geometric_rank_pmf_unbounded(n, k);
}

double geometric_tail_mass(std::int64_t n) {
  return std::pow(1.0 - 1.0 / harmonic(n), static_cast<double>(n));
}

double expected_top_choice_count(std::int64_t n) {
  return static_cast<double>(n) / harmonic(n);
}

double poisson_indegree_pmf(std::int64_t n, std::int64_t k) {
  if (k < 0) return 0.0;
  const double lambda = harmonic(n);
  const double kd = static_cast<double>(k);
  return std::exp(-lambda + kd * std::log(lambda) - std::lgamma(kd + 1.0));
}

double tv_distance(std::span<const double> counts,
                   const std::function<double(std::int64_t)>& pmf) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (counts.empty() || total <= 0.0) {
    throw Error(ErrorKind::invalid_argument, "empty histogram");
  }
  double distance = 0.0;
  double covered = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double p = pmf(static_cast<std::int64_t>(k));
    covered += p;
    distance += std::abs(counts[k] / total - p);
  }
  distance += std::max(0.0, 1.0 - covered);
  return 0.5 * distance;
}

double tv_distance(std::span<const double> counts, std::span<const double> pmf) {
  return tv_distance(counts, [&](std::int64_t k) {
    return k < static_cast<std::int64_t>(pmf.size()) ? pmf[k] : 0.0;
  });
}

SampleSummary summarize_sample(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorKind::invalid_argument, "cannot summarize an empty sample");
  }
  SampleSummary s;
  s.count = static_cast<std::int64_t>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.count - 1));
    s.se = s.sd / std::sqrt(static_cast<double>(s.count));
  }
  s.ci_low = s.mean - 1.959963984540054 * s.se;
  s.ci_high = s.mean + 1.959963984540054 * s.se;
  return s;
}

}  // namespace matchlab
