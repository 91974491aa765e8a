#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace matchlab {

/// H_n = 1 + 1/2 + ... + 1/n, summed from the smallest term up.
double harmonic(std::int64_t n);

/// (1/H_n) (1 - 1/H_n)^(k-1): the large-market probability that a student
/// ends up at their k-th choice. Requires 1 <= k <= n.
double geometric_rank_pmf(std::int64_t n, std::int64_t k);

/// Same expression without the k <= n restriction (0 for k < 1).
double geometric_rank_pmf_unbounded(std::int64_t n, std::int64_t k);

/// Mass the geometric law puts beyond rank n.
double geometric_tail_mass(std::int64_t n);

/// n / H_n, the large-market number of students at their top choice.
double expected_top_choice_count(std::int64_t n);

/// e^{-H_n} H_n^k / k!, evaluated in log space. 0 for k < 0.
double poisson_indegree_pmf(std::int64_t n, std::int64_t k);

/// Total variation distance between a histogram (counts indexed by outcome
/// 0, 1, 2, ...) and a pmf over the same outcomes. Theoretical mass beyond
/// the histogram's last bin counts fully.
double tv_distance(std::span<const double> counts,
                   const std::function<double(std::int64_t)>& pmf);
double tv_distance(std::span<const double> counts, std::span<const double> pmf);

struct SampleSummary {
  std::int64_t count = 0;
  double mean = 0;
  double sd = 0;  // sample standard deviation (n - 1)
  double se = 0;
  double ci_low = 0;  // normal-approximation 95% interval
  double ci_high = 0;
};

/// Throws Error(invalid_argument) on an empty sample.
SampleSummary summarize_sample(std::span<const double> values);

}  // namespace matchlab
