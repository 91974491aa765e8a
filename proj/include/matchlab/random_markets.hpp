#pragma once

#include <cstdint>
#include <vector>

#include "matchlab/envy.hpp"
#include "matchlab/market.hpp"
#include "matchlab/mechanisms.hpp"

namespace matchlab {

enum class MarketModel { uniform, many_to_one, tiered };

const char* to_string(MarketModel model) noexcept;

struct MarketConfig {
  MarketModel model = MarketModel::uniform;
  std::int32_t n = 1;      // schools
  std::int32_t q = 1;      // quota per school; students = n * q
  std::int32_t tiers = 1;  // tiered model only; must divide n
  std::uint64_t seed = 0;

  std::int32_t student_count() const noexcept { return n * q; }
};

/// Throws Error(invalid_config) when counts are non-positive, when a
/// one-to-one model has q != 1, or when the tier count does not divide n.
void validate_market_config(const MarketConfig& config);

/// n students, n schools of quota one, independent uniform preference and
/// priority permutations. Same code path as gen_many_to_one(n, 1, seed).
Problem gen_uniform(std::int32_t n, std::uint64_t seed);
Problem gen_many_to_one(std::int32_t n, std::int32_t q, std::uint64_t seed);
/// Schools [t*n/c, (t+1)*n/c) form tier t; every list ranks all of tier t
/// above tier t+1 and is uniform within a tier.
Problem gen_tiered(std::int32_t n, std::int32_t tiers, std::uint64_t seed);
Problem generate(const MarketConfig& config);

/// Result of DA run on a market whose preferences and priorities are drawn
/// only as the algorithm touches them.
struct LazyMarketRun {
  Matching matching;
  EnvyDigraph digraph;
  std::vector<Rank> ranks;  // rank of each student's final school
  std::vector<std::int64_t> student_applications;  // distinct schools applied to
  std::vector<std::int64_t> school_applications;   // distinct applicants
  std::int64_t total_applications = 0;
  std::int64_t redundant_draws = 0;
  /// Entries held in realized preference prefixes at the end of the run.
  std::int64_t peak_preference_entries = 0;
};

/// Amnesiac DA on a uniform or many-to-one market. Each application targets
/// a uniformly random school; draws that repeat a school the student already
/// applied to are redrawn, so each student's distinct draws form a uniformly
/// random preference prefix. A school's priority over an applicant is an
/// independent uniform score drawn at first contact. Memory grows with the
/// number of applications, not with n^2. Throws Error(unsupported_model) for
/// the tiered model.
LazyMarketRun lazy_da(const MarketConfig& config);

}  // namespace matchlab
