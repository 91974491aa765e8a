#pragma once

#include <cstdint>
#include <vector>

#include "matchlab/market.hpp"

namespace matchlab {

/// Exhaustive ground truth for tiny instances. Nothing here calls into the
/// mechanisms or envy modules: stability, dominance and efficiency are
/// re-derived from the definitions by brute force.
inline constexpr std::int32_t kDefaultSizeGuard = 8;

/// Every capacity-respecting assignment (acceptable school or unassigned per
/// student) that has no waste and no priority violation. Throws
/// Error(too_large) above `size_guard` students.
std::vector<Matching> enumerate_stable(const Problem& problem,
                                       std::int32_t size_guard = kDefaultSizeGuard);

/// The stable matching every student weakly prefers to all other stable
/// matchings.
Matching oracle_student_optimal(const Problem& problem,
                                std::int32_t size_guard = kDefaultSizeGuard);

/// All Pareto-efficient matchings that weakly dominate `base`.
std::vector<Matching> enumerate_dominating_efficient(
    const Problem& problem, const Matching& base,
    std::int32_t size_guard = kDefaultSizeGuard);

/// Students who keep their student-optimal stable seat in every efficient
/// matching that weakly dominates it.
std::vector<StudentId> brute_unimprovable(
    const Problem& problem, std::int32_t size_guard = kDefaultSizeGuard);

struct OracleReport {
  std::vector<Matching> stable;
  Matching student_optimal;
  std::vector<Matching> dominating_efficient;
  std::vector<StudentId> unimprovable;
  std::int32_t size_guard = kDefaultSizeGuard;
};

OracleReport run_oracle(const Problem& problem,
                        std::int32_t size_guard = kDefaultSizeGuard);

/// Definition-level stability check used by the enumeration.
bool oracle_is_stable(const Problem& problem, const Matching& matching);

/// True iff `mu` gives every student a weakly better rank than `nu`.
bool oracle_weakly_dominates(const Problem& problem, const Matching& mu,
                             const Matching& nu);

}  // namespace matchlab
