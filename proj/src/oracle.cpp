#include "matchlab/oracle.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "matchlab/error.hpp"

namespace matchlab {
namespace {

void check_guard(const Problem& problem, std::int32_t size_guard) {
  if (problem.student_count > size_guard) {
    throw Error(ErrorKind::too_large,
                std::to_string(problem.student_count) +
                    " students exceed the oracle size guard of " +
                    std::to_string(size_guard));
  }
}

std::int32_t priority_position(const Problem& problem, SchoolId s, StudentId i) {
  const auto& list = problem.priorities[s];
  return static_cast<std::int32_t>(std::find(list.begin(), list.end(), i) -
                                   list.begin());
}

/// Calls `visit` with every capacity-respecting assignment in which student
/// i's school is drawn from options[i] (kNullSchool allowed).
void for_each_assignment(
    const Problem& problem,
    const std::vector<std::vector<SchoolId>>& options,
    const std::function<void(const std::vector<SchoolId>&)>& visit) {
  const auto n = static_cast<std::size_t>(problem.student_count);
  std::vector<SchoolId> assignment(n, kNullSchool);
  std::vector<std::int32_t> load(static_cast<std::size_t>(problem.school_count()), 0);
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (i == n) {
      visit(assignment);
      return;
    }
    for (const SchoolId s : options[i]) {
      if (s != kNullSchool) {
        if (load[s] == problem.quotas[s]) continue;
        ++load[s];
      }
      assignment[i] = s;
      walk(i + 1);
      if (s != kNullSchool) --load[s];
    }
    assignment[i] = kNullSchool;
  };
  walk(0);
}

bool strictly_dominates(const Problem& problem, const Matching& mu,
                        const Matching& nu) {
  bool strict = false;
  for (StudentId i = 0; i < problem.student_count; ++i) {
    const Rank a = rank(problem, i, mu[i]);
    const Rank b = rank(problem, i, nu[i]);
    if (a > b) return false;
    strict |= a < b;
  }
  return strict;
}

}  // namespace

bool oracle_is_stable(const Problem& problem, const Matching& matching) {
  for (StudentId i = 0; i < problem.student_count; ++i) {
    for (SchoolId s = 0; s < problem.school_count(); ++s) {
      const auto& list = problem.preferences[i];
      if (std::find(list.begin(), list.end(), s) == list.end()) continue;
      if (rank(problem, i, s) >= rank(problem, i, matching[i])) continue;
      std::int32_t load = 0;
      for (StudentId j = 0; j < problem.student_count; ++j) {
        if (matching[j] != s) continue;
        ++load;
        if (priority_position(problem, s, i) < priority_position(problem, s, j)) {
          return false;
        }
      }
      if (load < problem.quotas[s]) return false;
    }
  }
  return true;
}

bool oracle_weakly_dominates(const Problem& problem, const Matching& mu,
                             const Matching& nu) {
  for (StudentId i = 0; i < problem.student_count; ++i) {
    if (rank(problem, i, mu[i]) > rank(problem, i, nu[i])) return false;
  }
  return true;
}

std::vector<Matching> enumerate_stable(const Problem& problem,
                                       std::int32_t size_guard) {
  check_guard(problem, size_guard);
  std::vector<std::vector<SchoolId>> options(
      static_cast<std::size_t>(problem.student_count));
  for (std::size_t i = 0; i < options.size(); ++i) {
    options[i] = problem.preferences[i];
    options[i].push_back(kNullSchool);
  }
  std::vector<Matching> out;
  for_each_assignment(problem, options, [&](const std::vector<SchoolId>& a) {
    Matching candidate(a, problem.school_count());
    if (oracle_is_stable(problem, candidate)) out.push_back(std::move(candidate));
  });
  return out;
}

namespace {

Matching best_of(const Problem& problem, const std::vector<Matching>& stable) {
  for (const auto& candidate : stable) {
    const bool best = std::all_of(stable.begin(), stable.end(),
                                  [&](const Matching& other) {
                                    return oracle_weakly_dominates(
                                        problem, candidate, other);
                                  });
    if (best) return candidate;
  }
  throw std::logic_error("no student-optimal stable matching found");
}

}  // namespace

Matching oracle_student_optimal(const Problem& problem,
                                std::int32_t size_guard) {
  return best_of(problem, enumerate_stable(problem, size_guard));
}

std::vector<Matching> enumerate_dominating_efficient(const Problem& problem,
                                                     const Matching& base,
                                                     std::int32_t size_guard) {
  check_guard(problem, size_guard);
  // Only seats at least as good as the base seat; everything else would
  // already break weak dominance.
  std::vector<std::vector<SchoolId>> options(
      static_cast<std::size_t>(problem.student_count));
  for (std::size_t i = 0; i < options.size(); ++i) {
    const auto student = static_cast<StudentId>(i);
    for (const SchoolId s : problem.preferences[i]) {
      options[i].push_back(s);
      if (s == base[student]) break;
    }
    if (base[student] == kNullSchool) options[i].push_back(kNullSchool);
  }
  std::vector<Matching> dominating;
  for_each_assignment(problem, options, [&](const std::vector<SchoolId>& a) {
    dominating.emplace_back(a, problem.school_count());
  });
  // Anything that dominates a member also dominates the base, so checking
  // within the set is checking against the whole matching space.
  std::vector<Matching> out;
  for (const auto& mu : dominating) {
    const bool dominated = std::any_of(
        dominating.begin(), dominating.end(),
        [&](const Matching& nu) { return strictly_dominates(problem, nu, mu); });
    if (!dominated) out.push_back(mu);
  }
  return out;
}

std::vector<StudentId> brute_unimprovable(const Problem& problem,
                                          std::int32_t size_guard) {
  return run_oracle(problem, size_guard).unimprovable;
}

OracleReport run_oracle(const Problem& problem, std::int32_t size_guard) {
  OracleReport report;
  report.size_guard = size_guard;
  report.stable = enumerate_stable(problem, size_guard);
  report.student_optimal = best_of(problem, report.stable);
  report.dominating_efficient =
      enumerate_dominating_efficient(problem, report.student_optimal, size_guard);
  for (StudentId i = 0; i < problem.student_count; ++i) {
    const bool fixed = std::all_of(
        report.dominating_efficient.begin(), report.dominating_efficient.end(),
        [&](const Matching& mu) { return mu[i] == report.student_optimal[i]; });
    if (fixed) report.unimprovable.push_back(i);
  }
  return report;
}

}  // namespace matchlab
