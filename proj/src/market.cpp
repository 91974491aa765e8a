#include "matchlab/market.hpp"

#include <algorithm>
#include <tuple>
#include <utility>

#include "matchlab/error.hpp"

namespace matchlab {

Matching::Matching(std::vector<SchoolId> assignment, std::int32_t school_count)
    : assignment_(std::move(assignment)), school_count_(school_count) {
  if (school_count < 0) {
    throw Error(ErrorKind::index, "negative school count");
  }
  offsets_.assign(static_cast<std::size_t>(school_count) + 1, 0);
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    const SchoolId s = assignment_[i];
    if (s == kNullSchool) {
      unassigned_.push_back(static_cast<StudentId>(i));
      continue;
    }
    if (s < 0 || s >= school_count) {
      throw Error(ErrorKind::index, "student " + std::to_string(i) +
                                        " assigned to unknown school " +
                                        std::to_string(s));
    }
    ++offsets_[s + 1];
  }
  for (std::int32_t s = 0; s < school_count; ++s) offsets_[s + 1] += offsets_[s];
  holders_.resize(offsets_.back());
  std::vector<std::int32_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    const SchoolId s = assignment_[i];
    if (s != kNullSchool) holders_[cursor[s]++] = static_cast<StudentId>(i);
  }
}

std::span<const StudentId> Matching::students_at(SchoolId school) const {
  if (school < 0 || school >= school_count_) {
    throw Error(ErrorKind::index, "unknown school " + std::to_string(school));
  }
  return std::span<const StudentId>(holders_).subspan(
      offsets_[school], offsets_[school + 1] - offsets_[school]);
}

RankTable::RankTable(const Problem& problem)
    : students_(static_cast<std::size_t>(problem.student_count)),
      schools_(static_cast<std::size_t>(problem.school_count())) {
  list_length_.resize(students_);
  student_rank_.resize(students_ * schools_);
  priority_rank_.assign(students_ * schools_,
                        static_cast<Rank>(students_) + 1);
  for (std::size_t i = 0; i < students_; ++i) {
    const auto& list = problem.preferences[i];
    const Rank unlisted = static_cast<Rank>(list.size()) + 1;
    list_length_[i] = static_cast<Rank>(list.size());
    std::fill_n(student_rank_.begin() + i * schools_, schools_, unlisted);
    for (std::size_t k = 0; k < list.size(); ++k) {
      student_rank_[i * schools_ + list[k]] = static_cast<Rank>(k) + 1;
    }
  }
  for (std::size_t s = 0; s < schools_; ++s) {
    const auto& list = problem.priorities[s];
    for (std::size_t k = 0; k < list.size(); ++k) {
      priority_rank_[s * students_ + list[k]] = static_cast<Rank>(k) + 1;
    }
  }
}

Rank rank(const Problem& problem, StudentId student, SchoolId school) {
  if (student < 0 || student >= problem.student_count ||
      static_cast<std::size_t>(student) >= problem.preferences.size()) {
    throw Error(ErrorKind::index, "unknown student " + std::to_string(student));
  }
  if (school != kNullSchool && (school < 0 || school >= problem.school_count())) {
    throw Error(ErrorKind::index, "unknown school " + std::to_string(school));
  }
  const auto& list = problem.preferences[student];
  const auto it = std::find(list.begin(), list.end(), school);
  return static_cast<Rank>(it - list.begin()) + 1;
}

std::vector<ProblemViolation> validate_problem(const Problem& problem) {
  std::vector<ProblemViolation> out;
  auto add = [&](std::string code, std::string detail) {
    out.push_back({std::move(code), std::move(detail)});
  };
  const std::int32_t n = problem.student_count;
  const std::int32_t m = problem.school_count();
  if (n <= 0) add("no-students", "student count must be positive");
  if (m == 0) add("no-schools", "at least one school is required");
  for (std::int32_t s = 0; s < m; ++s) {
    if (problem.quotas[s] < 1) {
      add("nonpositive-quota", "school " + std::to_string(s));
    }
  }
  if (std::cmp_not_equal(problem.preferences.size(), std::max(n, 0))) {
    add("preference-count-mismatch",
        std::to_string(problem.preferences.size()) + " lists for " +
            std::to_string(n) + " students");
  }
  if (std::cmp_not_equal(problem.priorities.size(), m)) {
    add("priority-count-mismatch",
        std::to_string(problem.priorities.size()) + " lists for " +
            std::to_string(m) + " schools");
  }

  for (std::size_t i = 0; i < problem.preferences.size(); ++i) {
    std::vector<char> seen(static_cast<std::size_t>(std::max(m, 0)), 0);
    for (const SchoolId s : problem.preferences[i]) {
      const std::string where =
          "student " + std::to_string(i) + " school " + std::to_string(s);
      if (s == kNullSchool) {
        add("null-in-preference", where);
      } else if (s < 0 || s >= m) {
        add("school-out-of-range", where);
      } else if (seen[s]++) {
        add("duplicate-preference", where);
      }
    }
  }

  for (std::size_t s = 0; s < problem.priorities.size(); ++s) {
    std::vector<char> seen(static_cast<std::size_t>(std::max(n, 0)), 0);
    for (const StudentId i : problem.priorities[s]) {
      const std::string where =
          "school " + std::to_string(s) + " student " + std::to_string(i);
      if (i < 0 || i >= n) {
        add("student-out-of-range", where);
      } else if (seen[i]++) {
        add("duplicate-priority", where);
      }
    }
    const auto listed = std::count_if(seen.begin(), seen.end(),
                                      [](char c) { return c != 0; });
    if (listed != n) {
      add("incomplete-priority", "school " + std::to_string(s) + " ranks " +
                                     std::to_string(listed) + " of " +
                                     std::to_string(n) + " students");
    }
  }
  return out;
}

std::vector<ProblemViolation> validate_matching(const Problem& problem,
                                                const Matching& matching) {
  std::vector<ProblemViolation> out;
  if (matching.student_count() != problem.student_count ||
      matching.school_count() != problem.school_count()) {
    out.push_back({"shape-mismatch", "matching does not fit the problem"});
    return out;
  }
  for (SchoolId s = 0; s < problem.school_count(); ++s) {
    const auto held = matching.students_at(s).size();
    if (std::cmp_greater(held, problem.quotas[s])) {
      out.push_back({"over-quota", "school " + std::to_string(s) + " holds " +
                                       std::to_string(held)});
    }
  }
  for (StudentId i = 0; i < problem.student_count; ++i) {
    const SchoolId s = matching[i];
    if (s == kNullSchool) continue;
    const auto& list = problem.preferences[i];
    if (std::find(list.begin(), list.end(), s) == list.end()) {
      out.push_back({"unacceptable-assignment",
                     "student " + std::to_string(i) + " school " +
                         std::to_string(s)});
    }
  }
  return out;
}

StabilityReport is_stable(const Problem& problem, const Matching& matching) {
  StabilityReport report;
  if (problem.student_count == 0) return report;
  const RankTable table(problem);
  for (StudentId i = 0; i < problem.student_count; ++i) {
    const SchoolId own = matching[i];
    const Rank own_rank = table.student_rank(i, own);
    // Only schools strictly above the current seat can be desired.
    for (Rank k = 0; k + 1 < own_rank; ++k) {
      const SchoolId s = problem.preferences[i][k];
      const auto holders = matching.students_at(s);
      if (std::cmp_less(holders.size(), problem.quotas[s])) {
        report.violations.push_back({ViolationKind::waste, i, s, -1});
      }
      for (const StudentId j : holders) {
        if (table.priority_rank(s, i) < table.priority_rank(s, j)) {
          report.violations.push_back({ViolationKind::priority, i, s, j});
        }
      }
    }
  }
  std::sort(report.violations.begin(), report.violations.end(),
            [](const StabilityViolation& a, const StabilityViolation& b) {
              return std::tie(a.student, a.school, a.kind, a.violator) <
                     std::tie(b.student, b.school, b.kind, b.violator);
            });
  report.stable = report.violations.empty();
  return report;
}

const char* to_string(ParetoOrder order) noexcept {
  switch (order) {
    case ParetoOrder::equal: return "equal";
    case ParetoOrder::dominates: return "dominates";
    case ParetoOrder::weakly_dominates: return "weakly-dominates";
    case ParetoOrder::dominated: return "dominated";
    case ParetoOrder::weakly_dominated: return "weakly-dominated";
    case ParetoOrder::incomparable: return "incomparable";
  }
  return "unknown";
}

ParetoOrder pareto_compare(const Problem& problem, const Matching& mu,
                           const Matching& nu) {
  if (mu.student_count() != problem.student_count ||
      nu.student_count() != problem.student_count) {
    throw Error(ErrorKind::invalid_argument,
                "matchings do not fit the problem");
  }
  bool some_better = false;
  bool some_worse = false;
  for (StudentId i = 0; i < problem.student_count; ++i) {
    const Rank a = rank(problem, i, mu[i]);
    const Rank b = rank(problem, i, nu[i]);
    some_better |= a < b;
    some_worse |= a > b;
  }
  if (some_better && some_worse) return ParetoOrder::incomparable;
  if (some_better) return ParetoOrder::dominates;
  if (some_worse) return ParetoOrder::dominated;
  // Identical ranks but different seats can only arise between unacceptable
  // schools and the null school, which matchings never use.
  return mu == nu ? ParetoOrder::equal : ParetoOrder::weakly_dominates;
}

}  // namespace matchlab
