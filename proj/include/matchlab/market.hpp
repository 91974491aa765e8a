#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace matchlab {

using StudentId = std::int32_t;
using SchoolId = std::int32_t;
using Rank = std::int32_t;

/// Unassigned students hold the null school. It is never listed in a
/// preference list and has no quota.
inline constexpr SchoolId kNullSchool = -1;

/// A school choice problem. School `s` is row `s` of `quotas` and
/// `priorities`; student `i` is row `i` of `preferences`.
///
/// Preference lists may be truncated: a school missing from a list is
/// unacceptable and ranks together with the null school.
struct Problem {
  std::int32_t student_count = 0;
  std::vector<std::int32_t> quotas;
  std::vector<std::vector<SchoolId>> preferences;  // most preferred first
  std::vector<std::vector<StudentId>> priorities;  // highest priority first

  std::int32_t school_count() const noexcept {
    return static_cast<std::int32_t>(quotas.size());
  }

  bool operator==(const Problem&) const = default;
};

/// Student-to-school assignment with a CSR inverse view (school to the
/// sorted list of its students).
class Matching {
 public:
  Matching() = default;

  /// Throws Error(index) if an entry is neither kNullSchool nor below
  /// `school_count`.
  Matching(std::vector<SchoolId> assignment, std::int32_t school_count);

  std::int32_t student_count() const noexcept {
    return static_cast<std::int32_t>(assignment_.size());
  }
  std::int32_t school_count() const noexcept { return school_count_; }

  SchoolId operator[](StudentId student) const { return assignment_[student]; }
  std::span<const SchoolId> assignment() const noexcept { return assignment_; }

  /// Students assigned to a real school, ascending.
  std::span<const StudentId> students_at(SchoolId school) const;
  std::span<const StudentId> unassigned() const noexcept { return unassigned_; }

  bool operator==(const Matching& other) const {
    return school_count_ == other.school_count_ &&
           assignment_ == other.assignment_;
  }

 private:
  std::vector<SchoolId> assignment_;
  std::int32_t school_count_ = 0;
  std::vector<std::int32_t> offsets_;
  std::vector<StudentId> holders_;
  std::vector<StudentId> unassigned_;
};

/// O(1) rank lookups for both sides of a problem. Costs
/// students x schools memory per side; built once per algorithm run.
class RankTable {
 public:
  explicit RankTable(const Problem& problem);

  /// 1-based; the null school and unlisted schools rank list length + 1.
  Rank student_rank(StudentId student, SchoolId school) const {
    if (school == kNullSchool) return list_length_[student] + 1;
    return student_rank_[static_cast<std::size_t>(student) * schools_ + school];
  }

  /// 1-based position of the student in the school's priority list.
  Rank priority_rank(SchoolId school, StudentId student) const {
    return priority_rank_[static_cast<std::size_t>(school) * students_ + student];
  }

  bool desires(StudentId student, SchoolId school, SchoolId current) const {
    return student_rank(student, school) < student_rank(student, current);
  }

 private:
  std::size_t students_;
  std::size_t schools_;
  std::vector<Rank> list_length_;
  std::vector<Rank> student_rank_;
  std::vector<Rank> priority_rank_;
};

/// rk_i(s). Linear in the student's list length; throws Error(index).
Rank rank(const Problem& problem, StudentId student, SchoolId school);

struct ProblemViolation {
  std::string code;  // e.g. "duplicate-preference", "incomplete-priority"
  std::string detail;
};

/// Every violated Problem invariant, in a deterministic order. Empty means
/// the problem is valid. Problems without students or schools are rejected.
std::vector<ProblemViolation> validate_problem(const Problem& problem);

/// Matching-vs-problem consistency: sizes, quotas, acceptability.
std::vector<ProblemViolation> validate_matching(const Problem& problem,
                                                const Matching& matching);

enum class ViolationKind { waste, priority };

struct StabilityViolation {
  ViolationKind kind;
  StudentId student;      // the student who desires `school`
  SchoolId school;
  StudentId violator;     // holder of `school` with lower priority; -1 for waste

  auto operator<=>(const StabilityViolation&) const = default;
};

struct StabilityReport {
  bool stable = true;
  std::vector<StabilityViolation> violations;  // sorted by student, school
};

StabilityReport is_stable(const Problem& problem, const Matching& matching);

enum class ParetoOrder {
  equal,
  dominates,
  weakly_dominates,
  dominated,
  weakly_dominated,
  incomparable,
};

const char* to_string(ParetoOrder order) noexcept;

/// Compares `mu` against `nu` by every student's rank.
ParetoOrder pareto_compare(const Problem& problem, const Matching& mu,
                           const Matching& nu);

}  // namespace matchlab
