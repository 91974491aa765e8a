#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matchlab/market.hpp"

namespace matchlab {

enum class Outcome { tentatively_accepted, rejected };

struct Application {
  std::int64_t step;   // round number for round engines, event index otherwise
  StudentId student;
  SchoolId school;
  Outcome outcome;
  bool redundant;      // re-application to a school that already rejected
                       // the student (amnesiac engines only)
};

/// Every application an engine made, with per-student and per-school
/// totals kept in step with the event list.
class ApplicationLog {
 public:
  ApplicationLog() = default;
  ApplicationLog(std::int32_t students, std::int32_t schools);

  void record(std::int64_t step, StudentId student, SchoolId school,
              Outcome outcome, bool redundant = false);
  /// Rewrites the outcome of an already recorded event.
  void set_outcome(std::size_t event, Outcome outcome);
  void append(const ApplicationLog& other, std::int64_t step_offset);

  const std::vector<Application>& events() const noexcept { return events_; }
  const std::vector<std::int64_t>& student_counts() const noexcept {
    return student_counts_;
  }
  const std::vector<std::int64_t>& school_counts() const noexcept {
    return school_counts_;
  }
  std::int64_t total() const noexcept {
    return static_cast<std::int64_t>(events_.size());
  }
  std::int64_t redundant_total() const noexcept { return redundant_; }
  std::int64_t last_step() const noexcept {
    return events_.empty() ? 0 : events_.back().step;
  }

  /// "step,student,school,outcome" lines with a header row.
  std::string to_csv() const;

 private:
  std::vector<Application> events_;
  std::vector<std::int64_t> student_counts_;
  std::vector<std::int64_t> school_counts_;
  std::int64_t redundant_ = 0;
};

enum class Engine { da_rounds, da_sequential, da_amnesiac, eada, da_ttc };

const char* to_string(Engine engine) noexcept;

struct MechanismResult {
  Matching matching;
  ApplicationLog log;
  Engine engine;
};

/// Order in which the sequential engine serves free students.
struct QueuePolicy {
  enum class Kind { fifo, lifo, random };
  Kind kind = Kind::fifo;
  std::uint64_t seed = 0;

  static QueuePolicy fifo() { return {Kind::fifo, 0}; }
  static QueuePolicy lifo() { return {Kind::lifo, 0}; }
  static QueuePolicy random(std::uint64_t seed) { return {Kind::random, seed}; }
};

/// Student-proposing deferred acceptance, one round at a time: every free
/// student applies to the next school on their list, then every school keeps
/// its best applicants up to quota. Ties in processing order go to the lower
/// student index.
MechanismResult da_rounds(const Problem& problem);

/// McVitie-Wilson: one application per step from a queue of free students.
/// The matching does not depend on the queue discipline.
MechanismResult da_sequential(const Problem& problem, QueuePolicy policy);

/// Round-based DA where a free student's next application goes to a
/// uniformly random school on their list, re-applying to schools that already
/// rejected them. A fresh draw is coupled to the next unvisited school on the
/// list, so the realized preference order is the problem's own and the
/// matching equals da_rounds.
MechanismResult da_amnesiac(const Problem& problem, std::uint64_t seed = 0);

/// Schools no student desires at `matching`, ascending.
std::vector<SchoolId> under_demanded_schools(const Problem& problem,
                                             const Matching& matching);

/// Efficiency-adjusted DA (full consent): rerun DA on the residual market,
/// settle unassigned students and students at under-demanded schools, remove
/// them together with those schools, repeat.
MechanismResult eada(const Problem& problem);

/// Top trading cycles with DA seats as endowments. Students only point to
/// holders of schools they weakly prefer to their endowment.
MechanismResult da_ttc(const Problem& problem);

}  // namespace matchlab
