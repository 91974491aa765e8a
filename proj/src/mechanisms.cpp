#include "matchlab/mechanisms.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "matchlab/error.hpp"
#include "matchlab/rng.hpp"

namespace matchlab {

ApplicationLog::ApplicationLog(std::int32_t students, std::int32_t schools)
    : student_counts_(static_cast<std::size_t>(students), 0),
      school_counts_(static_cast<std::size_t>(schools), 0) {}

void ApplicationLog::record(std::int64_t step, StudentId student,
                            SchoolId school, Outcome outcome, bool redundant) {
  events_.push_back({step, student, school, outcome, redundant});
  ++student_counts_[student];
  ++school_counts_[school];
  redundant_ += redundant ? 1 : 0;
}

void ApplicationLog::set_outcome(std::size_t event, Outcome outcome) {
  events_.at(event).outcome = outcome;
}

void ApplicationLog::append(const ApplicationLog& other,
                            std::int64_t step_offset) {
  for (const auto& e : other.events_) {
    record(e.step + step_offset, e.student, e.school, e.outcome, e.redundant);
  }
}

std::string ApplicationLog::to_csv() const {
  std::string out = "step,student,school,outcome\n";
  for (const auto& e : events_) {
    out += std::to_string(e.step) + ',' + std::to_string(e.student) + ',' +
           std::to_string(e.school) + ',' +
           (e.outcome == Outcome::tentatively_accepted ? "tentatively-accepted"
                                                       : "rejected") +
           '\n';
  }
  return out;
}

const char* to_string(Engine engine) noexcept {
  switch (engine) {
    case Engine::da_rounds: return "da";
    case Engine::da_sequential: return "da-sequential";
    case Engine::da_amnesiac: return "da-amnesiac";
    case Engine::eada: return "eada";
    case Engine::da_ttc: return "da-ttc";
  }
  return "unknown";
}

namespace {

void require_valid(const Problem& problem) {
  const auto violations = validate_problem(problem);
  if (!violations.empty()) {
    throw Error(ErrorKind::invalid_argument,
                "invalid problem: " + violations.front().code + " (" +
                    violations.front().detail + ")");
  }
}

/// Round-based DA restricted to active students and schools. Events are
/// appended to `log` with steps numbered from `step_offset + 1`.
std::vector<SchoolId> run_rounds(const Problem& problem, const RankTable& table,
                                 const std::vector<char>& student_active,
                                 const std::vector<char>& school_active,
                                 ApplicationLog& log, std::int64_t step_offset) {
  const auto n = static_cast<std::size_t>(problem.student_count);
  const auto m = static_cast<std::size_t>(problem.school_count());
  std::vector<SchoolId> assignment(n, kNullSchool);
  std::vector<std::size_t> next(n, 0);
  std::vector<std::size_t> event_of(n, 0);
  std::vector<std::int64_t> applied_in(n, 0);
  std::vector<std::vector<StudentId>> held(m);
  std::vector<std::vector<StudentId>> applicants(m);
  std::vector<SchoolId> touched;

  std::vector<StudentId> free;
  for (std::size_t i = 0; i < n; ++i) {
    if (student_active[i]) free.push_back(static_cast<StudentId>(i));
  }
  std::vector<StudentId> rejected;
  std::int64_t round = 0;
  while (!free.empty()) {
    ++round;
    for (const StudentId i : free) {
      const auto& list = problem.preferences[i];
      while (next[i] < list.size() && !school_active[list[next[i]]]) ++next[i];
      if (next[i] == list.size()) continue;
      const SchoolId s = list[next[i]++];
      if (applicants[s].empty()) touched.push_back(s);
      applicants[s].push_back(i);
      event_of[i] = log.events().size();
      applied_in[i] = round;
      log.record(step_offset + round, i, s, Outcome::tentatively_accepted);
    }
    std::sort(touched.begin(), touched.end());
    rejected.clear();
    for (const SchoolId s : touched) {
      auto& pool = held[s];
      pool.insert(pool.end(), applicants[s].begin(), applicants[s].end());
      applicants[s].clear();
      const auto quota = static_cast<std::size_t>(problem.quotas[s]);
      if (pool.size() > quota) {
        std::sort(pool.begin(), pool.end(), [&](StudentId a, StudentId b) {
          return table.priority_rank(s, a) < table.priority_rank(s, b);
        });
        for (std::size_t k = quota; k < pool.size(); ++k) {
          const StudentId r = pool[k];
          assignment[r] = kNullSchool;
          rejected.push_back(r);
          if (applied_in[r] == round) {
            log.set_outcome(event_of[r], Outcome::rejected);
          }
        }
        pool.resize(quota);
      }
      for (const StudentId a : pool) assignment[a] = s;
    }
    touched.clear();
    std::sort(rejected.begin(), rejected.end());
    free.swap(rejected);
  }
  return assignment;
}

std::vector<char> all_active(std::int32_t count) {
  return std::vector<char>(static_cast<std::size_t>(count), 1);
}

}  // namespace

MechanismResult da_rounds(const Problem& problem) {
  require_valid(problem);
  const RankTable table(problem);
  ApplicationLog log(problem.student_count, problem.school_count());
  auto assignment =
      run_rounds(problem, table, all_active(problem.student_count),
                 all_active(problem.school_count()), log, 0);
  return {Matching(std::move(assignment), problem.school_count()),
          std::move(log), Engine::da_rounds};
}

MechanismResult da_sequential(const Problem& problem, QueuePolicy policy) {
  require_valid(problem);
  const RankTable table(problem);
  const auto n = static_cast<std::size_t>(problem.student_count);
  const auto m = static_cast<std::size_t>(problem.school_count());
  ApplicationLog log(problem.student_count, problem.school_count());
  std::vector<SchoolId> assignment(n, kNullSchool);
  std::vector<std::size_t> next(n, 0);
  std::vector<std::vector<StudentId>> held(m);
  Rng rng(policy.seed);

  std::deque<StudentId> queue;
  for (std::size_t i = 0; i < n; ++i) queue.push_back(static_cast<StudentId>(i));
  auto pop = [&]() {
    StudentId i;
    switch (policy.kind) {
      case QueuePolicy::Kind::fifo:
        i = queue.front();
        queue.pop_front();
        break;
      case QueuePolicy::Kind::lifo:
        i = queue.back();
        queue.pop_back();
        break;
      case QueuePolicy::Kind::random:
      default: {
        const auto k = uniform_below(rng, queue.size());
        i = queue[k];
        queue[k] = queue.back();
        queue.pop_back();
        break;
      }
    }
    return i;
  };

  std::int64_t step = 0;
  while (!queue.empty()) {
    const StudentId i = pop();
    const auto& list = problem.preferences[i];
    if (next[i] == list.size()) continue;
    const SchoolId s = list[next[i]++];
    ++step;
    auto& pool = held[s];
    if (std::cmp_less(pool.size(), problem.quotas[s])) {
      pool.push_back(i);
      assignment[i] = s;
      log.record(step, i, s, Outcome::tentatively_accepted);
      continue;
    }
    auto worst = std::max_element(pool.begin(), pool.end(),
                                  [&](StudentId a, StudentId b) {
                                    return table.priority_rank(s, a) <
                                           table.priority_rank(s, b);
                                  });
    if (table.priority_rank(s, i) < table.priority_rank(s, *worst)) {
      const StudentId displaced = *worst;
      *worst = i;
      assignment[i] = s;
      assignment[displaced] = kNullSchool;
      queue.push_back(displaced);
      log.record(step, i, s, Outcome::tentatively_accepted);
    } else {
      queue.push_back(i);
      log.record(step, i, s, Outcome::rejected);
    }
  }
  return {Matching(std::move(assignment), problem.school_count()),
          std::move(log), Engine::da_sequential};
}

MechanismResult da_amnesiac(const Problem& problem, std::uint64_t seed) {
  require_valid(problem);
  const RankTable table(problem);
  const auto n = static_cast<std::size_t>(problem.student_count);
  const auto m = static_cast<std::size_t>(problem.school_count());
  ApplicationLog log(problem.student_count, problem.school_count());
  std::vector<SchoolId> assignment(n, kNullSchool);
  std::vector<std::size_t> visited(n, 0);
  std::vector<std::size_t> event_of(n, 0);
  std::vector<std::int64_t> applied_in(n, 0);
  std::vector<std::vector<StudentId>> held(m);
  std::vector<std::vector<StudentId>> applicants(m);
  std::vector<SchoolId> touched;
  Rng rng(seed);

  std::vector<StudentId> free(n);
  for (std::size_t i = 0; i < n; ++i) free[i] = static_cast<StudentId>(i);
  std::vector<StudentId> still_free;
  std::int64_t round = 0;
  while (!free.empty()) {
    ++round;
    still_free.clear();
    for (const StudentId i : free) {
      const auto& list = problem.preferences[i];
      if (visited[i] == list.size()) continue;  // rejected everywhere
      const auto draw = uniform_below(rng, list.size());
      if (draw < visited[i]) {
        // The drawn school is one that already rejected i; it rejects again.
        log.record(round, i, list[draw], Outcome::rejected, true);
        still_free.push_back(i);
        continue;
      }
      const SchoolId s = list[visited[i]++];
      if (applicants[s].empty()) touched.push_back(s);
      applicants[s].push_back(i);
      event_of[i] = log.events().size();
      applied_in[i] = round;
      log.record(round, i, s, Outcome::tentatively_accepted);
    }
    std::sort(touched.begin(), touched.end());
    for (const SchoolId s : touched) {
      auto& pool = held[s];
      pool.insert(pool.end(), applicants[s].begin(), applicants[s].end());
      applicants[s].clear();
      const auto quota = static_cast<std::size_t>(problem.quotas[s]);
      if (pool.size() > quota) {
        std::sort(pool.begin(), pool.end(), [&](StudentId a, StudentId b) {
          return table.priority_rank(s, a) < table.priority_rank(s, b);
        });
        for (std::size_t k = quota; k < pool.size(); ++k) {
          const StudentId r = pool[k];
          assignment[r] = kNullSchool;
          still_free.push_back(r);
          if (applied_in[r] == round) {
            log.set_outcome(event_of[r], Outcome::rejected);
          }
        }
        pool.resize(quota);
      }
      for (const StudentId a : pool) assignment[a] = s;
    }
    touched.clear();
    std::sort(still_free.begin(), still_free.end());
    free.swap(still_free);
  }
  return {Matching(std::move(assignment), problem.school_count()),
          std::move(log), Engine::da_amnesiac};
}

std::vector<SchoolId> under_demanded_schools(const Problem& problem,
                                             const Matching& matching) {
  const RankTable table(problem);
  std::vector<char> desired(static_cast<std::size_t>(problem.school_count()), 0);
  for (StudentId i = 0; i < problem.student_count; ++i) {
    const Rank own = table.student_rank(i, matching[i]);
    for (Rank k = 0; k + 1 < own; ++k) desired[problem.preferences[i][k]] = 1;
  }
  std::vector<SchoolId> out;
  for (SchoolId s = 0; s < problem.school_count(); ++s) {
    if (!desired[s]) out.push_back(s);
  }
  return out;
}

MechanismResult eada(const Problem& problem) {
  require_valid(problem);
  const RankTable table(problem);
  const auto n = static_cast<std::size_t>(problem.student_count);
  const auto m = static_cast<std::size_t>(problem.school_count());
  ApplicationLog log(problem.student_count, problem.school_count());
  std::vector<char> student_active(n, 1);
  std::vector<char> school_active(m, 1);
  std::vector<SchoolId> settled(n, kNullSchool);
  std::vector<char> desired(m);
  std::size_t remaining = n;

  while (remaining > 0) {
    const auto assignment = run_rounds(problem, table, student_active,
                                       school_active, log, log.last_step());
    std::fill(desired.begin(), desired.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!student_active[i]) continue;
      for (const SchoolId s : problem.preferences[i]) {
        if (s == assignment[i]) break;
        if (school_active[s]) desired[s] = 1;
      }
    }
    std::size_t settled_now = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!student_active[i]) continue;
      const SchoolId s = assignment[i];
      if (s == kNullSchool || !desired[s]) {
        settled[i] = s;
        student_active[i] = 0;
        ++settled_now;
      }
    }
    for (std::size_t s = 0; s < m; ++s) {
      if (school_active[s] && !desired[s]) school_active[s] = 0;
    }
    if (settled_now == 0) {
      // The last school to receive an application in DA never rejects
      // anyone, so some student is always settled.
      throw std::logic_error("eada: residual round settled no student");
    }
    remaining -= settled_now;
  }
  return {Matching(std::move(settled), problem.school_count()), std::move(log),
          Engine::eada};
}

MechanismResult da_ttc(const Problem& problem) {
  require_valid(problem);
  const RankTable table(problem);
  const auto n = static_cast<std::size_t>(problem.student_count);
  const auto m = static_cast<std::size_t>(problem.school_count());
  ApplicationLog log(problem.student_count, problem.school_count());
  const auto endowment =
      run_rounds(problem, table, all_active(problem.student_count),
                 all_active(problem.school_count()), log, 0);

  // Students still trading, and for each school the ascending list of its
  // remaining endowment holders (a cursor skips holders who already left).
  std::vector<char> trading(n, 0);
  std::vector<std::vector<StudentId>> holders(m);
  std::vector<std::size_t> holder_cursor(m, 0);
  std::vector<std::int32_t> holders_left(m, 0);
  std::vector<SchoolId> result(endowment);
  std::vector<StudentId> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (endowment[i] == kNullSchool) continue;
    trading[i] = 1;
    holders[endowment[i]].push_back(static_cast<StudentId>(i));
    ++holders_left[endowment[i]];
    active.push_back(static_cast<StudentId>(i));
  }
  auto first_holder = [&](SchoolId s) {
    auto& cursor = holder_cursor[s];
    while (!trading[holders[s][cursor]]) ++cursor;
    return holders[s][cursor];
  };

  std::vector<StudentId> points_to(n, -1);
  std::vector<std::int32_t> mark(n, 0);
  std::int32_t pass = 0;
  std::vector<StudentId> path;
  std::vector<StudentId> leaving;
  while (!active.empty()) {
    for (const StudentId i : active) {
      points_to[i] = i;
      for (const SchoolId s : problem.preferences[i]) {
        if (s == endowment[i]) break;
        if (holders_left[s] > 0) {
          points_to[i] = first_holder(s);
          break;
        }
      }
    }
    // Every node of a functional graph leads into exactly one cycle; walk
    // from each unvisited node and keep the cycles found.
    ++pass;
    const std::int32_t base = pass * 2;
    leaving.clear();
    for (const StudentId start : active) {
      if (mark[start] >= base) continue;
      path.clear();
      StudentId v = start;
      while (mark[v] < base) {
        mark[v] = base;
        path.push_back(v);
        v = points_to[v];
      }
      if (mark[v] == base) {
        // v is on the current path: the cycle is path[pos(v)..].
        const auto pos = std::find(path.begin(), path.end(), v);
        for (auto it = pos; it != path.end(); ++it) leaving.push_back(*it);
      }
      for (const StudentId u : path) mark[u] = base + 1;
    }
    for (const StudentId i : leaving) result[i] = endowment[points_to[i]];
    for (const StudentId i : leaving) {
      trading[i] = 0;
      --holders_left[endowment[i]];
    }
    std::erase_if(active, [&](StudentId i) { return !trading[i]; });
  }
  return {Matching(std::move(result), problem.school_count()), std::move(log),
          Engine::da_ttc};
}

}  // namespace matchlab
