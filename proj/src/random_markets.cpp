#include "matchlab/random_markets.hpp"

#include <algorithm>
#include <deque>

#include "matchlab/error.hpp"
#include "matchlab/rng.hpp"

namespace matchlab {

const char* to_string(MarketModel model) noexcept {
  switch (model) {
    case MarketModel::uniform: return "uniform";
    case MarketModel::many_to_one: return "many-to-one";
    case MarketModel::tiered: return "tiered";
  }
  return "unknown";
}

void validate_market_config(const MarketConfig& config) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::invalid_config, what);
  };
  if (config.n < 1) fail("n must be at least 1");
  if (config.q < 1) fail("q must be at least 1");
  if (config.tiers < 1) fail("tier count must be at least 1");
  if (config.model != MarketModel::many_to_one && config.q != 1) {
    fail(std::string(to_string(config.model)) + " markets have quota 1");
  }
  if (config.model != MarketModel::tiered && config.tiers != 1) {
    fail("tiers apply to the tiered model only");
  }
  if (config.n % config.tiers != 0) {
    fail("tier count " + std::to_string(config.tiers) + " does not divide n=" +
         std::to_string(config.n));
  }
  if (static_cast<std::int64_t>(config.n) * config.q > INT32_MAX) {
    fail("market too large");
  }
}

namespace {

Problem make_shell(std::int32_t n, std::int32_t q) {
  Problem problem;
  problem.student_count = n * q;
  problem.quotas.assign(static_cast<std::size_t>(n), q);
  problem.preferences.resize(static_cast<std::size_t>(n) * q);
  problem.priorities.resize(static_cast<std::size_t>(n));
  return problem;
}

void draw_priorities(Problem& problem, Rng& rng) {
  for (auto& list : problem.priorities) {
    list = random_permutation<StudentId>(problem.student_count, rng);
  }
}

}  // namespace

Problem gen_many_to_one(std::int32_t n, std::int32_t q, std::uint64_t seed) {
  validate_market_config({MarketModel::many_to_one, n, q, 1, seed});
  Rng rng(seed);
  Problem problem = make_shell(n, q);
  for (auto& list : problem.preferences) {
    list = random_permutation<SchoolId>(n, rng);
  }
  draw_priorities(problem, rng);
  return problem;
}

Problem gen_uniform(std::int32_t n, std::uint64_t seed) {
  validate_market_config({MarketModel::uniform, n, 1, 1, seed});
  return gen_many_to_one(n, 1, seed);
}

Problem gen_tiered(std::int32_t n, std::int32_t tiers, std::uint64_t seed) {
  validate_market_config({MarketModel::tiered, n, 1, tiers, seed});
  Rng rng(seed);
  Problem problem = make_shell(n, 1);
  const std::int32_t tier_size = n / tiers;
  for (auto& list : problem.preferences) {
    list.reserve(static_cast<std::size_t>(n));
    for (std::int32_t t = 0; t < tiers; ++t) {
      for (const SchoolId s : random_permutation<SchoolId>(tier_size, rng)) {
        list.push_back(t * tier_size + s);
      }
    }
  }
  draw_priorities(problem, rng);
  return problem;
}

Problem generate(const MarketConfig& config) {
  validate_market_config(config);
  switch (config.model) {
    case MarketModel::uniform: return gen_uniform(config.n, config.seed);
    case MarketModel::many_to_one:
      return gen_many_to_one(config.n, config.q, config.seed);
    case MarketModel::tiered:
      return gen_tiered(config.n, config.tiers, config.seed);
  }
  throw Error(ErrorKind::invalid_config, "unknown market model");
}

LazyMarketRun lazy_da(const MarketConfig& config) {
  validate_market_config(config);
  if (config.model == MarketModel::tiered) {
    throw Error(ErrorKind::unsupported_model,
                "the lazy engine supports uniform and many-to-one markets");
  }
  const auto schools = static_cast<std::size_t>(config.n);
  const auto students = static_cast<std::size_t>(config.student_count());
  const auto quota = static_cast<std::size_t>(config.q);
  Rng rng(config.seed);

  struct Seat {
    StudentId student;
    double score;  // higher is better
  };
  std::vector<std::vector<SchoolId>> prefix(students);
  std::vector<std::vector<Seat>> held(schools);
  std::vector<SchoolId> assignment(students, kNullSchool);
  LazyMarketRun run;
  run.school_applications.assign(schools, 0);

  std::deque<StudentId> queue;
  for (std::size_t i = 0; i < students; ++i) queue.push_back(static_cast<StudentId>(i));
  while (!queue.empty()) {
    const StudentId i = queue.front();
    queue.pop_front();
    auto& applied = prefix[i];
    if (applied.size() == schools) continue;  // rejected everywhere
    SchoolId s;
    for (;;) {
      s = static_cast<SchoolId>(uniform_below(rng, schools));
      if (std::find(applied.begin(), applied.end(), s) == applied.end()) break;
      ++run.redundant_draws;
    }
    applied.push_back(s);
    ++run.school_applications[s];
    ++run.total_applications;
    const double score = uniform_unit(rng);
    auto& seats = held[s];
    if (seats.size() < quota) {
      seats.push_back({i, score});
      assignment[i] = s;
      continue;
    }
    auto worst = std::min_element(seats.begin(), seats.end(),
                                  [](const Seat& a, const Seat& b) {
                                    return a.score < b.score;
                                  });
    if (score > worst->score) {
      assignment[worst->student] = kNullSchool;
      queue.push_back(worst->student);
      *worst = {i, score};
      assignment[i] = s;
    } else {
      queue.push_back(i);
    }
  }

  run.matching = Matching(assignment, config.n);
  run.ranks.resize(students);
  run.student_applications.resize(students);
  std::vector<std::vector<StudentId>> out(students);
  for (std::size_t i = 0; i < students; ++i) {
    const auto& applied = prefix[i];
    run.student_applications[i] = static_cast<std::int64_t>(applied.size());
    run.peak_preference_entries += static_cast<std::int64_t>(applied.size());
    // The final school is the last one applied to; every earlier school
    // rejected i and is therefore envied through its holders.
    const bool matched = assignment[i] != kNullSchool;
    run.ranks[i] = static_cast<Rank>(applied.size()) + (matched ? 0 : 1);
    const std::size_t envied = matched ? applied.size() - 1 : applied.size();
    for (std::size_t k = 0; k < envied; ++k) {
      const auto holders = run.matching.students_at(applied[k]);
      out[i].insert(out[i].end(), holders.begin(), holders.end());
    }
  }
  run.digraph = EnvyDigraph(static_cast<std::int32_t>(students), std::move(out));
  return run;
}

}  // namespace matchlab
