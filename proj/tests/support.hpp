#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "matchlab/market.hpp"
#include "matchlab/rng.hpp"

namespace matchlab::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(MATCHLAB_TEST_DATA) / name;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Students i1, i2, i3 and schools s1, s2, s3 from the fixture become 0, 1, 2.
inline Problem k3() {
  Problem p;
  p.student_count = 3;
  p.quotas = {1, 1, 1};
  p.preferences = {{1, 0, 2}, {0, 1, 2}, {0, 1, 2}};
  p.priorities = {{0, 2, 1}, {1, 0, 2}, {0, 1, 2}};
  return p;
}

// Student i top-ranks school i, and school i gives student i top priority.
inline Problem distinct_top_choice(std::int32_t n) {
  Problem p;
  p.student_count = n;
  p.quotas.assign(n, 1);
  for (std::int32_t i = 0; i < n; ++i) {
    std::vector<SchoolId> list;
    for (std::int32_t k = 0; k < n; ++k) list.push_back((i + k) % n);
    p.preferences.push_back(list);
  }
  for (std::int32_t s = 0; s < n; ++s) {
    std::vector<StudentId> order;
    for (std::int32_t k = 0; k < n; ++k) order.push_back((s + k) % n);
    p.priorities.push_back(order);
  }
  return p;
}

// Two disjoint copies of K3: DA leaves the 2-cycles (0,1) and (3,4).
inline Problem two_k3() {
  Problem p;
  p.student_count = 6;
  p.quotas.assign(6, 1);
  p.preferences = {{1, 0, 2}, {0, 1, 2}, {0, 1, 2}, {4, 3, 5}, {3, 4, 5}, {3, 4, 5}};
  for (auto& list : p.preferences) {
    for (std::int32_t s = 0; s < 6; ++s) {
      if (std::find(list.begin(), list.end(), s) == list.end()) list.push_back(s);
    }
  }
  p.priorities = {{0, 2, 1, 3, 4, 5}, {1, 0, 2, 3, 4, 5}, {0, 1, 2, 3, 4, 5},
                  {3, 5, 4, 0, 1, 2}, {4, 3, 5, 0, 1, 2}, {3, 4, 5, 0, 1, 2}};
  return p;
}

struct Shape {
  std::int32_t max_students = 6;
  std::int32_t max_schools = 6;
  std::int32_t max_quota = 1;
  bool truncated = false;   // lists may stop early
  bool empty_lists = false; // some lists may be empty
};

inline Problem random_problem(Rng& rng, const Shape& shape) {
  Problem p;
  p.student_count = 1 + static_cast<std::int32_t>(uniform_below(rng, shape.max_students));
  const auto schools =
      1 + static_cast<std::int32_t>(uniform_below(rng, shape.max_schools));
  for (std::int32_t s = 0; s < schools; ++s) {
    p.quotas.push_back(1 + static_cast<std::int32_t>(uniform_below(rng, shape.max_quota)));
  }
  for (StudentId i = 0; i < p.student_count; ++i) {
    auto list = random_permutation<SchoolId>(schools, rng);
    if (shape.empty_lists && uniform_below(rng, 4) == 0) {
      list.clear();
    } else if (shape.truncated) {
      list.resize(1 + uniform_below(rng, static_cast<std::uint64_t>(schools)));
    }
    p.preferences.push_back(std::move(list));
  }
  for (std::int32_t s = 0; s < schools; ++s) {
    p.priorities.push_back(random_permutation<StudentId>(p.student_count, rng));
  }
  return p;
}

}  // namespace matchlab::testing
