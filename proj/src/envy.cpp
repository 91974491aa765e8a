#include "matchlab/envy.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "matchlab/error.hpp"
#include "matchlab/rng.hpp"

namespace matchlab {

EnvyDigraph::EnvyDigraph(std::int32_t node_count,
                         std::vector<std::vector<StudentId>> out_neighbors)
    : out_(std::move(out_neighbors)),
      in_degree_(static_cast<std::size_t>(node_count), 0) {
  if (std::cmp_not_equal(out_.size(), node_count)) {
    throw Error(ErrorKind::invalid_argument,
                "adjacency size does not match node count");
  }
  for (std::int32_t v = 0; v < node_count; ++v) {
    auto& list = out_[v];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    for (const StudentId w : list) {
      if (w < 0 || w >= node_count) {
        throw Error(ErrorKind::index, "edge endpoint " + std::to_string(w));
      }
      if (w == v) {
        throw Error(ErrorKind::invalid_argument,
                    "self-loop at " + std::to_string(v));
      }
      ++in_degree_[w];
    }
    edge_count_ += static_cast<std::int64_t>(list.size());
  }
}

bool EnvyDigraph::has_edge(StudentId from, StudentId to) const {
  const auto& list = out_.at(static_cast<std::size_t>(from));
  return std::binary_search(list.begin(), list.end(), to);
}

std::string EnvyDigraph::to_edge_list() const {
  std::string out;
  for (std::size_t v = 0; v < out_.size(); ++v) {
    for (const StudentId w : out_[v]) {
      out += std::to_string(v) + ' ' + std::to_string(w) + '\n';
    }
  }
  return out;
}

EnvyDigraph build_envy_digraph(const Problem& problem,
                               const Matching& matching) {
  std::vector<std::vector<StudentId>> out(
      static_cast<std::size_t>(problem.student_count));
  for (StudentId i = 0; i < problem.student_count; ++i) {
    for (const SchoolId s : problem.preferences[i]) {
      if (s == matching[i]) break;
      const auto holders = matching.students_at(s);
      out[i].insert(out[i].end(), holders.begin(), holders.end());
    }
  }
  return EnvyDigraph(problem.student_count, std::move(out));
}

double SccResult::largest_fraction() const {
  if (component.empty()) return 0.0;
  return static_cast<double>(sizes.front()) / static_cast<double>(component.size());
}

double SccResult::second_fraction() const {
  if (sizes.size() < 2) return 0.0;
  return static_cast<double>(sizes[1]) / static_cast<double>(component.size());
}

SccResult strongly_connected_components(const EnvyDigraph& digraph) {
  const auto n = static_cast<std::size_t>(digraph.node_count());
  std::vector<std::int32_t> index(n, -1);
  std::vector<std::int32_t> low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<StudentId> stack;
  std::vector<std::int32_t> raw(n, -1);
  std::int32_t raw_count = 0;
  std::int32_t counter = 0;

  struct Frame {
    StudentId node;
    std::size_t next;
  };
  std::vector<Frame> calls;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    calls.push_back({static_cast<StudentId>(root), 0});
    index[root] = low[root] = counter++;
    stack.push_back(static_cast<StudentId>(root));
    on_stack[root] = 1;
    while (!calls.empty()) {
      auto& frame = calls.back();
      const StudentId v = frame.node;
      const auto successors = digraph.out_neighbors(v);
      if (frame.next < successors.size()) {
        const StudentId w = successors[frame.next++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          calls.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        StudentId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          raw[w] = raw_count;
        } while (w != v);
        ++raw_count;
      }
      calls.pop_back();
      if (!calls.empty()) {
        const StudentId parent = calls.back().node;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }

  SccResult result;
  result.component.assign(n, -1);
  std::vector<std::int32_t> renumber(static_cast<std::size_t>(raw_count), -1);
  for (std::size_t v = 0; v < n; ++v) {
    auto& id = renumber[raw[v]];
    if (id == -1) {
      id = static_cast<std::int32_t>(result.size_by_id.size());
      result.size_by_id.push_back(0);
    }
    result.component[v] = id;
    ++result.size_by_id[id];
  }
  result.sizes = result.size_by_id;
  std::sort(result.sizes.begin(), result.sizes.end(), std::greater<>());
  return result;
}

const char* to_string(Tag tag) noexcept {
  switch (tag) {
    case Tag::envies_nobody: return "envies-nobody";
    case Tag::envied_by_nobody: return "envied-by-nobody";
    case Tag::unassigned: return "unassigned";
    case Tag::worst_ranked: return "worst-ranked";
  }
  return "unknown";
}

std::vector<Tag> TagSet::tags() const {
  std::vector<Tag> out;
  for (const Tag t : {Tag::envies_nobody, Tag::envied_by_nobody,
                      Tag::unassigned, Tag::worst_ranked}) {
    if (has(t)) out.push_back(t);
  }
  return out;
}

std::vector<StudentId> Classification::improvable() const {
  std::vector<StudentId> out;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (verdicts[i] == Verdict::improvable) out.push_back(static_cast<StudentId>(i));
  }
  return out;
}

std::vector<StudentId> Classification::unimprovable() const {
  std::vector<StudentId> out;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (verdicts[i] == Verdict::unimprovable) out.push_back(static_cast<StudentId>(i));
  }
  return out;
}

Classification classify_students(const Problem& problem,
                                 const Matching& matching,
                                 const EnvyDigraph& digraph) {
  return classify_students(problem, matching, digraph,
                           strongly_connected_components(digraph));
}

Classification classify_students(const Problem& problem,
                                 const Matching& matching,
                                 const EnvyDigraph& digraph,
                                 const SccResult& scc) {
  const auto n = static_cast<std::size_t>(problem.student_count);
  if (std::cmp_not_equal(digraph.node_count(), n) ||
      std::cmp_not_equal(matching.student_count(), n)) {
    throw Error(ErrorKind::invalid_argument,
                "digraph and matching must cover every student");
  }
  std::vector<char> desired(static_cast<std::size_t>(problem.school_count()), 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const SchoolId s : problem.preferences[i]) {
      if (s == matching[static_cast<StudentId>(i)]) break;
      desired[s] = 1;
    }
  }
  const bool some_under_demanded =
      std::find(desired.begin(), desired.end(), 0) != desired.end();

  Classification out;
  out.verdicts.resize(n);
  out.tags.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<StudentId>(k);
    const bool on_cycle = scc.size_by_id[scc.component[k]] >= 2;
    out.verdicts[k] = on_cycle ? Verdict::improvable : Verdict::unimprovable;
    out.improvable_count += on_cycle ? 1 : 0;
    auto& tags = out.tags[k];
    if (digraph.out_degree(i) == 0) {
      tags.add(Tag::envies_nobody);
      ++out.en_count;
    }
    if (digraph.in_degree(i) == 0) {
      tags.add(Tag::envied_by_nobody);
      ++out.ne_count;
    }
    const auto& list = problem.preferences[k];
    if (matching[i] == kNullSchool) {
      tags.add(Tag::unassigned);
    } else if (some_under_demanded &&
               std::cmp_equal(list.size(), problem.school_count()) &&
               matching[i] == list.back()) {
      tags.add(Tag::worst_ranked);
    }
  }
  return out;
}

std::vector<StudentId> reduce_cycle_to_trading_cycle(
    std::span<const StudentId> walk) {
  if (walk.size() < 2 || walk.front() != walk.back()) {
    throw Error(ErrorKind::malformed_input, "walk is not closed");
  }
  std::vector<StudentId> cycle(walk.begin(), walk.end());
  for (;;) {
    // Interior positions are 1 .. size-2; the closing copy of the start is
    // the last element.
    const std::size_t last = cycle.size() - 1;
    bool changed = false;
    for (std::size_t p = 1; p < last; ++p) {
      if (cycle[p] == cycle.front()) {
        // The start comes back early: the prefix is already a closed walk.
        cycle.resize(p + 1);
        changed = true;
        break;
      }
    }
    if (changed) continue;
    for (std::size_t p = 1; p < last && !changed; ++p) {
      for (std::size_t q = last - 1; q > p; --q) {
        if (cycle[q] == cycle[p]) {
          cycle.erase(cycle.begin() + static_cast<std::ptrdiff_t>(p) + 1,
                      cycle.begin() + static_cast<std::ptrdiff_t>(q) + 1);
          changed = true;
          break;
        }
      }
    }
    if (!changed) break;
  }
  if (cycle.size() < 3) {
    throw Error(ErrorKind::malformed_input, "walk reduces to a self-loop");
  }
  return cycle;
}

std::vector<StudentId> reduce_cycle_to_trading_cycle(
    std::span<const StudentId> walk, const EnvyDigraph& digraph) {
  for (std::size_t k = 0; k + 1 < walk.size(); ++k) {
    const StudentId a = walk[k];
    const StudentId b = walk[k + 1];
    if (a < 0 || a >= digraph.node_count() || b < 0 ||
        b >= digraph.node_count() || !digraph.has_edge(a, b)) {
      throw Error(ErrorKind::malformed_input,
                  "walk step " + std::to_string(a) + " -> " +
                      std::to_string(b) + " is not an edge");
    }
  }
  return reduce_cycle_to_trading_cycle(walk);
}

bool is_acyclic_without(const EnvyDigraph& digraph,
                        std::span<const StudentId> removed) {
  const auto n = static_cast<std::size_t>(digraph.node_count());
  std::vector<char> gone(n, 0);
  for (const StudentId v : removed) gone[v] = 1;
  std::vector<std::int32_t> indegree(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (gone[v]) continue;
    for (const StudentId w : digraph.out_neighbors(static_cast<StudentId>(v))) {
      if (!gone[w]) ++indegree[w];
    }
  }
  std::vector<StudentId> ready;
  std::size_t alive = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (gone[v]) continue;
    ++alive;
    if (indegree[v] == 0) ready.push_back(static_cast<StudentId>(v));
  }
  std::size_t peeled = 0;
  while (!ready.empty()) {
    const StudentId v = ready.back();
    ready.pop_back();
    ++peeled;
    for (const StudentId w : digraph.out_neighbors(v)) {
      if (!gone[w] && --indegree[w] == 0) ready.push_back(w);
    }
  }
  return peeled == alive;
}

CyclePacking find_cycle_packing(const EnvyDigraph& digraph, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(digraph.node_count());
  Rng rng(seed);
  const auto roots = random_permutation(static_cast<StudentId>(n), rng);
  std::vector<std::vector<StudentId>> adjacency(n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto out = digraph.out_neighbors(static_cast<StudentId>(v));
    adjacency[v].assign(out.begin(), out.end());
    shuffle(std::span<StudentId>(adjacency[v]), rng);
  }

  enum : char { white, gray, black, removed };
  std::vector<char> state(n, white);
  std::vector<std::size_t> stack_pos(n, 0);
  struct Frame {
    StudentId node;
    std::size_t next;
  };
  std::vector<Frame> stack;
  CyclePacking packing;
  packing.node_count = digraph.node_count();

  for (const StudentId root : roots) {
    if (state[root] != white) continue;
    state[root] = gray;
    stack_pos[root] = 0;
    stack.push_back({root, 0});
    while (!stack.empty()) {
      auto& frame = stack.back();
      const auto& out = adjacency[frame.node];
      if (frame.next == out.size()) {
        state[frame.node] = black;
        stack.pop_back();
        continue;
      }
      const StudentId w = out[frame.next++];
      if (state[w] == white) {
        state[w] = gray;
        stack_pos[w] = stack.size();
        stack.push_back({w, 0});
      } else if (state[w] == gray) {
        // Back edge closes the cycle w -> ... -> top -> w on the stack.
        auto& cycle = packing.cycles.emplace_back();
        for (std::size_t k = stack_pos[w]; k < stack.size(); ++k) {
          cycle.push_back(stack[k].node);
          state[stack[k].node] = removed;
        }
        stack.resize(stack_pos[w]);
      }
    }
  }

  for (const auto& cycle : packing.cycles) {
    packing.covered.insert(packing.covered.end(), cycle.begin(), cycle.end());
  }
  std::sort(packing.covered.begin(), packing.covered.end());
  if (!is_acyclic_without(digraph, packing.covered)) {
    throw std::logic_error("cycle packing left a cycle behind");
  }
  return packing;
}

Matching execute_trading_cycles(const Problem& problem, const Matching& matching,
                                const CyclePacking& packing) {
  const auto n = static_cast<std::size_t>(problem.student_count);
  if (matching.student_count() != problem.student_count ||
      packing.node_count != problem.student_count) {
    throw Error(ErrorKind::stale_packing, "packing does not fit the matching");
  }
  std::vector<char> used(n, 0);
  std::vector<SchoolId> next(matching.assignment().begin(),
                             matching.assignment().end());
  for (const auto& cycle : packing.cycles) {
    if (cycle.size() < 2) {
      throw Error(ErrorKind::stale_packing, "cycle shorter than two");
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      const StudentId i = cycle[k];
      const StudentId j = cycle[(k + 1) % cycle.size()];
      if (i < 0 || std::cmp_greater_equal(i, n) || j < 0 ||
          std::cmp_greater_equal(j, n)) {
        throw Error(ErrorKind::stale_packing, "cycle node out of range");
      }
      if (used[i]++) {
        throw Error(ErrorKind::stale_packing,
                    "student " + std::to_string(i) + " in two cycles");
      }
      if (rank(problem, i, matching[j]) >= rank(problem, i, matching[i])) {
        throw Error(ErrorKind::stale_packing,
                    "student " + std::to_string(i) + " does not envy " +
                        std::to_string(j));
      }
      next[i] = matching[j];
    }
  }
  return Matching(std::move(next), matching.school_count());
}

bool is_pareto_efficient(const Problem& problem, const Matching& matching) {
  for (StudentId i = 0; i < problem.student_count; ++i) {
    for (const SchoolId s : problem.preferences[i]) {
      if (s == matching[i]) break;
      if (std::cmp_less(matching.students_at(s).size(), problem.quotas[s])) {
        return false;
      }
    }
  }
  return is_acyclic_without(build_envy_digraph(problem, matching), {});
}

PackingRun pack_until_efficient(const Problem& problem, const Matching& start,
                                std::uint64_t seed) {
  PackingRun run{start, {}, 0};
  std::vector<char> improved(static_cast<std::size_t>(problem.student_count), 0);
  for (;;) {
    const auto digraph = build_envy_digraph(problem, run.matching);
    const auto packing = find_cycle_packing(
        digraph, derive_seed(seed, static_cast<std::uint64_t>(run.iterations)));
    if (packing.cycles.empty()) break;
    run.matching = execute_trading_cycles(problem, run.matching, packing);
    for (const StudentId i : packing.covered) improved[i] = 1;
    ++run.iterations;
  }
  for (std::size_t i = 0; i < improved.size(); ++i) {
    if (improved[i]) run.improved.push_back(static_cast<StudentId>(i));
  }
  return run;
}

}  // namespace matchlab
