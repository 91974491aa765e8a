#include <doctest.h>

#include <algorithm>

#include "matchlab/envy.hpp"
#include "matchlab/error.hpp"
#include "matchlab/mechanisms.hpp"
#include "support.hpp"

using namespace matchlab;
using matchlab::testing::distinct_top_choice;
using matchlab::testing::k3;
using matchlab::testing::random_problem;

namespace {

EnvyDigraph random_digraph(Rng& rng, std::int32_t n, double density) {
  std::vector<std::vector<StudentId>> out(n);
  for (StudentId i = 0; i < n; ++i) {
    for (StudentId j = 0; j < n; ++j) {
      if (i != j && uniform_unit(rng) < density) out[i].push_back(j);
    }
  }
  return EnvyDigraph(n, out);
}

std::vector<std::vector<char>> reachability(const EnvyDigraph& g) {
  const auto n = g.node_count();
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (StudentId i = 0; i < n; ++i) {
    reach[i][i] = 1;
    for (const StudentId j : g.out_neighbors(i)) reach[i][j] = 1;
  }
  for (StudentId k = 0; k < n; ++k)
    for (StudentId i = 0; i < n; ++i)
      if (reach[i][k])
        for (StudentId j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = 1;
  return reach;
}

EnvyDigraph cycle_graph(std::int32_t n) {
  std::vector<std::vector<StudentId>> out(n);
  for (StudentId i = 0; i < n; ++i) out[i] = {(i + 1) % n};
  return EnvyDigraph(n, out);
}

}  // namespace

TEST_CASE("K3 envy digraphs") {
  const auto p = k3();
  const auto da = build_envy_digraph(p, Matching({0, 1, 2}, 3));
  CHECK(da.to_edge_list() == "0 1\n1 0\n2 0\n2 1\n");
  CHECK(da.edge_count() == 4);
  const auto after = build_envy_digraph(p, Matching({1, 0, 2}, 3));
  CHECK(after.to_edge_list() == "2 0\n2 1\n");
  CHECK(is_acyclic_without(after, {}));

  const auto distinct = distinct_top_choice(5);
  CHECK(build_envy_digraph(distinct, da_rounds(distinct).matching).edge_count() == 0);
}

TEST_CASE("digraph construction checks its input") {
  CHECK_THROWS_AS(EnvyDigraph(2, {{1}, {1}}), Error);
  CHECK_THROWS_AS(EnvyDigraph(2, {{2}, {}}), Error);
  const EnvyDigraph g(3, {{2, 1, 2}, {}, {0}});
  CHECK(g.out_degree(0) == 2);
  CHECK(g.in_degree(2) == 1);
  CHECK(g.has_edge(2, 0));
  CHECK_FALSE(g.has_edge(0, 0));
}

TEST_CASE("out-degree equals rank minus one under complete lists") {
  Rng rng(30);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int32_t n = 1 + static_cast<std::int32_t>(uniform_below(rng, 40));
    Problem p = random_problem(rng, {n, n, 1, false, false});
    if (p.student_count != p.school_count()) continue;
    const auto m = da_rounds(p).matching;
    const auto g = build_envy_digraph(p, m);
    for (StudentId i = 0; i < p.student_count; ++i) {
      CHECK(g.out_degree(i) == rank(p, i, m[i]) - 1);
    }
  }
}

TEST_CASE("strongly connected components") {
  const auto k3_scc = strongly_connected_components(
      build_envy_digraph(k3(), Matching({0, 1, 2}, 3)));
  CHECK(k3_scc.component[0] == k3_scc.component[1]);
  CHECK(k3_scc.component[2] != k3_scc.component[0]);
  CHECK(k3_scc.sizes == std::vector<std::int32_t>{2, 1});
  CHECK(k3_scc.largest_fraction() == doctest::Approx(2.0 / 3.0));

  const auto empty = strongly_connected_components(EnvyDigraph(4, {{}, {}, {}, {}}));
  CHECK(empty.component_count() == 4);
  const auto five = strongly_connected_components(cycle_graph(5));
  CHECK(five.sizes == std::vector<std::int32_t>{5});
  CHECK(five.largest_fraction() == 1.0);
}

TEST_CASE("Tarjan agrees with mutual reachability") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::int32_t n = 1 + static_cast<std::int32_t>(uniform_below(rng, 25));
    const auto g = random_digraph(rng, n, uniform_unit(rng) * 0.2);
    const auto scc = strongly_connected_components(g);
    const auto reach = reachability(g);
    for (StudentId i = 0; i < n; ++i) {
      for (StudentId j = 0; j < n; ++j) {
        CHECK((scc.component[i] == scc.component[j]) ==
              (reach[i][j] && reach[j][i]));
      }
    }
    std::int32_t total = 0;
    for (const auto s : scc.sizes) total += s;
    CHECK(total == n);
    CHECK(std::is_sorted(scc.sizes.rbegin(), scc.sizes.rend()));
  }
}

TEST_CASE("classification on K3 and simple problems") {
  const auto p = k3();
  const Matching da({0, 1, 2}, 3);
  const auto cls = classify_students(p, da, build_envy_digraph(p, da));
  CHECK(cls.improvable() == std::vector<StudentId>{0, 1});
  CHECK(cls.unimprovable() == std::vector<StudentId>{2});
  CHECK(cls.tags[2].has(Tag::envied_by_nobody));
  CHECK(cls.tags[2].has(Tag::worst_ranked));
  CHECK_FALSE(cls.tags[2].has(Tag::envies_nobody));
  CHECK(cls.tags[0].empty());
  CHECK(cls.ne_count == 1);
  CHECK(cls.en_count == 0);

  const auto distinct = distinct_top_choice(4);
  const auto m = da_rounds(distinct).matching;
  const auto all = classify_students(distinct, m, build_envy_digraph(distinct, m));
  CHECK(all.unimprovable().size() == 4);
  CHECK(all.en_count == 4);
  for (const auto& tags : all.tags) CHECK(tags.has(Tag::envies_nobody));

  Problem truncated;
  truncated.student_count = 3;
  truncated.quotas = {1, 1};
  truncated.preferences = {{0, 1}, {1, 0}, {}};
  truncated.priorities = {{1, 0, 2}, {0, 1, 2}};
  const auto tm = da_rounds(truncated).matching;
  const auto tc = classify_students(truncated, tm, build_envy_digraph(truncated, tm));
  CHECK(tc.verdicts[2] == Verdict::unimprovable);
  CHECK(tc.tags[2].has(Tag::unassigned));
}

TEST_CASE("tagged students never sit on a cycle") {
  Rng rng(32);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = random_problem(rng, {15, 12, 2, true, true});
    const auto m = da_rounds(p).matching;
    const auto g = build_envy_digraph(p, m);
    const auto cls = classify_students(p, m, g);
    const auto packing = find_cycle_packing(g, static_cast<std::uint64_t>(trial));
    for (StudentId i = 0; i < p.student_count; ++i) {
      if (!cls.tags[i].has(Tag::unassigned) && !cls.tags[i].has(Tag::worst_ranked)) {
        continue;
      }
      CHECK(cls.verdicts[i] == Verdict::unimprovable);
      CHECK_FALSE(std::binary_search(packing.covered.begin(), packing.covered.end(), i));
    }
  }
}

TEST_CASE("walk reduction") {
  using W = std::vector<StudentId>;
  CHECK(reduce_cycle_to_trading_cycle(W{0, 1, 0}) == W{0, 1, 0});
  CHECK(reduce_cycle_to_trading_cycle(W{0, 1, 2, 0}) == W{0, 1, 2, 0});
  // a=0, b=1, c=2, d=3
  CHECK(reduce_cycle_to_trading_cycle(W{0, 1, 2, 1, 3, 0}) == W{0, 1, 3, 0});
  CHECK_THROWS_AS(reduce_cycle_to_trading_cycle(W{0, 1}), Error);
  CHECK_THROWS_AS(reduce_cycle_to_trading_cycle(W{0, 1, 2}), Error);

  const EnvyDigraph g(4, {{1}, {2, 3}, {1}, {0}});
  CHECK(reduce_cycle_to_trading_cycle(W{0, 1, 2, 1, 3, 0}, g) == W{0, 1, 3, 0});
  CHECK_THROWS_AS(reduce_cycle_to_trading_cycle(W{0, 2, 1, 3, 0}, g), Error);
}

TEST_CASE("reduced walks are simple cycles of the digraph") {
  Rng rng(33);
  for (int trial = 0; trial < 300; ++trial) {
    const std::int32_t n = 2 + static_cast<std::int32_t>(uniform_below(rng, 8));
    const auto g = random_digraph(rng, n, 0.5);
    // Random closed walk: wander, then stop once back at the start.
    const StudentId start = static_cast<StudentId>(uniform_below(rng, n));
    std::vector<StudentId> walk{start};
    for (int step = 0; step < 60; ++step) {
      const auto out = g.out_neighbors(walk.back());
      if (out.empty()) break;
      walk.push_back(out[uniform_below(rng, out.size())]);
      if (walk.back() == start) break;
    }
    if (walk.size() < 3 || walk.back() != start) continue;
    const auto cycle = reduce_cycle_to_trading_cycle(walk, g);
    CHECK(cycle.front() == cycle.back());
    CHECK(cycle.front() == start);
    std::vector<StudentId> nodes(cycle.begin(), cycle.end() - 1);
    std::sort(nodes.begin(), nodes.end());
    CHECK(std::adjacent_find(nodes.begin(), nodes.end()) == nodes.end());
    for (std::size_t k = 0; k + 1 < cycle.size(); ++k) {
      CHECK(g.has_edge(cycle[k], cycle[k + 1]));
    }
  }
}

TEST_CASE("cycle packing examples") {
  const auto p = k3();
  const Matching da({0, 1, 2}, 3);
  const auto g = build_envy_digraph(p, da);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto packing = find_cycle_packing(g, seed);
    REQUIRE(packing.cycles.size() == 1);
    CHECK(packing.covered == std::vector<StudentId>{0, 1});
    CHECK(packing.coverage() == doctest::Approx(2.0 / 3.0));
    CHECK(execute_trading_cycles(p, da, packing) == Matching({1, 0, 2}, 3));
  }

  const EnvyDigraph dag(3, {{1, 2}, {2}, {}});
  const auto none = find_cycle_packing(dag, 4);
  CHECK(none.cycles.empty());
  CHECK(none.coverage() == 0.0);
  CHECK(execute_trading_cycles(p, da, CyclePacking{{}, {}, 3}) == da);

  const EnvyDigraph pairs(4, {{1}, {0}, {3}, {2}});
  const auto both = find_cycle_packing(pairs, 5);
  CHECK(both.cycles.size() == 2);
  CHECK(both.coverage() == 1.0);
}

TEST_CASE("two disjoint K3 blocks trade both pairs") {
  const auto p = matchlab::testing::two_k3();
  const auto da = da_rounds(p).matching;
  CHECK(da == Matching({0, 1, 2, 3, 4, 5}, 6));
  const auto g = build_envy_digraph(p, da);
  const auto packing = find_cycle_packing(g, 1);
  CHECK(packing.covered == std::vector<StudentId>{0, 1, 3, 4});
  const auto traded = execute_trading_cycles(p, da, packing);
  CHECK(traded == Matching({1, 0, 2, 4, 3, 5}, 6));
  for (const StudentId i : {0, 1, 3, 4}) CHECK(rank(p, i, traded[i]) < rank(p, i, da[i]));
}

TEST_CASE("stale packings are rejected") {
  const auto p = k3();
  const Matching da({0, 1, 2}, 3);
  CHECK_THROWS_AS(execute_trading_cycles(p, da, CyclePacking{{{0, 2}}, {0, 2}, 3}), Error);
  CHECK_THROWS_AS(
      execute_trading_cycles(p, da, CyclePacking{{{0, 1}, {1, 0}}, {0, 1}, 3}), Error);
  CHECK_THROWS_AS(execute_trading_cycles(p, da, CyclePacking{{{0}}, {0}, 3}), Error);
  CHECK_THROWS_AS(execute_trading_cycles(p, da, CyclePacking{{{0, 1}}, {0, 1}, 4}), Error);
}

TEST_CASE("packings are disjoint, maximal and executable") {
  Rng rng(34);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_problem(rng, {40, 40, 2, trial % 2 == 1, false});
    const auto m = da_rounds(p).matching;
    const auto g = build_envy_digraph(p, m);
    const auto packing = find_cycle_packing(g, static_cast<std::uint64_t>(trial));
    std::vector<StudentId> seen;
    for (const auto& cycle : packing.cycles) {
      CHECK(cycle.size() >= 2);
      for (std::size_t k = 0; k < cycle.size(); ++k) {
        CHECK(g.has_edge(cycle[k], cycle[(k + 1) % cycle.size()]));
      }
      seen.insert(seen.end(), cycle.begin(), cycle.end());
    }
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    CHECK(seen == packing.covered);
    CHECK(is_acyclic_without(g, packing.covered));
    const auto traded = execute_trading_cycles(p, m, packing);
    const auto order = pareto_compare(p, traded, m);
    CHECK((order == ParetoOrder::dominates || order == ParetoOrder::equal));
  }
}

TEST_CASE("efficiency predicate") {
  const auto p = k3();
  CHECK(is_pareto_efficient(p, Matching({1, 0, 2}, 3)));
  CHECK_FALSE(is_pareto_efficient(p, Matching({0, 1, 2}, 3)));
  const auto distinct = distinct_top_choice(4);
  CHECK(is_pareto_efficient(distinct, da_rounds(distinct).matching));
  // An empty seat that someone wants makes the matching wasteful.
  CHECK_FALSE(is_pareto_efficient(p, Matching({kNullSchool, 0, 2}, 3)));
}

TEST_CASE("DA matchings are non-wasteful, so only cycles can improve them") {
  Rng rng(35);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_problem(rng, {20, 20, 3, true, true});
    const auto m = da_rounds(p).matching;
    const auto g = build_envy_digraph(p, m);
    CHECK(is_pareto_efficient(p, m) == is_acyclic_without(g, {}));
  }
}

TEST_CASE("repeated packing reaches an efficient matching") {
  Rng rng(36);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_problem(rng, {40, 40, 2, trial % 2 == 1, false});
    const auto m = da_rounds(p).matching;
    const auto run = pack_until_efficient(p, m, static_cast<std::uint64_t>(trial));
    CHECK(is_pareto_efficient(p, run.matching));
    std::vector<StudentId> improved;
    for (StudentId i = 0; i < p.student_count; ++i) {
      if (rank(p, i, run.matching[i]) < rank(p, i, m[i])) improved.push_back(i);
    }
    CHECK(improved == run.improved);
  }
}
