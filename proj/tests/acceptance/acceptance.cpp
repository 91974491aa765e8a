// Runs every acceptance criterion of the library at its pinned tolerance and
// prints one PASS/FAIL line per criterion. Exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "matchlab/envy.hpp"
#include "matchlab/experiments.hpp"
#include "matchlab/mechanisms.hpp"
#include "matchlab/oracle.hpp"
#include "matchlab/random_markets.hpp"
#include "matchlab/stats.hpp"
#include "support.hpp"

using namespace matchlab;

namespace {

constexpr std::uint64_t kMasterSeed = 20240601;

struct Check {
  bool pass = true;
  std::string detail;
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

std::vector<ExperimentRecord> run(ExperimentKind kind, std::vector<std::int32_t> sizes,
                                  std::int32_t reps, std::int32_t q = 1,
                                  std::int32_t tiers = 1, std::int32_t packing_seeds = 10) {
  ExperimentConfig config;
  config.kind = kind;
  config.sizes = std::move(sizes);
  config.replications = reps;
  config.q = q;
  config.tiers = tiers;
  config.master_seed = kMasterSeed;
  config.packing_seeds = packing_seeds;
  return run_experiment(config);
}

SampleSummary field_at(const std::vector<ExperimentRecord>& records, std::int32_t n,
                       const std::string& field) {
  std::vector<double> values;
  for (const auto& r : records) {
    if (r.n == n) values.push_back(r.field(field));
  }
  return summarize_sample(values);
}

bool within_relative(double value, double target, double tolerance) {
  return std::abs(value - target) <= tolerance * std::abs(target);
}

// Small instances for the oracle corpora: seeded uniform markets plus random
// problems with truncated lists and quotas.
std::vector<Problem> oracle_corpus(std::size_t count, std::uint64_t seed) {
  std::vector<Problem> corpus;
  Rng rng(seed);
  for (std::size_t k = 0; corpus.size() < count; ++k) {
    if (k % 2 == 0) {
      corpus.push_back(gen_uniform(1 + static_cast<std::int32_t>(k / 2 % 6),
                                   derive_seed(seed, k)));
    } else {
      corpus.push_back(matchlab::testing::random_problem(rng, {6, 6, 2, true, false}));
    }
  }
  return corpus;
}

Check da_matches_oracle() {
  int checked = 0;
  for (std::uint64_t k = 0; k < 500; ++k) {
    const auto n = 1 + static_cast<std::int32_t>(k % 6);
    const auto p = gen_uniform(n, derive_seed(kMasterSeed, k));
    const auto da = da_rounds(p).matching;
    if (!is_stable(p, da).stable || !oracle_is_stable(p, da)) {
      return {false, "DA unstable on instance " + std::to_string(k)};
    }
    for (const auto& m : enumerate_stable(p)) {
      if (!oracle_weakly_dominates(p, da, m)) {
        return {false, "a stable matching beats DA on instance " + std::to_string(k)};
      }
    }
    ++checked;
  }
  return {true, std::to_string(checked) + " instances, DA stable and student-optimal"};
}

Check engines_agree() {
  Rng rng(derive_seed(kMasterSeed, 1));
  std::vector<QueuePolicy> policies = {QueuePolicy::fifo(), QueuePolicy::lifo()};
  for (std::uint64_t s = 1; policies.size() < 10; ++s) policies.push_back(QueuePolicy::random(s));
  for (int k = 0; k < 200; ++k) {
    const auto p =
        k % 2 == 0 ? gen_many_to_one(1 + k % 50, 1 + k % 3, derive_seed(kMasterSeed, k))
                   : matchlab::testing::random_problem(rng, {50, 50, 3, true, k % 4 == 1});
    if (p.student_count > 50 * 3) return {false, "corpus instance too large"};
    const auto reference = da_rounds(p).matching;
    for (const auto& policy : policies) {
      if (da_sequential(p, policy).matching != reference) {
        return {false, "sequential DA differs on instance " + std::to_string(k)};
      }
    }
    if (da_amnesiac(p, static_cast<std::uint64_t>(k)).matching != reference) {
      return {false, "amnesiac DA differs on instance " + std::to_string(k)};
    }
  }
  return {true, "200 instances x 12 engines identical"};
}

Check prop1_oracle() {
  const auto corpus = oracle_corpus(300, derive_seed(kMasterSeed, 2));
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& p = corpus[k];
    const auto da = da_rounds(p).matching;
    const auto cls = classify_students(p, da, build_envy_digraph(p, da));
    if (cls.unimprovable() != brute_unimprovable(p)) {
      return {false, "disagreement on instance " + std::to_string(k)};
    }
  }
  return {true, "300 instances, SCC membership = brute-force improvable set"};
}

Check prop2_preservation() {
  auto corpus = oracle_corpus(300, derive_seed(kMasterSeed, 2));
  Rng rng(derive_seed(kMasterSeed, 3));
  for (int k = 0; k < 100; ++k) {
    auto p = matchlab::testing::random_problem(rng, {8, 6, 2, true, false});
    p.preferences[uniform_below(rng, p.preferences.size())].clear();
    corpus.push_back(std::move(p));
  }
  int tagged = 0;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& p = corpus[k];
    const auto da = da_rounds(p).matching;
    const auto cls = classify_students(p, da, build_envy_digraph(p, da));
    const auto a = eada(p).matching;
    const auto t = da_ttc(p).matching;
    for (StudentId i = 0; i < p.student_count; ++i) {
      if (!cls.tags[i].has(Tag::unassigned) && !cls.tags[i].has(Tag::worst_ranked)) continue;
      ++tagged;
      if (a[i] != da[i] || t[i] != da[i]) {
        return {false, "student " + std::to_string(i) + " moved on instance " +
                           std::to_string(k)};
      }
    }
  }
  return {true, std::to_string(corpus.size()) + " instances, " + std::to_string(tagged) +
                    " tagged students keep their seat"};
}

Check prop3_envied_by_nobody(const std::vector<ExperimentRecord>& records) {
  Check v;
  for (const std::int32_t n : {10, 50, 100, 200}) {
    const auto s = field_at(records, n, "ne");
    const double target = harmonic(n);
    const bool ok = std::abs(s.mean - target) <= 3 * s.se;
    v.pass = v.pass && ok;
    v.detail += "n=" + std::to_string(n) + " mean " + fmt(s.mean) + " vs " + fmt(target) +
                " (3se " + fmt(3 * s.se, 3) + ") ";
  }
  return v;
}

Check cor1_envies_nobody(const std::vector<ExperimentRecord>& large,
                           const std::vector<ExperimentRecord>& small) {
  const auto big = field_at(large, 1000, "en");
  const auto hundred = field_at(small, 100, "en");
  const double big_target = expected_top_choice_count(1000);
  const double small_target = expected_top_choice_count(100);  // 19.28
  const bool ok = within_relative(big.mean, big_target, 0.05) &&
                  within_relative(hundred.mean, small_target, 0.05);
  return {ok, "n=1000 mean " + fmt(big.mean) + " vs " + fmt(big_target) + "; n=100 mean " +
                  fmt(hundred.mean) + " vs " + fmt(small_target) + " (5%)"};
}

Check pooled_fit(const std::vector<ExperimentRecord>& records, bool rank_law) {
  const auto pooled = pooled_histogram(records, 1000);
  const double tv = rank_law ? rank_fit(pooled, 1000) : indegree_fit(pooled, 1000);
  return {tv < 0.05, "pooled TV " + fmt(tv) + " (bar 0.05)"};
}

Check application_totals(const std::vector<ExperimentRecord>& records) {
  const auto s = field_at(records, 1000, "total_applications");
  const double target = 1000 * harmonic(1000);
  return {within_relative(s.mean, target, 0.05),
          "mean " + fmt(s.mean, 6) + " vs " + fmt(target, 6) + " (5%)"};
}

Check thm1_giant_component(const std::vector<ExperimentRecord>& records) {
  int good = 0;
  int total = 0;
  for (const auto& r : records) {
    if (r.n != 1000) continue;
    ++total;
    good += r.field("largest_fraction") > 0.7 && r.field("second_fraction") < 0.05;
  }
  const double share = static_cast<double>(good) / total;
  std::vector<double> means;
  for (const std::int32_t n : {100, 300, 1000}) {
    means.push_back(field_at(records, n, "largest_fraction").mean);
  }
  const bool increasing = means[0] < means[1] && means[1] < means[2];
  return {share >= 0.95 && increasing,
          "n=1000 giant share " + fmt(share) + " (bar 0.95); largest mean " + fmt(means[0]) +
              " < " + fmt(means[1]) + " < " + fmt(means[2])};
}

Check packing_equivalence(const std::vector<ExperimentRecord>& records, std::int32_t n,
                            std::int32_t q, double spread_bar, bool compare_mechanisms) {
  double worst_spread = 0;
  for (const auto& r : records) worst_spread = std::max(worst_spread, r.field("coverage_spread"));
  std::string detail = "max spread " + fmt(worst_spread) + " (bar " + fmt(spread_bar) + ")";
  bool ok = worst_spread < spread_bar;
  if (compare_mechanisms) {
    const double students = static_cast<double>(n) * q;
    const double eada_mean = field_at(records, n, "eada_improved").mean;
    const double ttc_mean = field_at(records, n, "ttc_improved").mean;
    const double packed = field_at(records, n, "coverage_mean").mean * students;
    const std::vector<double> v{eada_mean, ttc_mean, packed};
    double gap = 0;
    for (std::size_t a = 0; a < v.size(); ++a) {
      for (std::size_t b = 0; b < v.size(); ++b) {
        gap = std::max(gap, std::abs(v[a] - v[b]) / std::max(v[a], v[b]));
      }
    }
    ok = ok && gap <= 0.02;
    detail += "; improved EADA " + fmt(eada_mean) + ", DA+TTC " + fmt(ttc_mean) +
              ", packing " + fmt(packed) + ", max relative gap " + fmt(gap) + " (bar 0.02)";
  }
  return {ok, detail};
}

Check many_to_one() {
  Check v;
  for (const auto [n, q] : {std::pair{40, 5}, std::pair{20, 10}}) {
    const auto scc = run(ExperimentKind::scc_fractions, {n}, 200, q);
    double worst_second = 0;
    for (const auto& r : scc) worst_second = std::max(worst_second, r.field("second_fraction"));
    const auto packing = run(ExperimentKind::packing_equivalence, {n}, 200, q);
    const auto spread = packing_equivalence(packing, n, q, 0.03, false);
    const bool ok = worst_second < 0.05 && spread.pass;
    v.pass = v.pass && ok;
    v.detail += "n=" + std::to_string(n) + ",q=" + std::to_string(q) + ": max second " +
                fmt(worst_second) + " (bar 0.05), " + spread.detail + "; ";
  }
  // The figure sweeps must run end to end.
  const auto a = run(ExperimentKind::scc_fractions, parse_sweep("10:10:200"), 20, 5);
  const auto b = run(ExperimentKind::scc_fractions, parse_sweep("5:5:100"), 20, 10);
  const bool sweeps = a.size() == 20 * 20 && b.size() == 20 * 20;
  v.pass = v.pass && sweeps;
  v.detail += sweeps ? "q=5 and q=10 sweeps ran" : "sweep output has the wrong shape";
  return v;
}

Check tiered() {
  ExperimentConfig config;
  config.kind = ExperimentKind::scc_fractions;
  config.sizes = {200};
  config.tiers = 2;
  config.master_seed = kMasterSeed;
  int two_giants = 0;
  int capped = 0;
  std::int64_t cross_edges = 0;
  double largest = 0;
  for (std::int32_t r = 0; r < 200; ++r) {
    const auto p = generate(market_for(config, 200, r));
    const auto m = da_rounds(p).matching;
    const auto g = build_envy_digraph(p, m);
    const auto scc = strongly_connected_components(g);
    int giants = 0;
    bool cap = true;
    for (const auto size : scc.sizes) {
      giants += size > 0.2 * 200;
      cap = cap && size <= 0.52 * 200;
    }
    two_giants += giants == 2;
    capped += cap;
    largest = std::max(largest, scc.largest_fraction());
    for (StudentId i = 0; i < p.student_count; ++i) {
      if (m[i] >= 100) continue;
      for (const StudentId j : g.out_neighbors(i)) cross_edges += m[j] >= 100;
    }
  }
  return {two_giants == 200 && capped == 200 && cross_edges == 0,
          std::to_string(two_giants) + "/200 with exactly two components above 0.2, " +
              "largest fraction seen " + fmt(largest) + " (cap 0.52), " +
              std::to_string(cross_edges) + " tier-1 to tier-2 envy edges"};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const std::string& name, const std::function<Check()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Check v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    failures += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << " ["
              << fmt(seconds, 3) << "s]" << std::endl;
  };

  report("da-vs-oracle", da_matches_oracle);
  report("engine-equivalence", engines_agree);
  report("prop1-oracle-equivalence", prop1_oracle);
  report("prop2-preservation", prop2_preservation);

  std::vector<ExperimentRecord> ne_small;
  report("prop3-envied-by-nobody", [&] {
    ne_small = run(ExperimentKind::ne_en_counts, {10, 50, 100, 200}, 2000);
    return prop3_envied_by_nobody(ne_small);
  });
  report("cor1-envies-nobody", [&] {
    return cor1_envies_nobody(run(ExperimentKind::ne_en_counts, {1000}, 200), ne_small);
  });
  report("prop4-rank-fit", [] {
    return pooled_fit(run(ExperimentKind::rank_distribution, {1000}, 200), true);
  });
  report("indegree-fit", [] {
    return pooled_fit(run(ExperimentKind::indegree_distribution, {1000}, 200), false);
  });
  report("application-totals", [] {
    return application_totals(run(ExperimentKind::application_counts, {1000}, 200));
  });
  report("thm1-giant-scc", [] {
    return thm1_giant_component(run(ExperimentKind::scc_fractions, {100, 300, 1000}, 100));
  });
  report("thm2-packing-equivalence", [] {
    return packing_equivalence(run(ExperimentKind::packing_equivalence, {1000}, 20), 1000, 1,
                               0.02, true);
  });
  report("many-to-one", many_to_one);
  report("tiered", tiered);

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
