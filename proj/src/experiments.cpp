#include "matchlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "matchlab/envy.hpp"
#include "matchlab/error.hpp"
#include "matchlab/instance_io.hpp"
#include "matchlab/mechanisms.hpp"
#include "matchlab/rng.hpp"

namespace matchlab {

namespace {

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::scc_fractions, "scc-fractions"},
    {ExperimentKind::unimprovable_fraction, "unimprovable-fraction"},
    {ExperimentKind::ne_en_counts, "ne-en-counts"},
    {ExperimentKind::rank_distribution, "rank-distribution"},
    {ExperimentKind::indegree_distribution, "indegree-distribution"},
    {ExperimentKind::packing_equivalence, "packing-equivalence"},
    {ExperimentKind::application_counts, "application-counts"},
};

std::string format_number(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, end);
}

std::int32_t parse_int(std::string_view text) {
  std::int32_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorKind::invalid_config,
                "not an integer: \"" + std::string(text) + "\"");
  }
  return value;
}

/// What every kind measures from: DA's matching on one market and its envy
/// digraph, plus the problem itself when it was materialized.
struct Observation {
  std::optional<Problem> problem;
  Matching matching;
  EnvyDigraph digraph;
  std::vector<Rank> ranks;
  std::vector<std::int64_t> student_applications;
  std::vector<std::int64_t> school_applications;
  std::int64_t total_applications = 0;
  std::int64_t redundant_draws = 0;
};

Observation observe(const MarketConfig& market, bool materialize) {
  Observation obs;
  if (!materialize && market.model != MarketModel::tiered) {
    auto run = lazy_da(market);
    obs.matching = std::move(run.matching);
    obs.digraph = std::move(run.digraph);
    obs.ranks = std::move(run.ranks);
    obs.student_applications = std::move(run.student_applications);
    obs.school_applications = std::move(run.school_applications);
    obs.total_applications = run.total_applications;
    obs.redundant_draws = run.redundant_draws;
    return obs;
  }
  obs.problem = generate(market);
  const auto& problem = *obs.problem;
  auto da = da_rounds(problem);
  obs.matching = std::move(da.matching);
  obs.digraph = build_envy_digraph(problem, obs.matching);
  obs.ranks.resize(static_cast<std::size_t>(problem.student_count));
  for (StudentId i = 0; i < problem.student_count; ++i) {
    obs.ranks[i] = rank(problem, i, obs.matching[i]);
  }
  obs.student_applications = da.log.student_counts();
  obs.school_applications = da.log.school_counts();
  obs.total_applications = da.log.total();
  return obs;
}

std::int32_t changed_count(const Matching& a, const Matching& b) {
  std::int32_t changed = 0;
  for (StudentId i = 0; i < a.student_count(); ++i) changed += a[i] != b[i];
  return changed;
}

}  // namespace

const char* to_string(ExperimentKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (const auto& [k, text] : kKindNames) {
    if (name == text) return k;
  }
  throw Error(ErrorKind::invalid_config,
              "unknown experiment kind \"" + std::string(name) + "\"");
}

void validate_experiment_config(const ExperimentConfig& config) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::invalid_config, what);
  };
  if (config.sizes.empty()) fail("size sweep is empty");
  if (config.replications < 1) fail("replications must be at least 1");
  if (config.workers < 1) fail("workers must be at least 1");
  if (config.packing_seeds < 1) fail("packing seeds must be at least 1");
  if (!(config.epsilon > 0.0 && config.epsilon < 1.0)) {
    fail("epsilon must lie in (0, 1)");
  }
  if (config.q > 1 && config.tiers > 1) {
    fail("tiered markets have quota 1");
  }
  for (const auto n : config.sizes) validate_market_config(market_for(config, n, 0));
}

std::vector<std::int32_t> parse_sweep(std::string_view text) {
  std::vector<std::int32_t> sizes;
  if (text.find(':') != std::string_view::npos) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    if (b == std::string_view::npos) {
      throw Error(ErrorKind::invalid_config, "sweep must be start:step:end");
    }
    const auto start = parse_int(text.substr(0, a));
    const auto step = parse_int(text.substr(a + 1, b - a - 1));
    const auto end = parse_int(text.substr(b + 1));
    if (step <= 0 || end < start) {
      throw Error(ErrorKind::invalid_config, "empty or unbounded sweep");
    }
    for (std::int64_t v = start; v <= end; v += step) {
      sizes.push_back(static_cast<std::int32_t>(v));
    }
    return sizes;
  }
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const auto comma = std::min(text.find(',', begin), text.size());
    sizes.push_back(parse_int(text.substr(begin, comma - begin)));
    begin = comma + 1;
  }
  return sizes;
}

MarketConfig market_for(const ExperimentConfig& config, std::int32_t n,
                        std::int32_t replication) {
  MarketConfig market;
  market.model = config.tiers > 1  ? MarketModel::tiered
                 : config.q > 1    ? MarketModel::many_to_one
                                   : MarketModel::uniform;
  market.n = n;
  market.q = config.q;
  market.tiers = config.tiers;
  const std::uint64_t shape = (static_cast<std::uint64_t>(n) << 32) ^
                              (static_cast<std::uint64_t>(config.q) << 16) ^
                              static_cast<std::uint64_t>(config.tiers);
  market.seed = derive_seed(
      derive_seed(config.master_seed, static_cast<std::uint64_t>(replication)),
      shape);
  return market;
}

double ExperimentRecord::field(std::string_view name) const {
  for (const auto& [key, value] : fields) {
    if (key == name) return value;
  }
  throw Error(ErrorKind::invalid_argument,
              "record has no field \"" + std::string(name) + "\"");
}

double rank_fit(std::span<const double> pooled, std::int32_t n) {
  return tv_distance(pooled, [n](std::int64_t k) {
    return geometric_rank_pmf_unbounded(n, k);
  });
}

double indegree_fit(std::span<const double> pooled, std::int32_t n) {
  // A student nobody envies sits at a school that received one application,
  // so in-degree d corresponds to d + 1 applications.
  return tv_distance(pooled, [n](std::int64_t d) {
    return poisson_indegree_pmf(n, d + 1);
  });
}

ExperimentRecord run_replication(const ExperimentConfig& config, std::int32_t n,
                                 std::int32_t replication) {
  const auto market = market_for(config, n, replication);
  ExperimentRecord record;
  record.kind = config.kind;
  record.n = n;
  record.q = config.q;
  record.c = config.tiers;
  record.replication = replication;
  record.seed = market.seed;

  const bool materialize = config.kind == ExperimentKind::packing_equivalence;
  const auto obs = observe(market, materialize);
  const auto students = static_cast<double>(obs.matching.student_count());
  auto& fields = record.fields;

  switch (config.kind) {
    case ExperimentKind::scc_fractions: {
      const auto scc = strongly_connected_components(obs.digraph);
      std::int32_t on_cycles = 0;
      for (const auto size : scc.sizes) on_cycles += size >= 2 ? size : 0;
      fields = {{"largest_fraction", scc.largest_fraction()},
                {"second_fraction", scc.second_fraction()},
                {"components", scc.component_count()},
                {"improvable_fraction", on_cycles / students}};
      break;
    }
    case ExperimentKind::unimprovable_fraction: {
      const auto scc = strongly_connected_components(obs.digraph);
      std::int32_t unimprovable = 0;
      for (const auto size : scc.sizes) unimprovable += size == 1 ? 1 : 0;
      fields = {{"unimprovable", unimprovable},
                {"unimprovable_fraction", unimprovable / students}};
      break;
    }
    case ExperimentKind::ne_en_counts: {
      std::int32_t ne = 0;
      std::int32_t en = 0;
      for (StudentId i = 0; i < obs.digraph.node_count(); ++i) {
        ne += obs.digraph.in_degree(i) == 0;
        en += obs.digraph.out_degree(i) == 0;
      }
      fields = {{"ne", ne}, {"en", en}};
      break;
    }
    case ExperimentKind::rank_distribution: {
      auto& hist = record.histogram;
      double sum = 0.0;
      for (const Rank r : obs.ranks) {
        if (std::cmp_greater_equal(r, hist.size())) hist.resize(r + 1, 0);
        ++hist[r];
        sum += r;
      }
      const std::vector<double> counts(hist.begin(), hist.end());
      fields = {{"mean_rank", sum / students},
                {"top_choice", static_cast<double>(hist.size() > 1 ? hist[1] : 0)},
                {"tv_geometric", rank_fit(counts, n)}};
      break;
    }
    case ExperimentKind::indegree_distribution: {
      auto& hist = record.histogram;
      double sum = 0.0;
      for (StudentId i = 0; i < obs.digraph.node_count(); ++i) {
        const auto d = obs.digraph.in_degree(i);
        if (std::cmp_greater_equal(d, hist.size())) hist.resize(d + 1, 0);
        ++hist[d];
        sum += d;
      }
      const std::vector<double> counts(hist.begin(), hist.end());
      fields = {{"mean_indegree", sum / students},
                {"tv_poisson", indegree_fit(counts, n)}};
      break;
    }
    case ExperimentKind::packing_equivalence: {
      const auto& problem = *obs.problem;
      const auto scc = strongly_connected_components(obs.digraph);
      std::int32_t improvable = 0;
      for (const auto size : scc.sizes) improvable += size >= 2 ? size : 0;
      const auto efficient = eada(problem);
      const auto traded = da_ttc(problem);
      double lo = 1.0;
      double hi = 0.0;
      double sum = 0.0;
      for (std::int32_t p = 0; p < config.packing_seeds; ++p) {
        const auto packing = find_cycle_packing(
            obs.digraph, derive_seed(market.seed, static_cast<std::uint64_t>(p) + 1));
        const double coverage = packing.coverage();
        record.coverages.push_back(coverage);
        lo = std::min(lo, coverage);
        hi = std::max(hi, coverage);
        sum += coverage;
      }
      fields = {{"improvable", improvable},
                {"eada_improved", changed_count(efficient.matching, obs.matching)},
                {"ttc_improved", changed_count(traded.matching, obs.matching)},
                {"coverage_mean", sum / config.packing_seeds},
                {"coverage_min", lo},
                {"coverage_max", hi},
                {"coverage_spread", hi - lo}};
      break;
    }
    case ExperimentKind::application_counts: {
      std::int64_t max_student = 0;
      std::int64_t singles = 0;
      for (const auto a : obs.student_applications) {
        max_student = std::max(max_student, a);
        singles += a == 1;
      }
      const auto max_school = obs.school_applications.empty()
                                  ? 0
                                  : *std::max_element(obs.school_applications.begin(),
                                                      obs.school_applications.end());
      fields = {{"total_applications", static_cast<double>(obs.total_applications)},
                {"redundant_draws", static_cast<double>(obs.redundant_draws)},
                {"mean_applications", obs.total_applications / students},
                {"max_applications", static_cast<double>(max_student)},
                {"single_application_fraction", singles / students},
                {"max_school_applications", static_cast<double>(max_school)}};
      break;
    }
  }
  return record;
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config) {
  validate_experiment_config(config);
  const auto reps = static_cast<std::size_t>(config.replications);
  const std::size_t tasks = config.sizes.size() * reps;
  std::vector<ExperimentRecord> records(tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks) return;
      try {
        records[t] = run_replication(config, config.sizes[t / reps],
                                     static_cast<std::int32_t>(t % reps));
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(tasks);
      }
    }
  };
  const auto workers =
      std::min<std::size_t>(static_cast<std::size_t>(config.workers), tasks);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  std::stable_sort(records.begin(), records.end(),
                   [](const ExperimentRecord& a, const ExperimentRecord& b) {
                     return std::tie(a.n, a.replication) <
                            std::tie(b.n, b.replication);
                   });
  if (!config.output.empty()) {
    write_file_atomically(config.output, records_to_csv(config.kind, records));
  }
  return records;
}

std::string records_to_csv(ExperimentKind kind,
                           const std::vector<ExperimentRecord>& records) {
  std::string out = std::string("# matchlab-csv v1 kind=") + to_string(kind) + "\n";
  out += "kind,n,q,c,replication,seed";
  const bool histogram = kind == ExperimentKind::rank_distribution ||
                         kind == ExperimentKind::indegree_distribution;
  const bool coverages = kind == ExperimentKind::packing_equivalence;
  if (!records.empty()) {
    for (const auto& [name, value] : records.front().fields) out += "," + name;
  }
  if (histogram) out += ",histogram";
  if (coverages) out += ",coverages";
  out += "\n";
  for (const auto& r : records) {
    out += std::string(to_string(r.kind)) + "," + std::to_string(r.n) + "," +
           std::to_string(r.q) + "," + std::to_string(r.c) + "," +
           std::to_string(r.replication) + "," + std::to_string(r.seed);
    for (const auto& [name, value] : r.fields) out += "," + format_number(value);
    if (histogram) {
      out += ",";
      bool first = true;
      for (std::size_t k = 0; k < r.histogram.size(); ++k) {
        if (r.histogram[k] == 0) continue;
        if (!first) out += ";";
        out += std::to_string(k) + ":" + std::to_string(r.histogram[k]);
        first = false;
      }
    }
    if (coverages) {
      out += ",";
      for (std::size_t k = 0; k < r.coverages.size(); ++k) {
        if (k) out += ";";
        out += format_number(r.coverages[k]);
      }
    }
    out += "\n";
  }
  return out;
}

std::vector<double> pooled_histogram(const std::vector<ExperimentRecord>& records,
                                     std::int32_t n) {
  std::vector<double> pooled;
  for (const auto& r : records) {
    if (r.n != n) continue;
    if (pooled.size() < r.histogram.size()) pooled.resize(r.histogram.size(), 0.0);
    for (std::size_t k = 0; k < r.histogram.size(); ++k) {
      pooled[k] += static_cast<double>(r.histogram[k]);
    }
  }
  return pooled;
}

std::vector<SizeSummary> summarize(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) {
    throw Error(ErrorKind::invalid_argument, "no records to summarize");
  }
  const auto kind = records.front().kind;
  std::map<std::tuple<std::int32_t, std::int32_t, std::int32_t>,
           std::vector<const ExperimentRecord*>>
      groups;
  for (const auto& r : records) {
    if (r.kind != kind) {
      throw Error(ErrorKind::invalid_argument, "records mix experiment kinds");
    }
    groups[{r.n, r.q, r.c}].push_back(&r);
  }
  std::vector<SizeSummary> out;
  for (const auto& [key, group] : groups) {
    SizeSummary summary;
    std::tie(summary.n, summary.q, summary.c) = key;
    for (const auto& [name, unused] : group.front()->fields) {
      std::vector<double> values;
      values.reserve(group.size());
      for (const auto* r : group) values.push_back(r->field(name));
      summary.fields.push_back({name, summarize_sample(values)});
    }
    if (kind == ExperimentKind::rank_distribution ||
        kind == ExperimentKind::indegree_distribution) {
      const auto pooled = pooled_histogram(records, summary.n);
      summary.pooled_tv = kind == ExperimentKind::rank_distribution
                              ? rank_fit(pooled, summary.n)
                              : indegree_fit(pooled, summary.n);
    }
    out.push_back(std::move(summary));
  }
  return out;
}

std::string format_summary_table(const std::vector<SizeSummary>& summaries) {
  std::string out = "n,q,c,field,count,mean,sd,se,ci_low,ci_high\n";
  for (const auto& s : summaries) {
    const std::string prefix = std::to_string(s.n) + "," + std::to_string(s.q) +
                               "," + std::to_string(s.c) + ",";
    for (const auto& f : s.fields) {
      out += prefix + f.field + "," + std::to_string(f.stats.count) + "," +
             format_number(f.stats.mean) + "," + format_number(f.stats.sd) + "," +
             format_number(f.stats.se) + "," + format_number(f.stats.ci_low) + "," +
             format_number(f.stats.ci_high) + "\n";
    }
    if (s.pooled_tv) {
      out += prefix + "pooled_tv,1," + format_number(*s.pooled_tv) + ",0,0," +
             format_number(*s.pooled_tv) + "," + format_number(*s.pooled_tv) + "\n";
    }
  }
  return out;
}

}  // namespace matchlab
