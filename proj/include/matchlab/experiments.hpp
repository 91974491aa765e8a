#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "matchlab/random_markets.hpp"
#include "matchlab/stats.hpp"

namespace matchlab {

enum class ExperimentKind {
  scc_fractions,
  unimprovable_fraction,
  ne_en_counts,
  rank_distribution,
  indegree_distribution,
  packing_equivalence,
  application_counts,
};

const char* to_string(ExperimentKind kind) noexcept;
/// Throws Error(invalid_config) for unknown names.
ExperimentKind parse_experiment_kind(std::string_view name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::scc_fractions;
  std::vector<std::int32_t> sizes;  // school counts n
  std::int32_t q = 1;
  std::int32_t tiers = 1;
  std::int32_t replications = 1;
  std::uint64_t master_seed = 0;
  std::int32_t workers = 1;
  std::int32_t packing_seeds = 10;  // packing-equivalence only
  std::filesystem::path output;     // empty: no CSV
  double epsilon = 0.05;            // read by acceptance checks only
};

/// Throws Error(invalid_config).
void validate_experiment_config(const ExperimentConfig& config);

/// Parses "start:step:end" (inclusive), "a,b,c" or a single integer.
std::vector<std::int32_t> parse_sweep(std::string_view text);

/// Market generated for replication `replication` at size `n`. The seed
/// mixes the master seed with the replication index and the market shape.
MarketConfig market_for(const ExperimentConfig& config, std::int32_t n,
                        std::int32_t replication);

struct ExperimentRecord {
  ExperimentKind kind;
  std::int32_t n = 0;
  std::int32_t q = 1;
  std::int32_t c = 1;
  std::int32_t replication = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> fields;
  /// rank-distribution: students per rank; indegree-distribution: students
  /// per in-degree. Empty for other kinds.
  std::vector<std::int64_t> histogram;
  /// packing-equivalence: coverage fraction per packing seed.
  std::vector<double> coverages;

  /// Throws Error(invalid_argument) when the field is absent.
  double field(std::string_view name) const;
};

/// Runs every (size, replication) pair, in parallel across `workers`
/// threads. Records come back sorted by (n, replication) and are identical
/// for any worker count. Writes the CSV when `config.output` is set.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config);

/// Single replication; exposed for tests.
ExperimentRecord run_replication(const ExperimentConfig& config, std::int32_t n,
                                 std::int32_t replication);

/// "# matchlab-csv v1 kind=<kind>" followed by a header row and one row per
/// record: kind,n,q,c,replication,seed,<fields>[,histogram][,coverages].
std::string records_to_csv(ExperimentKind kind,
                           const std::vector<ExperimentRecord>& records);

struct FieldSummary {
  std::string field;
  SampleSummary stats;
};

struct SizeSummary {
  std::int32_t n = 0;
  std::int32_t q = 1;
  std::int32_t c = 1;
  std::vector<FieldSummary> fields;
  /// Distance between the pooled histogram and its theoretical law, for the
  /// two distribution kinds.
  std::optional<double> pooled_tv;
};

/// One summary per market size, in size order. Records must share a kind;
/// throws Error(invalid_argument) on empty input or mixed kinds.
std::vector<SizeSummary> summarize(const std::vector<ExperimentRecord>& records);

/// Sum of the histograms of all records at size n.
std::vector<double> pooled_histogram(const std::vector<ExperimentRecord>& records,
                                     std::int32_t n);

/// TV distance of a pooled rank histogram to Geometric(1/H_n).
double rank_fit(std::span<const double> pooled, std::int32_t n);
/// TV distance of a pooled in-degree histogram to the law
/// P(in-degree = d) = Poisson(H_n)(d + 1).
double indegree_fit(std::span<const double> pooled, std::int32_t n);

std::string format_summary_table(const std::vector<SizeSummary>& summaries);

}  // namespace matchlab
