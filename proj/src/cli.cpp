#include "matchlab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <optional>
#include <ostream>

#include "matchlab/envy.hpp"
#include "matchlab/error.hpp"
#include "matchlab/experiments.hpp"
#include "matchlab/instance_io.hpp"
#include "matchlab/market.hpp"
#include "matchlab/mechanisms.hpp"
#include "matchlab/oracle.hpp"
#include "matchlab/random_markets.hpp"

namespace matchlab {

namespace {

using nlohmann::ordered_json;

constexpr const char* kReportSchema = "matchlab-report v1";

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::malformed_input:
      return exit_code::malformed_input;
    case ErrorKind::invalid_argument:
      return exit_code::invalid_instance;
    case ErrorKind::too_large:
      return exit_code::too_large;
    case ErrorKind::invalid_config:
    case ErrorKind::unsupported_model:
      return exit_code::invalid_config;
    case ErrorKind::io:
      return exit_code::io_error;
    case ErrorKind::index:
    case ErrorKind::stale_packing:
      break;
  }
  return exit_code::internal_error;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag,
                           std::string& source) {
  if (flag) {
    source = "flag";
    return *flag;
  }
  if (const char* env = std::getenv("MATCHLAB_SEED"); env != nullptr && *env) {
    std::uint64_t value = 0;
    const std::string_view text(env);
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw Error(ErrorKind::invalid_config,
                  "MATCHLAB_SEED is not an unsigned integer: " + std::string(text));
    }
    source = "MATCHLAB_SEED";
    return value;
  }
  source = "default";
  return 0;
}

/// Reads an instance and reports every violation. Returns nullopt after
/// printing diagnostics when the instance is unusable.
std::optional<Problem> load_instance(const std::string& path, std::ostream& err,
                                     int& code) {
  Problem problem;
  try {
    problem = read_problem_file(path);
  } catch (const Error& e) {
    err << "error: " << path << ": " << e.what() << "\n";
    code = exit_code_for(e.kind());
    return std::nullopt;
  }
  const auto violations = validate_problem(problem);
  if (!violations.empty()) {
    err << "error: " << path << ": invalid instance\n";
    for (const auto& v : violations) err << "  " << v.code << ": " << v.detail << "\n";
    code = exit_code::invalid_instance;
    return std::nullopt;
  }
  return problem;
}

ordered_json school_or_null(SchoolId s) {
  return s == kNullSchool ? ordered_json(nullptr) : ordered_json(s);
}

std::string format_matching(const Matching& matching) {
  std::string out;
  for (StudentId i = 0; i < matching.student_count(); ++i) {
    if (i) out += " ";
    out += std::to_string(i) + "->";
    out += matching[i] == kNullSchool ? "none" : std::to_string(matching[i]);
  }
  return out;
}

std::string format_ids(const std::vector<StudentId>& ids) {
  std::string out = "{";
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(ids[k]);
  }
  return out + "}";
}

struct SolveArgs {
  std::string instance;
  std::string mechanism;
  bool classify = false;
  std::string dump_digraph;
  std::string log;
  std::string queue = "fifo";
  std::optional<std::uint64_t> seed;
};

int run_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  std::string seed_source;
  const auto seed = resolve_seed(args.seed, seed_source);
  err << "config: command=solve instance=" << args.instance
      << " mechanism=" << args.mechanism << " classify=" << args.classify;
  if (args.mechanism == "da-sequential") err << " queue=" << args.queue;
  err << " seed=" << seed << " seed-source=" << seed_source << "\n";

  int code = exit_code::ok;
  const auto problem = load_instance(args.instance, err, code);
  if (!problem) return code;

  MechanismResult result;
  if (args.mechanism == "da") {
    result = da_rounds(*problem);
  } else if (args.mechanism == "da-sequential") {
    const auto policy = args.queue == "lifo"     ? QueuePolicy::lifo()
                        : args.queue == "random" ? QueuePolicy::random(seed)
                                                 : QueuePolicy::fifo();
    result = da_sequential(*problem, policy);
  } else if (args.mechanism == "da-amnesiac") {
    result = da_amnesiac(*problem, seed);
  } else if (args.mechanism == "eada") {
    result = eada(*problem);
  } else {
    result = da_ttc(*problem);
  }

  const auto& matching = result.matching;
  ordered_json report;
  report["schema"] = kReportSchema;
  report["mechanism"] = args.mechanism;
  report["students"] = problem->student_count;
  report["schools"] = problem->school_count();
  auto& assigned = report["matching"] = ordered_json::array();
  auto& ranks = report["ranks"] = ordered_json::array();
  for (StudentId i = 0; i < problem->student_count; ++i) {
    assigned.push_back(school_or_null(matching[i]));
    ranks.push_back(matching[i] == kNullSchool
                        ? ordered_json(nullptr)
                        : ordered_json(rank(*problem, i, matching[i])));
  }
  report["applications"] = result.log.total();

  const bool need_digraph = args.classify || !args.dump_digraph.empty();
  if (need_digraph) {
    const auto digraph = build_envy_digraph(*problem, matching);
    if (!args.dump_digraph.empty()) {
      write_file_atomically(args.dump_digraph, digraph.to_edge_list());
    }
    if (args.classify) {
      const auto scc = strongly_connected_components(digraph);
      const auto cls = classify_students(*problem, matching, digraph, scc);
      ordered_json students = ordered_json::array();
      for (StudentId i = 0; i < problem->student_count; ++i) {
        ordered_json tags = ordered_json::array();
        for (const Tag t : cls.tags[i].tags()) tags.push_back(to_string(t));
        students.push_back(
            {{"student", i},
             {"verdict", cls.verdicts[i] == Verdict::improvable ? "improvable"
                                                                 : "unimprovable"},
             {"tags", std::move(tags)}});
      }
      report["classification"] = {
          {"improvable", cls.improvable()},
          {"unimprovable", cls.unimprovable()},
          {"envied_by_nobody", cls.ne_count},
          {"envies_nobody", cls.en_count},
          {"scc_sizes", scc.sizes},
          {"students", std::move(students)}};
    }
  }
  if (!args.log.empty()) write_file_atomically(args.log, result.log.to_csv());
  out << report.dump(2) << "\n";
  return exit_code::ok;
}

struct VerifyArgs {
  std::string instance;
  std::int32_t size_guard = kDefaultSizeGuard;
};

int run_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  err << "config: command=verify instance=" << args.instance
      << " size-guard=" << args.size_guard << "\n";
  int code = exit_code::ok;
  const auto problem = load_instance(args.instance, err, code);
  if (!problem) return code;
  if (problem->student_count > args.size_guard) {
    err << "error: " << problem->student_count
        << " students exceed the oracle size guard of " << args.size_guard << "\n";
    return exit_code::too_large;
  }

  const auto da = da_rounds(*problem).matching;
  const auto efficient = eada(*problem).matching;
  const auto traded = da_ttc(*problem).matching;
  const auto oracle = run_oracle(*problem, args.size_guard);
  const auto digraph = build_envy_digraph(*problem, da);
  const auto cls = classify_students(*problem, da, digraph);

  out << "DA:     " << format_matching(da) << "\n";
  out << "EADA:   " << format_matching(efficient) << "\n";
  out << "DA+TTC: " << format_matching(traded) << "\n";
  out << "stable matchings: " << oracle.stable.size() << "\n";
  out << "efficient matchings dominating DA: " << oracle.dominating_efficient.size()
      << "\n";
  out << "unimprovable (oracle): " << format_ids(oracle.unimprovable) << "\n";
  out << "unimprovable (digraph): " << format_ids(cls.unimprovable()) << "\n";

  bool all = true;
  auto check = [&](const char* name, bool ok) {
    out << (ok ? "ok   " : "FAIL ") << name << "\n";
    all = all && ok;
  };

  check("DA is stable", is_stable(*problem, da).stable && oracle_is_stable(*problem, da));
  check("DA is the student-optimal stable matching",
        da == oracle.student_optimal &&
            std::all_of(oracle.stable.begin(), oracle.stable.end(),
                        [&](const Matching& m) {
                          return oracle_weakly_dominates(*problem, da, m);
                        }));
  check("unimprovable students agree with the envy digraph",
        oracle.unimprovable == cls.unimprovable());
  auto in_efficient_set = [&](const Matching& m) {
    return std::find(oracle.dominating_efficient.begin(),
                     oracle.dominating_efficient.end(),
                     m) != oracle.dominating_efficient.end();
  };
  check("EADA is efficient and dominates DA", in_efficient_set(efficient));
  check("DA+TTC is efficient and dominates DA", in_efficient_set(traded));
  bool tags_hold = true;
  for (StudentId i = 0; i < problem->student_count; ++i) {
    const auto& tags = cls.tags[i];
    if (!tags.has(Tag::unassigned) && !tags.has(Tag::worst_ranked)) continue;
    tags_hold = tags_hold && cls.verdicts[i] == Verdict::unimprovable &&
                efficient[i] == da[i] && traded[i] == da[i];
  }
  check("unassigned and worst-ranked students keep their DA seat", tags_hold);

  out << (all ? "verdict: agree" : "verdict: disagree") << "\n";
  return all ? exit_code::ok : exit_code::check_failed;
}

struct ExperimentArgs {
  std::string kind;
  std::string sweep;
  std::int32_t q = 1;
  std::int32_t tiers = 1;
  std::int32_t reps = 1;
  std::optional<std::uint64_t> seed;
  std::int32_t workers = 1;
  std::int32_t packing_seeds = 10;
  std::string out;
  std::string dump_instance;
};

int run_experiment_command(const ExperimentArgs& args, std::ostream& out,
                           std::ostream& err) {
  ExperimentConfig config;
  config.kind = parse_experiment_kind(args.kind);
  config.sizes = parse_sweep(args.sweep);
  config.q = args.q;
  config.tiers = args.tiers;
  config.replications = args.reps;
  std::string seed_source;
  config.master_seed = resolve_seed(args.seed, seed_source);
  config.workers = args.workers;
  config.packing_seeds = args.packing_seeds;
  config.output = args.out;
  validate_experiment_config(config);

  err << "config: command=experiment kind=" << to_string(config.kind)
      << " sizes=" << args.sweep << " q=" << config.q << " tiers=" << config.tiers
      << " reps=" << config.replications << " seed=" << config.master_seed
      << " seed-source=" << seed_source << " workers=" << config.workers;
  if (config.kind == ExperimentKind::packing_equivalence) {
    err << " packing-seeds=" << config.packing_seeds;
  }
  err << " out=" << (args.out.empty() ? "-" : args.out) << "\n";
  for (const auto n : config.sizes) {
    err << "config: n=" << n << " replication-0 seed=" << market_for(config, n, 0).seed
        << "\n";
  }

  if (!args.dump_instance.empty()) {
    const auto market = market_for(config, config.sizes.front(), 0);
    write_problem_file(args.dump_instance, generate(market));
    err << "wrote instance n=" << market.n << " replication=0 to "
        << args.dump_instance << "\n";
  }

  const auto records = run_experiment(config);
  if (!args.out.empty()) out << "# csv " << args.out << "\n";
  out << format_summary_table(summarize(records));
  return exit_code::ok;
}

struct DumpArgs {
  std::string model = "uniform";
  std::int32_t n = 1;
  std::int32_t q = 1;
  std::int32_t tiers = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_dump(const DumpArgs& args, std::ostream& out, std::ostream& err) {
  MarketConfig market;
  if (args.model == "uniform") {
    market.model = MarketModel::uniform;
  } else if (args.model == "many-to-one") {
    market.model = MarketModel::many_to_one;
  } else {
    market.model = MarketModel::tiered;
  }
  market.n = args.n;
  market.q = args.q;
  market.tiers = args.tiers;
  std::string seed_source;
  market.seed = resolve_seed(args.seed, seed_source);
  err << "config: command=dump-instance model=" << args.model << " n=" << market.n
      << " q=" << market.q << " tiers=" << market.tiers << " seed=" << market.seed
      << " seed-source=" << seed_source << " out=" << (args.out.empty() ? "-" : args.out)
      << "\n";
  validate_market_config(market);
  const auto problem = generate(market);
  if (args.out.empty()) {
    out << problem_to_json(problem);
  } else {
    write_problem_file(args.out, problem);
  }
  return exit_code::ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Deferred acceptance, envy digraphs and random school-choice markets"};
  app.name("matchlab");
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run one mechanism on an instance");
  solve_cmd->add_option("instance", solve.instance, "Instance JSON")->required();
  solve_cmd
      ->add_option("mechanism", solve.mechanism,
                   "da, da-sequential, da-amnesiac, eada or da-ttc")
      ->required()
      ->check(CLI::IsMember({"da", "da-sequential", "da-amnesiac", "eada", "da-ttc"}));
  solve_cmd->add_flag("--classify", solve.classify,
                      "Add improvability verdicts, tags and SCC sizes");
  solve_cmd->add_option("--dump-digraph", solve.dump_digraph,
                        "Write the envy digraph as an edge list");
  solve_cmd->add_option("--log", solve.log, "Write the application log as CSV");
  solve_cmd->add_option("--queue", solve.queue, "Queue order for da-sequential")
      ->check(CLI::IsMember({"fifo", "lifo", "random"}));
  solve_cmd->add_option("--seed", solve.seed,
                        "Seed for random queues and da-amnesiac");

  VerifyArgs verify;
  auto* verify_cmd =
      app.add_subcommand("verify", "Cross-check the mechanisms against brute force");
  verify_cmd->add_option("instance", verify.instance, "Instance JSON")->required();
  verify_cmd->add_option("--size-guard", verify.size_guard,
                         "Largest student count the oracle accepts");

  ExperimentArgs experiment;
  auto* experiment_cmd =
      app.add_subcommand("experiment", "Monte Carlo runs over random markets");
  experiment_cmd->add_option("kind", experiment.kind, "Experiment kind")->required();
  experiment_cmd
      ->add_option("--n-sweep", experiment.sweep,
                   "Market sizes: start:step:end, a,b,c or a single n")
      ->required();
  experiment_cmd->add_option("--q", experiment.q, "Seats per school");
  experiment_cmd->add_option("--tiers", experiment.tiers, "Preference tiers");
  experiment_cmd->add_option("--reps", experiment.reps, "Replications per size");
  experiment_cmd->add_option("--seed", experiment.seed,
                             "Master seed (falls back to MATCHLAB_SEED)");
  experiment_cmd->add_option("--workers", experiment.workers, "Worker threads");
  experiment_cmd->add_option("--packing-seeds", experiment.packing_seeds,
                             "Packings per replication (packing-equivalence)");
  experiment_cmd->add_option("--out", experiment.out, "CSV output path");
  experiment_cmd->add_option("--dump-instance", experiment.dump_instance,
                             "Write the first generated market as instance JSON");

  DumpArgs dump;
  auto* dump_cmd = app.add_subcommand("dump-instance", "Generate one random market");
  dump_cmd->add_option("--model", dump.model, "uniform, many-to-one or tiered")
      ->check(CLI::IsMember({"uniform", "many-to-one", "tiered"}));
  dump_cmd->add_option("--n", dump.n, "Schools");
  dump_cmd->add_option("--q", dump.q, "Seats per school");
  dump_cmd->add_option("--tiers", dump.tiers, "Preference tiers");
  dump_cmd->add_option("--seed", dump.seed, "Seed (falls back to MATCHLAB_SEED)");
  dump_cmd->add_option("--out", dump.out, "Output path (standard output if absent)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == static_cast<int>(CLI::ExitCodes::Success)
               ? exit_code::ok
               : exit_code::usage;
  }

  try {
    if (*solve_cmd) return run_solve(solve, out, err);
    if (*verify_cmd) return run_verify(verify, out, err);
    if (*experiment_cmd) return run_experiment_command(experiment, out, err);
    return run_dump(dump, out, err);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::internal_error;
  }
}

}  // namespace matchlab
