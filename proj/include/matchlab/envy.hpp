#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "matchlab/market.hpp"

namespace matchlab {

/// Directed graph on students; edge (i, j) means i envies j. Out-neighbor
/// lists are sorted and duplicate-free.
class EnvyDigraph {
 public:
  EnvyDigraph() = default;
  /// Sorts and deduplicates each list. Throws Error(index) on an endpoint
  /// outside [0, node_count) and Error(invalid_argument) on a self-loop.
  EnvyDigraph(std::int32_t node_count,
              std::vector<std::vector<StudentId>> out_neighbors);

  std::int32_t node_count() const noexcept {
    return static_cast<std::int32_t>(out_.size());
  }
  std::int64_t edge_count() const noexcept { return edge_count_; }
  std::span<const StudentId> out_neighbors(StudentId node) const {
    return out_[node];
  }
  std::int32_t out_degree(StudentId node) const {
    return static_cast<std::int32_t>(out_[node].size());
  }
  std::int32_t in_degree(StudentId node) const { return in_degree_[node]; }
  bool has_edge(StudentId from, StudentId to) const;

  /// "i j" per line in ascending order.
  std::string to_edge_list() const;

 private:
  std::vector<std::vector<StudentId>> out_;
  std::vector<std::int32_t> in_degree_;
  std::int64_t edge_count_ = 0;
};

EnvyDigraph build_envy_digraph(const Problem& problem, const Matching& matching);

struct SccResult {
  /// Component id per node; ids are assigned in order of each component's
  /// smallest node, so node 0 is always in component 0.
  std::vector<std::int32_t> component;
  /// Size of each component, indexed by id.
  std::vector<std::int32_t> size_by_id;
  /// All component sizes, largest first.
  std::vector<std::int32_t> sizes;

  std::int32_t component_count() const noexcept {
    return static_cast<std::int32_t>(size_by_id.size());
  }
  double largest_fraction() const;
  double second_fraction() const;
};

/// Tarjan's algorithm, iterative.
SccResult strongly_connected_components(const EnvyDigraph& digraph);

enum class Verdict { improvable, unimprovable };

enum class Tag : std::uint8_t {
  envies_nobody = 1,
  envied_by_nobody = 2,
  unassigned = 4,
  worst_ranked = 8,
};

const char* to_string(Tag tag) noexcept;

class TagSet {
 public:
  constexpr TagSet() = default;
  constexpr void add(Tag tag) noexcept { bits_ |= static_cast<std::uint8_t>(tag); }
  constexpr bool has(Tag tag) const noexcept {
    return (bits_ & static_cast<std::uint8_t>(tag)) != 0;
  }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  std::vector<Tag> tags() const;
  bool operator==(const TagSet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

struct Classification {
  std::vector<Verdict> verdicts;
  std::vector<TagSet> tags;
  std::int32_t ne_count = 0;  // envied by nobody
  std::int32_t en_count = 0;  // envies nobody
  std::int32_t improvable_count = 0;

  std::vector<StudentId> improvable() const;
  std::vector<StudentId> unimprovable() const;
};

/// A student is improvable iff their strongly connected component has two
/// or more students. `worst_ranked` marks students whose list ranks every
/// school and who sit at its last entry, when some school is under-demanded.
Classification classify_students(const Problem& problem,
                                 const Matching& matching,
                                 const EnvyDigraph& digraph);
Classification classify_students(const Problem& problem,
                                 const Matching& matching,
                                 const EnvyDigraph& digraph,
                                 const SccResult& scc);

/// Shortens a closed walk (first node == last node, no repeated edges) to a
/// simple cycle over a subset of its nodes by cutting out everything between
/// the first and last visit of a repeated node until none is left. The
/// result is closed as well. Throws Error(malformed_input) for walks that are
/// not closed or have no edge.
std::vector<StudentId> reduce_cycle_to_trading_cycle(
    std::span<const StudentId> walk);

/// Same, additionally checking that every step of the walk is an edge.
std::vector<StudentId> reduce_cycle_to_trading_cycle(
    std::span<const StudentId> walk, const EnvyDigraph& digraph);

struct CyclePacking {
  /// Each cycle lists its nodes once; the last node points back to the first.
  std::vector<std::vector<StudentId>> cycles;
  std::vector<StudentId> covered;  // ascending
  std::int32_t node_count = 0;

  double coverage() const {
    return node_count == 0 ? 0.0
                           : static_cast<double>(covered.size()) / node_count;
  }
};

/// Greedy randomized maximal packing: a depth-first search in a seeded random
/// node and edge order removes each cycle it closes, until the remaining
/// graph is acyclic. Acyclicity of the remainder is re-checked on return.
CyclePacking find_cycle_packing(const EnvyDigraph& digraph, std::uint64_t seed);

/// True iff removing `removed` nodes leaves `digraph` without cycles.
bool is_acyclic_without(const EnvyDigraph& digraph,
                        std::span<const StudentId> removed);

/// Moves every packed student into the seat of the student they point to.
/// Throws Error(stale_packing) if a cycle step is not envy at `matching` or
/// cycles overlap.
Matching execute_trading_cycles(const Problem& problem, const Matching& matching,
                                const CyclePacking& packing);

/// Efficient iff the envy digraph is acyclic and nobody desires a school with
/// a free seat.
bool is_pareto_efficient(const Problem& problem, const Matching& matching);

struct PackingRun {
  Matching matching;
  std::vector<StudentId> improved;  // ascending
  std::int32_t iterations = 0;
};

/// Packs and executes trading cycles repeatedly, rebuilding the digraph each
/// time, until it is acyclic.
PackingRun pack_until_efficient(const Problem& problem, const Matching& start,
                                std::uint64_t seed);

}  // namespace matchlab
