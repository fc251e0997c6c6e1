#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "iodnet/hcpn.hpp"
#include "iodnet/token_game.hpp"
#include "iodnet/transformer.hpp"

namespace iodnet {

struct ExplorationOptions {
  std::size_t bound = 1'000'000;
  TimeMode mode = TimeMode::untimed;
  std::size_t workers = 1;
};

struct GraphEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::optional<std::size_t> transition; // empty for a time step
  Binding binding;

  bool operator==(const GraphEdge&) const = default;
};

struct ReachabilityGraph {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<Marking> nodes; // BFS discovery order; nodes[root] is M0
  std::vector<GraphEdge> edges;
  std::size_t root = 0;
  bool truncated = false;
  std::size_t bound = 0;
  TimeMode mode = TimeMode::untimed;
  std::vector<std::size_t> parent_edge; // BFS tree edge into each node, npos for the root
  std::unordered_map<Marking, std::size_t, MarkingHash> index;

  std::optional<std::size_t> find(const Marking& m) const;
  std::vector<std::size_t> out_degree() const;
  /// Edge indices of the BFS tree path from the root to `node`.
  std::vector<std::size_t> path_to(std::size_t node) const;
};

/// Successors of one marking: every enabled transition under every
/// admissible binding; in discrete mode a time step when nothing is enabled.
std::vector<std::pair<GraphEdge, Marking>> successors(const FlatNet& net, const Marking& m, TimeMode mode);

/// Layer-synchronous BFS. Workers expand disjoint slices of a layer; the
/// merge into the node table is sequential in frontier order, so the graph
/// does not depend on the worker count. Throws Error("bad-bound") for 0.
ReachabilityGraph build_state_space(const FlatNet& net, const ExplorationOptions& options = {});

enum class Verdict { holds, fails, unknown_truncated };

std::string_view to_string(Verdict v);

struct WitnessStep {
  std::string transition; // "tick" for a time step
  Binding binding;

  bool operator==(const WitnessStep&) const = default;
};

struct Witness {
  std::vector<WitnessStep> steps;
  Marking marking; // marking reached by the steps
};

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  bool truncated = false;
  double seconds = 0; // filled by callers that time exploration
};

struct PropertyReport {
  std::string property;
  Verdict verdict = Verdict::holds;
  std::optional<Witness> witness; // present for fails
  std::vector<std::string> details;
  GraphStats stats;
};

GraphStats stats_of(const ReachabilityGraph& g);

/// Fails iff a reachable non-final marking has no successor.
PropertyReport check_deadlock(const FlatNet& net, const ReachabilityGraph& g);

enum class ResetPolicy {
  strict,      // M0 must be a home marking of the graph as is
  final_resets // a final marking may additionally return to M0
};

PropertyReport check_resettable(const FlatNet& net, const ReachabilityGraph& g,
                                ResetPolicy policy = ResetPolicy::strict);

/// Transitions on no edge; `trace` names the diagram entity behind each.
PropertyReport dead_transitions(const FlatNet& net, const ReachabilityGraph& g, const RuleTrace* trace = nullptr);

/// Fails iff some explored marking puts more than k tokens on one place.
PropertyReport check_bounded(const FlatNet& net, const ReachabilityGraph& g, std::size_t k = 1);

Witness witness_for(const FlatNet& net, const ReachabilityGraph& g, std::size_t node);

/// Fires the witness steps from M0. Throws Error("not-enabled") when a step
/// does not apply.
Marking replay(const FlatNet& net, TimeMode mode, const Witness& w);

/// Nodes beyond `max_nodes` are omitted with a comment.
std::string graph_to_dot(const FlatNet& net, const ReachabilityGraph& g, std::size_t max_nodes = 500);
std::string graph_to_json(const FlatNet& net, const ReachabilityGraph& g);

struct AnalysisReport {
  std::string input;
  ExplorationOptions options;
  GraphStats graph;
  std::vector<PropertyReport> properties;
  bool include_timing = false;

  bool all_hold() const;
  bool any_unknown() const;
  std::string to_json(const FlatNet& net) const;
  std::string to_text(const FlatNet& net) const;
};

} // namespace iodnet
