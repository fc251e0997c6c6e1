#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iodnet/error.hpp"
#include "iodnet/source_span.hpp"

namespace iodnet {

/// Abstract time unit. All bounds in the toolchain are non-negative integers.
using Time = std::int64_t;

struct TimeBounds {
  Time lo = 0;
  Time hi = 0;

  bool contains(Time t) const { return lo <= t && t <= hi; }
  bool operator==(const TimeBounds&) const = default;
};

enum class DiagramKind { iod, sd, td };

std::string_view to_string(DiagramKind kind);

// ---------------------------------------------------------------------------
// Interaction overview diagrams

enum class IodNodeKind { initial, final_node, interaction, fork, join, decision, merge };

std::string_view to_string(IodNodeKind kind);

/// Initial, decision and merge nodes become places; interaction, fork and
/// join nodes become transitions. Final nodes are place-like targets only.
bool is_place_like(IodNodeKind kind);

struct IodNode {
  std::string id;
  IodNodeKind kind = IodNodeKind::initial;
  SourceSpan span;

  bool operator==(const IodNode&) const = default;
};

struct IodEdge {
  std::string source;
  std::string target;
  std::optional<std::string> guard;
  SourceSpan span;

  bool operator==(const IodEdge&) const = default;
};

struct IodGraph {
  std::string id;
  std::vector<IodNode> nodes; // declaration order, all kinds interleaved
  std::vector<IodEdge> edges;
  SourceSpan span;

  const IodNode* find_node(std::string_view node_id) const;
  std::vector<std::string> node_ids(IodNodeKind kind) const;

  bool operator==(const IodGraph&) const = default;
};

// ---------------------------------------------------------------------------
// Sequence diagrams

enum class MessageKind { async, sync, reply };
enum class MessageFlag { none, found, lost };

std::string_view to_string(MessageKind kind);

struct SdMessage {
  std::string name;
  MessageKind kind = MessageKind::async;
  std::string from; // empty iff flag == found
  std::string to;   // empty iff flag == lost
  MessageFlag flag = MessageFlag::none;
  SourceSpan span;

  bool operator==(const SdMessage&) const = default;
};

enum class FragmentKind { alt, opt, par, loop };

std::string_view to_string(FragmentKind kind);

struct SdOperand;

struct SdFragment {
  FragmentKind kind = FragmentKind::alt;
  std::vector<SdOperand> operands;
  SourceSpan span;

  bool operator==(const SdFragment&) const;
};

struct SdItem;

struct SdOperand {
  std::optional<std::string> guard;
  std::vector<SdItem> items;

  bool operator==(const SdOperand&) const;
};

/// One entry of an interaction body: a message or a combined fragment.
/// The body is a tree, so fragment ranges are properly nested by
/// construction and the point order of every lifeline is the pre-order
/// position of its message ends.
struct SdItem {
  std::variant<SdMessage, SdFragment> value;

  bool operator==(const SdItem&) const = default;
};

struct SdLifeline {
  std::string id;
  SourceSpan span;

  bool operator==(const SdLifeline&) const = default;
};

struct SdGraph {
  std::string id;
  std::vector<SdLifeline> lifelines;
  std::vector<SdItem> items;
  SourceSpan span;

  bool has_lifeline(std::string_view lf) const;
  /// Messages in pre-order (the global point order).
  std::vector<const SdMessage*> messages() const;
  /// Fragments in pre-order.
  std::vector<const SdFragment*> fragments() const;

  bool operator==(const SdGraph&) const = default;
};

// ---------------------------------------------------------------------------
// Timing diagrams

struct TdLifeline {
  std::string id;
  std::vector<std::string> states; // ordered state alphabet
  SourceSpan span;

  bool operator==(const TdLifeline&) const = default;
};

struct TdSegment {
  std::string lifeline;
  std::string state;
  std::optional<TimeBounds> duration;
  SourceSpan span;

  bool operator==(const TdSegment&) const = default;
};

/// A state change. Its interaction point on the lifeline is its 1-based
/// position among the transitions of that lifeline.
struct TdTransition {
  std::string lifeline;
  std::string from;
  std::string to;
  std::optional<TimeBounds> time;
  std::optional<std::string> event;
  SourceSpan span;

  bool operator==(const TdTransition&) const = default;
};

struct TdPoint {
  std::string lifeline;
  std::size_t index = 1;

  bool operator==(const TdPoint&) const = default;
};

struct TdMessage {
  std::string name;
  TdPoint send;
  TdPoint recv;
  SourceSpan span;

  bool operator==(const TdMessage&) const = default;
};

struct TdGraph {
  std::string id;
  std::vector<TdLifeline> lifelines;
  std::vector<TdSegment> segments;
  std::vector<TdTransition> transitions;
  std::vector<TdMessage> messages;
  SourceSpan span;

  const TdLifeline* find_lifeline(std::string_view lf) const;
  std::vector<const TdSegment*> segments_of(std::string_view lf) const;
  std::vector<const TdTransition*> transitions_of(std::string_view lf) const;
  /// State held before the first transition of `lf`.
  std::string initial_state(std::string_view lf) const;
  /// State held after the last transition of `lf`.
  std::string final_state(std::string_view lf) const;

  bool operator==(const TdGraph&) const = default;
};

// ---------------------------------------------------------------------------
// The complete model

struct DiagramRef {
  DiagramKind kind = DiagramKind::iod;
  std::string diagram;

  bool operator==(const DiagramRef&) const = default;
};

struct InteractionModel {
  std::string name;
  std::vector<IodGraph> iods;
  std::vector<SdGraph> sds;
  std::vector<TdGraph> tds;
  /// Ref: interaction node id -> referenced diagram.
  std::map<std::string, DiagramRef> ref_map;

  const IodGraph* find_iod(std::string_view id) const;
  const SdGraph* find_sd(std::string_view id) const;
  const TdGraph* find_td(std::string_view id) const;
  std::optional<DiagramKind> kind_of(std::string_view diagram_id) const;
  /// IOD owning the interaction node, or nullptr.
  const IodGraph* owner_of(std::string_view node_id) const;
  /// All diagram ids: IODs, then SDs, then TDs.
  std::vector<std::string> diagram_ids() const;

  bool operator==(const InteractionModel&) const = default;
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  Severity severity = Severity::error;
  std::string rule;
  std::string diagram;
  std::string node;
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  /// Warnings do not make a model invalid.
  bool valid() const;
  std::size_t error_count() const;
  bool has(std::string_view rule) const;

  /// One line per violation: `LEVEL rule diagram:node message`.
  std::string to_text() const;
  std::string to_json() const;
};

ValidationReport validate(const InteractionModel& model);

/// Depth of the diagram in the Ref tree; the root IOD is level 0.
/// Throws Error("unknown-diagram") or Error("ref-cycle").
std::size_t hierarchy_level(const InteractionModel& model, std::string_view diagram_id);

/// Level of the IOD owning the interaction node. Throws Error("unknown-node").
std::size_t node_level(const InteractionModel& model, std::string_view node_id);

/// Ref applied to an interaction node. Throws Error("unknown-node") when the
/// node has no Ref entry.
DiagramRef referenced_diagram(const InteractionModel& model, std::string_view node_id);

/// The unreferenced IOD, if exactly one exists.
const IodGraph* root_iod(const InteractionModel& model);

} // namespace iodnet
