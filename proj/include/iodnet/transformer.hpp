#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "iodnet/diagram_model.hpp"
#include "iodnet/hcpn.hpp"

namespace iodnet {

/// One rule application: `source` is `diagram` or `diagram:entity`.
/// `produced` lists net element ids; annotation entries (delays, guards,
/// state colors) name their target as `<element>:<attribute>`.
struct TraceEntry {
  std::string rule;
  std::string source;
  std::vector<std::string> produced;

  bool operator==(const TraceEntry&) const = default;
};

struct RuleTrace {
  std::vector<TraceEntry> entries;

  /// Entry whose `produced` contains `element`, or nullptr.
  const TraceEntry* producer_of(std::string_view element) const;
  std::vector<const TraceEntry*> by_rule(std::string_view rule) const;
  std::vector<const TraceEntry*> by_source(std::string_view source) const;
  bool covers(std::string_view source) const;

  std::string to_json() const;
  /// `rule | source | produced` per entry.
  std::string to_table() const;

  bool operator==(const RuleTrace&) const = default;
};

/// Whether `rule` is one of the transformation's rule identifiers.
bool is_known_rule(std::string_view rule);

/// Human-readable name of the model entity behind a net element, e.g.
/// `interaction node Identification:EjectCard`.
std::string describe_source(const RuleTrace& trace, std::string_view element);

struct TransformOptions {
  bool validate_input = true;
};

struct TransformResult {
  HcpnModel net;
  RuleTrace trace;
};

/// Maps the root IOD to the prime page and every referenced diagram to a
/// page below the substitution transition that references it. Throws
/// Error("invalid-model") for models with validation errors and
/// Error("unsupported") for found or lost messages.
TransformResult transform(const InteractionModel& model, const TransformOptions& options = {});

} // namespace iodnet
