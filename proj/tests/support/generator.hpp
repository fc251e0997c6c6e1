#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "iodnet/diagram_model.hpp"

namespace iodnet::testkit {

struct GeneratorOptions {
  std::size_t max_depth = 3;  // deepest Ref level below the root (>= 1)
  std::size_t max_blocks = 3; // control blocks per IOD
  bool sd = true;
  bool td = true;
  bool awkward_strings = false; // guards with quotes, backslashes, newlines
  bool chain = false;           // every IOD below max_depth refines exactly one child IOD
};

struct GeneratedModel {
  InteractionModel model;
  std::map<std::string, std::size_t> level; // intended level of every diagram
};

/// Deterministic random valid model built from structured blocks
/// (sequence, choice, parallel, loop), so every generated IOD is well formed.
GeneratedModel generate_model(std::uint64_t seed, const GeneratorOptions& options = {});

} // namespace iodnet::testkit
