#pragma once

#include <cstdint>
#include <string>

namespace iodnet {

/// Location of an entity in its source file. Spans are provenance only:
/// they never take part in structural equality of model entities.
struct SourceSpan {
  std::string file;
  std::uint32_t line = 1;
  std::uint32_t column = 1;
  std::uint32_t length = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) { return true; }

  bool same_location(const SourceSpan& o) const {
    return file == o.file && line == o.line && column == o.column && length == o.length;
  }
};

} // namespace iodnet
