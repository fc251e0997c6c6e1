#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iodnet/diagram_model.hpp"
#include "iodnet/error.hpp"
#include "iodnet/source_span.hpp"

namespace iodnet {

struct ParseDiagnostic {
  Severity severity = Severity::error;
  SourceSpan span;
  std::string message;
  std::string code; // lex-error, syntax-error, duplicate-identifier, dangling-*-ref
};

struct ParseResult {
  std::optional<InteractionModel> model; // absent whenever an error diagnostic exists
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return model.has_value(); }
};

/// Parses `.iom` source. Never throws on malformed input.
ParseResult parse(std::string_view source, std::string file_name = "<input>");

/// Reads and parses a file. Throws Error("io-error") when unreadable.
ParseResult parse_file(const std::filesystem::path& path);

/// Canonical text form; parse(serialize(m)) is structurally equal to m.
std::string serialize(const InteractionModel& model);

/// `file:line:col: severity[code]: message`
std::string format_diagnostic(const ParseDiagnostic& d);

} // namespace iodnet
