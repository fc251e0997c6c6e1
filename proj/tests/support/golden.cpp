#include "golden.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "iodnet/model_parser.hpp"
#include "iodnet/transformer.hpp"

namespace iodnet::testkit {

std::string golden_text(const HcpnModel& net) {
  std::vector<std::string> lines;
  for (const auto& p : net.pages)
    lines.push_back("page " + p.id + " kind=" + std::string(to_string(p.kind)) + " level=" + std::to_string(p.level) +
                    " parent=" + (p.parent.empty() ? "-" : p.parent));
  for (const auto& c : net.color_sets) {
    std::string vals;
    for (const auto& v : c.values) vals += (vals.empty() ? "" : ",") + v;
    lines.push_back("colorset " + c.id + (c.timed ? " timed" : " untimed") + " {" + vals + "}");
  }
  for (const auto& p : net.places) {
    std::string l = "place " + p.id + " " + p.color_set + " " + std::string(to_string(p.role));
    if (p.terminal) l += " terminal";
    if (auto it = net.initial_marking.find(p.id); it != net.initial_marking.end())
      for (const auto& t : it->second) l += " token=" + to_string(t);
    lines.push_back(l);
  }
  for (const auto& t : net.transitions) {
    std::string l = "trans " + t.id + " " + (t.substitution ? "subst:" + t.subpage : std::string(to_string(t.role)));
    if (!t.guard.empty()) l += " guard=[" + t.guard.to_string() + "]";
    if (t.delay) l += " delay=" + std::to_string(t.delay->lo) + ".." + std::to_string(t.delay->hi);
    lines.push_back(l);
  }
  for (const auto& a : net.arcs) {
    const bool pt = a.direction == ArcDirection::place_to_transition;
    std::string l = "arc " + (pt ? a.place : a.transition) + " -> " + (pt ? a.transition : a.place) + " " + a.color;
    if (a.weight != 1) l += " w=" + std::to_string(a.weight);
    lines.push_back(l);
  }
  for (const auto& b : net.socket_bindings) lines.push_back("bind " + b.transition + " " + b.port + " " + b.socket);
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (auto& l : lines) {
    std::replace(l.begin(), l.end(), '\n', ' ');
    out += l + "\n";
  }
  return out;
}

const std::vector<std::string>& golden_rules() {
  static const std::vector<std::string> rules = {
      "T1.1",    "T1.2",    "T1.3",    "T1.4",  "T1.5",  "T1.6",  "T1.7",  "T1.8",  "T1.9",  "T2.10.1", "T2.10.2",
      "T2.10.3", "T2.10.4", "T3.11",   "T3.12", "T3.13", "T3.14", "T3.15", "T3.16", "T3.17", "T3.18"};
  return rules;
}

GoldenOutcome run_golden(const std::filesystem::path& dir, const std::string& rule) {
  GoldenOutcome out;
  const auto start = std::chrono::steady_clock::now();
  const auto parsed = parse_file(dir / (rule + ".iom"));
  if (!parsed.ok()) {
    out.detail = parsed.diagnostics.empty() ? "parse failed" : format_diagnostic(parsed.diagnostics.front());
    return out;
  }
  TransformResult result;
  try {
    result = transform(*parsed.model);
  } catch (const Error& e) {
    out.detail = e.what();
    return out;
  }
  const std::string actual = golden_text(result.net);
  const auto expected_path = dir / (rule + ".net");
  if (const char* update = std::getenv("IODNET_UPDATE_GOLDEN"); update && std::string(update) == "1") {
    std::ofstream(expected_path) << actual;
  }
  std::ifstream in(expected_path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string expected = ss.str();
  out.rule_traced = !result.trace.by_rule(rule).empty();
  out.matches = !expected.empty() && expected == actual;
  out.milliseconds = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (!out.matches) {
    std::istringstream a(actual), e(expected);
    std::string la, le;
    while (true) {
      const bool ga = static_cast<bool>(std::getline(a, la)), ge = static_cast<bool>(std::getline(e, le));
      if (!ga && !ge) break;
      if (!ga || !ge || la != le) {
        out.detail = "expected '" + (ge ? le : "<eof>") + "' got '" + (ga ? la : "<eof>") + "'";
        break;
      }
    }
    if (expected.empty()) out.detail = "missing golden " + expected_path.string();
  }
  return out;
}

} // namespace iodnet::testkit
