#include "iodnet/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "iodnet/analyzer.hpp"
#include "iodnet/model_parser.hpp"
#include "iodnet/token_game.hpp"
#include "iodnet/transformer.hpp"

namespace iodnet {
namespace {

struct RunConfig {
  std::string input;
  std::string output;
  std::string format = "text";
  std::uint64_t seed = 0;
  std::size_t bound = 1'000'000;
  std::size_t workers = 1;
  std::size_t steps = 100;
  std::size_t k = 1;
  std::string time_mode;
  bool trace = false;
  bool flat = false;
  bool strict_home = false;
  bool timing = false;
};

struct Loaded {
  std::optional<InteractionModel> model;
  HcpnModel net;
  std::optional<RuleTrace> trace;
};

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_hcpn_json(const std::string& path) { return ends_with(path, ".hcpn.json"); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io-error", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error("io-error", "cannot write '" + path + "'");
}

// `x.hcpn.json` -> `x<suffix>`; other paths get the suffix appended after their stem.
std::string sibling(const std::string& path, const std::string& suffix) {
  if (ends_with(path, ".hcpn.json")) return path.substr(0, path.size() - 10) + suffix;
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return path.substr(0, dot) + suffix;
  return path + suffix;
}

class Session {
public:
  Session(std::ostream& out, std::ostream& err, bool tty) : out_(out), err_(err) {
    const char* env = std::getenv("IODNET_COLOR");
    const std::string mode = env ? env : "auto";
    color_ = tty && mode != "never";
  }

  std::string paint(std::string_view text, Verdict v) const {
    if (!color_) return std::string(text);
    const char* code = v == Verdict::holds ? "\x1b[32m" : v == Verdict::fails ? "\x1b[31m" : "\x1b[33m";
    return code + std::string(text) + "\x1b[0m";
  }

  // Parses and validates a source model; diagnostics go to err.
  std::optional<InteractionModel> load_model(const std::string& path) {
    const auto result = parse_file(path);
    for (const auto& d : result.diagnostics) err_ << format_diagnostic(d) << "\n";
    if (!result.ok()) return std::nullopt;
    const auto report = validate(*result.model);
    for (const auto& v : report.violations) err_ << path << ": " << to_string(v.severity) << "[" << v.rule << "]: "
                                                 << v.diagram << (v.node.empty() ? "" : ":" + v.node) << ": "
                                                 << v.message << "\n";
    if (!report.valid()) return std::nullopt;
    return result.model;
  }

  std::optional<Loaded> load(const std::string& path) {
    Loaded l;
    if (is_hcpn_json(path)) {
      l.net = hcpn_from_json(read_file(path));
      for (const auto& v : check_invariants(l.net)) {
        err_ << path << ": error[" << v.rule << "]: " << v.element << ": " << v.message << "\n";
        return std::nullopt;
      }
      return l;
    }
    l.model = load_model(path);
    if (!l.model) return std::nullopt;
    auto result = transform(*l.model);
    l.net = std::move(result.net);
    l.trace = std::move(result.trace);
    return l;
  }

  void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.output.empty())
      out_ << text;
    else
      write_file(cfg.output, text);
  }

  int validate_cmd(const RunConfig& cfg) {
    if (is_hcpn_json(cfg.input)) {
      if (!load(cfg.input)) return exit_failure;
      emit(cfg, cfg.input + ": valid\n");
      return exit_ok;
    }
    const auto result = parse_file(cfg.input);
    for (const auto& d : result.diagnostics) err_ << format_diagnostic(d) << "\n";
    if (!result.ok()) return exit_failure;
    const auto report = validate(*result.model);
    if (cfg.format == "json") {
      emit(cfg, report.to_json());
    } else {
      for (const auto& v : report.violations) err_ << cfg.input << ": " << report_line(v) << "\n";
      if (report.valid()) emit(cfg, cfg.input + ": valid\n");
    }
    return report.valid() ? exit_ok : exit_failure;
  }

  static std::string report_line(const Violation& v) {
    return std::string(to_string(v.severity)) + "[" + v.rule + "]: " + v.diagram + (v.node.empty() ? "" : ":" + v.node) +
           ": " + v.message;
  }

  int transform_cmd(const RunConfig& cfg) {
    auto loaded = load(cfg.input);
    if (!loaded) return exit_failure;
    const bool dot = cfg.format == "dot";
    emit(cfg, dot ? to_dot(loaded->net) : to_json(loaded->net));
    if (cfg.trace) {
      if (!loaded->trace) {
        err_ << "warning: " << cfg.input << " carries no rule trace\n";
      } else if (cfg.output.empty()) {
        out_ << loaded->trace->to_table();
      } else {
        write_file(sibling(cfg.output, ".trace.json"), loaded->trace->to_json());
      }
    }
    if (cfg.flat) {
      const FlatNet flat = flatten(loaded->net);
      const std::string text = dot ? to_dot(flat) : to_json(flat);
      if (cfg.output.empty())
        out_ << text;
      else
        write_file(sibling(cfg.output, dot ? ".flat.dot" : ".flat.json"), text);
    }
    return exit_ok;
  }

  static TimeMode mode_of(const std::string& s, TimeMode fallback) {
    if (s.empty()) return fallback;
    return s == "discrete" ? TimeMode::discrete : TimeMode::untimed;
  }

  int analyze_cmd(const RunConfig& cfg) {
    auto loaded = load(cfg.input);
    if (!loaded) return exit_failure;
    const FlatNet flat = flatten(loaded->net);
    AnalysisReport report;
    report.input = cfg.input;
    report.options = {cfg.bound, mode_of(cfg.time_mode, TimeMode::untimed), cfg.workers};
    report.include_timing = cfg.timing;
    const auto start = std::chrono::steady_clock::now();
    const auto g = build_state_space(flat, report.options);
    report.graph = stats_of(g);
    report.graph.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.properties.push_back(check_deadlock(flat, g));
    report.properties.push_back(
        check_resettable(flat, g, cfg.strict_home ? ResetPolicy::strict : ResetPolicy::final_resets));
    report.properties.push_back(dead_transitions(flat, g, loaded->trace ? &*loaded->trace : nullptr));
    report.properties.push_back(check_bounded(flat, g, cfg.k));

    if (cfg.format == "json") {
      emit(cfg, report.to_json(flat));
    } else if (cfg.format == "dot") {
      emit(cfg, graph_to_dot(flat, g));
    } else {
      std::string text = report.to_text(flat);
      for (const auto& p : report.properties) {
        const std::string word(to_string(p.verdict));
        const auto at = text.find(p.property);
        const auto pos = at == std::string::npos ? at : text.find(word, at + p.property.size());
        if (pos != std::string::npos) text.replace(pos, word.size(), paint(word, p.verdict));
      }
      emit(cfg, text);
    }
    bool failed = false;
    for (const auto& p : report.properties) failed = failed || p.verdict == Verdict::fails;
    if (failed) return exit_failure;
    return report.any_unknown() ? exit_unknown : exit_ok;
  }

  int simulate_cmd(const RunConfig& cfg) {
    auto loaded = load(cfg.input);
    if (!loaded) return exit_failure;
    const FlatNet flat = flatten(loaded->net);
    SimulationOptions opts{cfg.seed, cfg.steps, mode_of(cfg.time_mode, TimeMode::discrete)};
    const auto log = simulate(flat, opts);
    if (cfg.format == "json") {
      nlohmann::json j;
      j["format"] = "iodnet-simulation";
      j["version"] = 1;
      j["seed"] = cfg.seed;
      j["mode"] = std::string(to_string(opts.mode));
      j["steps"] = nlohmann::json::array();
      auto tokens = [&](const std::vector<std::pair<std::size_t, Token>>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& [p, t] : v) a.push_back({{"place", flat.places[p].id}, {"token", to_string(t)}});
        return a;
      };
      for (const auto& s : log.steps) {
        nlohmann::json sj{{"clock", s.clock},
                          {"transition", flat.transitions[s.transition].id},
                          {"consumed", tokens(s.consumed)},
                          {"produced", tokens(s.produced)}};
        sj["delay"] = s.binding.delay ? nlohmann::json(*s.binding.delay) : nlohmann::json(nullptr);
        j["steps"].push_back(std::move(sj));
      }
      j["termination"] = std::string(to_string(log.termination));
      j["final_marking"] = to_string(flat, log.final_marking);
      emit(cfg, j.dump(2) + "\n");
    } else {
      emit(cfg, format_log(flat, log));
    }
    if (log.termination == Termination::deadlock || log.termination == Termination::time_deadlock) {
      err_ << "simulation stopped: " << to_string(log.termination) << " at "
           << to_string(flat, log.final_marking) << "\n";
      return exit_failure;
    }
    return exit_ok;
  }

private:
  std::ostream& out_;
  std::ostream& err_;
  bool color_ = false;
};

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool tty) {
  CLI::App app{"Transforms UML2 interaction models into hierarchical colored Petri nets and analyzes them", "iodnet"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto input = [&](CLI::App* sub) { sub->add_option("input", cfg.input, "model (.iom) or net (.hcpn.json)")->required(); };
  auto output = [&](CLI::App* sub) { sub->add_option("-o,--output", cfg.output, "output path (default: stdout)"); };
  auto mode = [&](CLI::App* sub) {
    sub->add_option("--time-mode", cfg.time_mode, "untimed or discrete")->check(CLI::IsMember({"untimed", "discrete"}));
  };

  auto* v = app.add_subcommand("validate", "check a model for well-formedness");
  input(v);
  output(v);
  v->add_option("--format", cfg.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* t = app.add_subcommand("transform", "emit the hierarchical net");
  input(t);
  output(t);
  t->add_option("--format", cfg.format, "json (default) or dot")->check(CLI::IsMember({"json", "dot"}));
  t->add_flag("--trace", cfg.trace, "also emit the rule trace");
  t->add_flag("--flat", cfg.flat, "also emit the flattened net");

  auto* a = app.add_subcommand("analyze", "explore the state space and check properties");
  input(a);
  output(a);
  mode(a);
  a->add_option("--format", cfg.format, "text, json or dot")->check(CLI::IsMember({"text", "json", "dot"}));
  a->add_option("--bound", cfg.bound, "maximum number of markings")->check(CLI::PositiveNumber);
  a->add_option("--workers", cfg.workers, "exploration threads")->check(CLI::PositiveNumber);
  a->add_option("-k,--k", cfg.k, "token bound per place");
  a->add_flag("--strict-home", cfg.strict_home, "do not let final markings reset to M0");
  a->add_flag("--timing", cfg.timing, "report exploration time");

  auto* s = app.add_subcommand("simulate", "seeded random run over the flattened net");
  input(s);
  output(s);
  mode(s);
  s->add_option("--format", cfg.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  s->add_option("--seed", cfg.seed, "PRNG seed");
  s->add_option("--steps", cfg.steps, "maximum number of firings");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_io;
  }

  Session session(out, err, tty);
  try {
    if (*v) return session.validate_cmd(cfg);
    if (*t) return session.transform_cmd(cfg);
    if (*a) return session.analyze_cmd(cfg);
    return session.simulate_cmd(cfg);
  } catch (const Error& e) {
    err << "error[" << e.code() << "]: " << e.what() << "\n";
    return e.code() == "io-error" ? exit_io : exit_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  }
}

} // namespace iodnet
