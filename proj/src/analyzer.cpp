#include "iodnet/analyzer.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace iodnet {

std::string_view to_string(Verdict v) {
  switch (v) {
  case Verdict::holds: return "holds";
  case Verdict::fails: return "fails";
  case Verdict::unknown_truncated: return "unknown-truncated";
  }
  return "?";
}

std::optional<std::size_t> ReachabilityGraph::find(const Marking& m) const {
  auto it = index.find(m);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> ReachabilityGraph::out_degree() const {
  std::vector<std::size_t> deg(nodes.size(), 0);
  for (const auto& e : edges) ++deg[e.from];
  return deg;
}

std::vector<std::size_t> ReachabilityGraph::path_to(std::size_t node) const {
  std::vector<std::size_t> path;
  while (parent_edge.at(node) != npos) {
    path.push_back(parent_edge[node]);
    node = edges[parent_edge[node]].from;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<std::pair<GraphEdge, Marking>> successors(const FlatNet& net, const Marking& m, TimeMode mode) {
  std::vector<std::pair<GraphEdge, Marking>> out;
  const auto en = enabled(net, m, mode);
  for (const auto& e : en) {
    const auto& t = net.transitions[e.transition];
    if (mode == TimeMode::discrete && t.delay) {
      for (Time d = t.delay->lo; d <= t.delay->hi; ++d) {
        Binding b{d};
        out.push_back({{0, 0, e.transition, b}, fire(net, m, e.transition, b, mode)});
      }
    } else {
      out.push_back({{0, 0, e.transition, {}}, fire(net, m, e.transition, Binding{}, mode)});
    }
  }
  if (en.empty() && mode == TimeMode::discrete && net.has_timed_places())
    if (auto at = next_enabling_time(net, m)) {
      Marking next = m;
      next.clock = *at;
      out.push_back({{0, 0, std::nullopt, {}}, std::move(next)});
    }
  return out;
}

namespace {

Time clock_bound(const FlatNet& net) {
  Time sum = 0, window = 0;
  for (const auto& t : net.transitions) {
    if (t.delay) sum += t.delay->hi;
    if (t.guard.clock_window) window = std::max(window, t.guard.clock_window->hi);
  }
  return sum + window;
}

} // namespace

ReachabilityGraph build_state_space(const FlatNet& net, const ExplorationOptions& options) {
  if (options.bound == 0) throw Error("bad-bound", "the state-space bound must be at least 1");
  check_marking(net, net.initial);
  ReachabilityGraph g;
  g.bound = options.bound;
  g.mode = options.mode;
  const Time max_clock = clock_bound(net);
  Marking root = net.initial;
  g.nodes.push_back(root);
  g.parent_edge.push_back(ReachabilityGraph::npos);
  g.index.emplace(std::move(root), 0);

  std::vector<std::size_t> frontier{0};
  const std::size_t workers = std::max<std::size_t>(1, options.workers);
  while (!frontier.empty()) {
    std::vector<std::vector<std::pair<GraphEdge, Marking>>> expanded(frontier.size());
    auto work = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) expanded[i] = successors(net, g.nodes[frontier[i]], options.mode);
    };
    if (workers == 1 || frontier.size() < 2 * workers) {
      work(0, frontier.size());
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (frontier.size() + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk, end = std::min(frontier.size(), begin + chunk);
        if (begin < end) pool.emplace_back(work, begin, end);
      }
      for (auto& t : pool) t.join();
    }

    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      for (auto& [edge, m] : expanded[i]) {
        if (m.clock > max_clock) {
          g.truncated = true;
          continue;
        }
        edge.from = frontier[i];
        auto it = g.index.find(m);
        if (it == g.index.end()) {
          if (g.nodes.size() >= options.bound) {
            g.truncated = true;
            continue;
          }
          const std::size_t id = g.nodes.size();
          g.parent_edge.push_back(g.edges.size());
          g.nodes.push_back(m);
          it = g.index.emplace(std::move(m), id).first;
          next.push_back(id);
        }
        edge.to = it->second;
        g.edges.push_back(edge);
      }
    }
    frontier = std::move(next);
  }
  return g;
}

GraphStats stats_of(const ReachabilityGraph& g) { return {g.nodes.size(), g.edges.size(), g.truncated, 0}; }

Witness witness_for(const FlatNet& net, const ReachabilityGraph& g, std::size_t node) {
  Witness w;
  for (auto e : g.path_to(node)) {
    const auto& edge = g.edges[e];
    w.steps.push_back({edge.transition ? net.transitions[*edge.transition].id : "tick", edge.binding});
  }
  w.marking = g.nodes[node];
  return w;
}

Marking replay(const FlatNet& net, TimeMode mode, const Witness& w) {
  Marking m = net.initial;
  for (const auto& s : w.steps) {
    if (s.transition == "tick") {
      m = advance_time(net, m);
      continue;
    }
    auto idx = net.transition_index(s.transition);
    if (!idx) throw Error("not-enabled", "unknown transition " + s.transition);
    m = fire(net, m, *idx, s.binding, mode);
  }
  return m;
}

namespace {

PropertyReport make_report(std::string name, const ReachabilityGraph& g) {
  PropertyReport r;
  r.property = std::move(name);
  r.stats = stats_of(g);
  return r;
}

} // namespace

PropertyReport check_deadlock(const FlatNet& net, const ReachabilityGraph& g) {
  auto r = make_report("deadlock", g);
  if (g.truncated) {
    r.verdict = Verdict::unknown_truncated;
    return r;
  }
  const auto deg = g.out_degree();
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    if (deg[n] == 0 && !is_final_marking(net, g.nodes[n])) {
      r.verdict = Verdict::fails;
      r.witness = witness_for(net, g, n);
      r.details.push_back("dead marking " + to_string(net, g.nodes[n]));
      return r;
    }
  }
  return r;
}

PropertyReport check_resettable(const FlatNet& net, const ReachabilityGraph& g, ResetPolicy policy) {
  auto r = make_report("resettable", g);
  if (g.truncated) {
    r.verdict = Verdict::unknown_truncated;
    return r;
  }
  std::vector<std::vector<std::size_t>> reverse(g.nodes.size());
  for (const auto& e : g.edges) reverse[e.to].push_back(e.from);
  if (policy == ResetPolicy::final_resets)
    for (std::size_t n = 0; n < g.nodes.size(); ++n)
      if (is_final_marking(net, g.nodes[n])) reverse[g.root].push_back(n);
  std::vector<bool> reaches(g.nodes.size(), false);
  std::deque<std::size_t> queue{g.root};
  reaches[g.root] = true;
  while (!queue.empty()) {
    const auto n = queue.front();
    queue.pop_front();
    for (auto p : reverse[n])
      if (!reaches[p]) {
        reaches[p] = true;
        queue.push_back(p);
      }
  }
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    if (!reaches[n]) {
      r.verdict = Verdict::fails;
      r.witness = witness_for(net, g, n);
      r.details.push_back("initial marking unreachable from " + to_string(net, g.nodes[n]));
      return r;
    }
  }
  if (policy == ResetPolicy::final_resets) r.details.push_back("final markings reset to the initial marking");
  return r;
}

PropertyReport dead_transitions(const FlatNet& net, const ReachabilityGraph& g, const RuleTrace* trace) {
  auto r = make_report("dead-transitions", g);
  if (g.truncated) {
    r.verdict = Verdict::unknown_truncated;
    return r;
  }
  std::vector<bool> fired(net.transitions.size(), false);
  for (const auto& e : g.edges)
    if (e.transition) fired[*e.transition] = true;
  for (std::size_t t = 0; t < net.transitions.size(); ++t) {
    if (fired[t]) continue;
    r.verdict = Verdict::fails;
    std::string line = net.transitions[t].id;
    if (trace) line += ": " + describe_source(*trace, net.transitions[t].id) + " is unreachable";
    r.details.push_back(std::move(line));
  }
  return r;
}

PropertyReport check_bounded(const FlatNet& net, const ReachabilityGraph& g, std::size_t k) {
  auto r = make_report("bounded(k=" + std::to_string(k) + ")", g);
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    for (std::size_t p = 0; p < net.places.size(); ++p) {
      if (g.nodes[n].count(p) <= k) continue;
      r.verdict = Verdict::fails;
      r.witness = witness_for(net, g, n);
      r.details.push_back(net.places[p].id + " holds " + std::to_string(g.nodes[n].count(p)) + " tokens");
      return r;
    }
  }
  if (g.truncated) r.verdict = Verdict::unknown_truncated;
  return r;
}

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string edge_label(const FlatNet& net, const GraphEdge& e) {
  if (!e.transition) return "tick";
  std::string s = net.transitions[*e.transition].id;
  if (e.binding.delay) s += " " + e.binding.to_string();
  return s;
}

nlohmann::json witness_json(const Witness& w, const FlatNet& net) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : w.steps) {
    nlohmann::json j{{"transition", s.transition}};
    j["delay"] = s.binding.delay ? nlohmann::json(*s.binding.delay) : nlohmann::json(nullptr);
    steps.push_back(std::move(j));
  }
  return {{"steps", steps}, {"marking", to_string(net, w.marking)}};
}

} // namespace

std::string graph_to_dot(const FlatNet& net, const ReachabilityGraph& g, std::size_t max_nodes) {
  std::ostringstream out;
  out << "digraph reachability {\n  node [shape=box, fontname=\"Helvetica\", fontsize=9];\n";
  const std::size_t shown = std::min(max_nodes, g.nodes.size());
  if (shown < g.nodes.size()) out << "  // " << g.nodes.size() - shown << " nodes omitted\n";
  for (std::size_t n = 0; n < shown; ++n) {
    out << "  n" << n << " [label=" << dot_quote("M" + std::to_string(n) + "\n" + to_string(net, g.nodes[n]));
    if (n == g.root) out << ", peripheries=2";
    out << "];\n";
  }
  for (const auto& e : g.edges)
    if (e.from < shown && e.to < shown)
      out << "  n" << e.from << " -> n" << e.to << " [label=" << dot_quote(edge_label(net, e)) << "];\n";
  out << "}\n";
  return out.str();
}

std::string graph_to_json(const FlatNet& net, const ReachabilityGraph& g) {
  nlohmann::json j;
  j["format"] = "iodnet-reachability";
  j["version"] = 1;
  j["root"] = g.root;
  j["truncated"] = g.truncated;
  j["bound"] = g.bound;
  j["mode"] = std::string(to_string(g.mode));
  j["nodes"] = nlohmann::json::array();
  for (std::size_t n = 0; n < g.nodes.size(); ++n) j["nodes"].push_back({{"id", n}, {"marking", to_string(net, g.nodes[n])}});
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges) {
    nlohmann::json ej{{"from", e.from}, {"to", e.to}};
    ej["transition"] = e.transition ? nlohmann::json(net.transitions[*e.transition].id) : nlohmann::json("tick");
    ej["delay"] = e.binding.delay ? nlohmann::json(*e.binding.delay) : nlohmann::json(nullptr);
    j["edges"].push_back(std::move(ej));
  }
  return j.dump(2) + "\n";
}

bool AnalysisReport::all_hold() const {
  return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.verdict == Verdict::holds; });
}

bool AnalysisReport::any_unknown() const {
  return std::any_of(properties.begin(), properties.end(),
                     [](const auto& p) { return p.verdict == Verdict::unknown_truncated; });
}

std::string AnalysisReport::to_json(const FlatNet& net) const {
  nlohmann::json j;
  j["format"] = "iodnet-report";
  j["version"] = 1;
  j["input"] = input;
  j["options"] = {{"bound", options.bound}, {"mode", std::string(iodnet::to_string(options.mode))}};
  j["state_space"] = {{"nodes", graph.nodes}, {"edges", graph.edges}, {"truncated", graph.truncated}};
  if (include_timing) j["state_space"]["seconds"] = graph.seconds;
  j["properties"] = nlohmann::json::array();
  for (const auto& p : properties) {
    nlohmann::json pj{{"property", p.property}, {"verdict", std::string(iodnet::to_string(p.verdict))}, {"details", p.details}};
    pj["witness"] = p.witness ? witness_json(*p.witness, net) : nlohmann::json(nullptr);
    j["properties"].push_back(std::move(pj));
  }
  return j.dump(2) + "\n";
}

std::string AnalysisReport::to_text(const FlatNet& net) const {
  std::ostringstream out;
  out << "state space: " << graph.nodes << " nodes, " << graph.edges << " edges"
      << (graph.truncated ? " (truncated at bound " + std::to_string(options.bound) + ")" : "") << ", "
      << iodnet::to_string(options.mode) << " mode";
  if (include_timing) out << ", " << graph.seconds << " s";
  out << "\n";
  std::size_t w = 8;
  for (const auto& p : properties) w = std::max(w, p.property.size());
  for (const auto& p : properties) {
    out << p.property << std::string(w - p.property.size() + 2, ' ') << iodnet::to_string(p.verdict) << "\n";
    for (const auto& d : p.details) out << "    " << d << "\n";
    if (p.witness) {
      out << "    witness (" << p.witness->steps.size() << " steps):\n";
      for (const auto& s : p.witness->steps)
        out << "      " << s.transition << (s.binding.delay ? " " + s.binding.to_string() : "") << "\n";
      out << "    reaches " << to_string(net, p.witness->marking) << "\n";
    }
  }
  return out.str();
}

} // namespace iodnet
