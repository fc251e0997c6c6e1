#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "iodnet/hcpn.hpp"

namespace iodnet {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json bounds_json(const std::optional<TimeBounds>& b) {
  if (!b) return nullptr;
  return json::array({b->lo, b->hi});
}

std::optional<TimeBounds> bounds_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 2) throw Error("bad-hcpn-json", "time bounds must be [lo, hi]");
  return TimeBounds{j.at(0).get<Time>(), j.at(1).get<Time>()};
}

json guard_json(const Guard& g) {
  return json{{"labels", g.labels}, {"clock_window", bounds_json(g.clock_window)}};
}

json token_json(const Token& t) {
  json j{{"color", t.color}};
  j["timestamp"] = t.timestamp ? json(*t.timestamp) : json(nullptr);
  return j;
}

Token token_from(const json& j) {
  Token t{j.at("color").get<std::string>(), std::nullopt};
  if (j.contains("timestamp") && !j.at("timestamp").is_null()) t.timestamp = j.at("timestamp").get<Time>();
  return t;
}

json color_sets_json(const std::vector<ColorSet>& sets) {
  json out = json::array();
  for (const auto& c : sets) out.push_back({{"id", c.id}, {"values", c.values}, {"timed", c.timed}});
  return out;
}

DiagramKind kind_from(const std::string& s) {
  if (s == "iod") return DiagramKind::iod;
  if (s == "sd") return DiagramKind::sd;
  if (s == "td") return DiagramKind::td;
  throw Error("bad-hcpn-json", "unknown diagram kind '" + s + "'");
}

PlaceRole place_role_from(const std::string& s) {
  if (s == "internal") return PlaceRole::internal;
  if (s == "in-port") return PlaceRole::in_port;
  if (s == "out-port") return PlaceRole::out_port;
  throw Error("bad-hcpn-json", "unknown place role '" + s + "'");
}

TransitionRole transition_role_from(const std::string& s) {
  if (s == "ordinary") return TransitionRole::ordinary;
  if (s == "in") return TransitionRole::in;
  if (s == "out") return TransitionRole::out;
  throw Error("bad-hcpn-json", "unknown transition role '" + s + "'");
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string short_label(std::string_view id, std::string_view label) {
  if (!label.empty()) return std::string(label);
  auto slash = id.rfind('/');
  return std::string(slash == std::string_view::npos ? id : id.substr(slash + 1));
}

} // namespace

std::string to_json(const HcpnModel& net) {
  json j;
  j["format"] = "iodnet-hcpn";
  j["version"] = kFormatVersion;
  j["prime_page"] = net.prime_page;
  j["color_sets"] = color_sets_json(net.color_sets);
  j["pages"] = json::array();
  for (const auto& p : net.pages)
    j["pages"].push_back({{"id", p.id},
                          {"diagram", p.diagram},
                          {"kind", std::string(to_string(p.kind))},
                          {"level", p.level},
                          {"parent", p.parent.empty() ? json(nullptr) : json(p.parent)}});
  j["places"] = json::array();
  for (const auto& p : net.places)
    j["places"].push_back({{"id", p.id},
                           {"page", p.page},
                           {"color_set", p.color_set},
                           {"role", std::string(to_string(p.role))},
                           {"terminal", p.terminal},
                           {"label", p.label}});
  j["transitions"] = json::array();
  for (const auto& t : net.transitions)
    j["transitions"].push_back({{"id", t.id},
                                {"page", t.page},
                                {"substitution", t.substitution},
                                {"subpage", t.substitution ? json(t.subpage) : json(nullptr)},
                                {"role", std::string(to_string(t.role))},
                                {"guard", guard_json(t.guard)},
                                {"delay", bounds_json(t.delay)},
                                {"label", t.label}});
  j["arcs"] = json::array();
  for (const auto& a : net.arcs) {
    const bool pt = a.direction == ArcDirection::place_to_transition;
    j["arcs"].push_back({{"id", a.id},
                         {"source", pt ? a.place : a.transition},
                         {"target", pt ? a.transition : a.place},
                         {"direction", pt ? "place-to-transition" : "transition-to-place"},
                         {"color", a.color},
                         {"weight", a.weight}});
  }
  j["socket_bindings"] = json::array();
  for (const auto& b : net.socket_bindings)
    j["socket_bindings"].push_back({{"transition", b.transition}, {"port", b.port}, {"socket", b.socket}});
  j["initial_marking"] = json::array();
  for (const auto& [place, toks] : net.initial_marking)
    for (const auto& t : toks) {
      json tj = token_json(t);
      tj["place"] = place;
      j["initial_marking"].push_back(std::move(tj));
    }
  return j.dump(2) + "\n";
}

HcpnModel hcpn_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error("bad-hcpn-json", e.what());
  }
  try {
    if (j.value("format", "") != "iodnet-hcpn") throw Error("bad-hcpn-json", "not an iodnet-hcpn document");
    if (j.value("version", 0) != kFormatVersion) throw Error("bad-hcpn-json", "unsupported format version");
    HcpnModel net;
    net.prime_page = j.at("prime_page").get<std::string>();
    for (const auto& c : j.at("color_sets"))
      net.color_sets.push_back({c.at("id").get<std::string>(), c.at("values").get<std::vector<std::string>>(),
                                c.at("timed").get<bool>()});
    for (const auto& p : j.at("pages"))
      net.pages.push_back({p.at("id").get<std::string>(), p.at("diagram").get<std::string>(),
                           kind_from(p.at("kind").get<std::string>()), p.at("level").get<std::size_t>(),
                           p.at("parent").is_null() ? std::string{} : p.at("parent").get<std::string>()});
    for (const auto& p : j.at("places"))
      net.places.push_back({p.at("id").get<std::string>(), p.at("page").get<std::string>(),
                            p.at("color_set").get<std::string>(), place_role_from(p.at("role").get<std::string>()),
                            p.value("terminal", false), p.value("label", "")});
    for (const auto& t : j.at("transitions")) {
      Transition tr;
      tr.id = t.at("id").get<std::string>();
      tr.page = t.at("page").get<std::string>();
      tr.substitution = t.at("substitution").get<bool>();
      if (!t.at("subpage").is_null()) tr.subpage = t.at("subpage").get<std::string>();
      tr.role = transition_role_from(t.at("role").get<std::string>());
      tr.guard.labels = t.at("guard").at("labels").get<std::vector<std::string>>();
      tr.guard.clock_window = bounds_from(t.at("guard").at("clock_window"));
      tr.delay = bounds_from(t.at("delay"));
      tr.label = t.value("label", "");
      net.transitions.push_back(std::move(tr));
    }
    for (const auto& a : j.at("arcs")) {
      const auto dir = a.at("direction").get<std::string>();
      Arc arc;
      arc.id = a.at("id").get<std::string>();
      if (dir == "place-to-transition") {
        arc.direction = ArcDirection::place_to_transition;
        arc.place = a.at("source").get<std::string>();
        arc.transition = a.at("target").get<std::string>();
      } else if (dir == "transition-to-place") {
        arc.direction = ArcDirection::transition_to_place;
        arc.transition = a.at("source").get<std::string>();
        arc.place = a.at("target").get<std::string>();
      } else {
        throw Error("bad-hcpn-json", "unknown arc direction '" + dir + "'");
      }
      arc.color = a.value("color", std::string(kUnit));
      arc.weight = a.value("weight", 1u);
      net.arcs.push_back(std::move(arc));
    }
    for (const auto& b : j.at("socket_bindings"))
      net.socket_bindings.push_back({b.at("transition").get<std::string>(), b.at("port").get<std::string>(),
                                     b.at("socket").get<std::string>()});
    for (const auto& t : j.at("initial_marking")) net.initial_marking[t.at("place").get<std::string>()].push_back(token_from(t));
    for (auto& [_, toks] : net.initial_marking) std::sort(toks.begin(), toks.end());
    return net;
  } catch (const json::exception& e) {
    throw Error("bad-hcpn-json", e.what());
  }
}

std::string to_json(const FlatNet& net) {
  json j;
  j["format"] = "iodnet-flat";
  j["version"] = kFormatVersion;
  j["color_sets"] = color_sets_json(net.color_sets);
  j["places"] = json::array();
  for (const auto& p : net.places)
    j["places"].push_back({{"id", p.id},
                           {"page", p.page},
                           {"color_set", p.color_set},
                           {"timed", p.timed},
                           {"terminal", p.terminal},
                           {"label", p.label}});
  auto arcs = [&](const std::vector<ArcRef>& refs) {
    json out = json::array();
    for (const auto& a : refs)
      out.push_back({{"id", a.id}, {"place", net.places[a.place].id}, {"color", a.color}, {"weight", a.weight}});
    return out;
  };
  j["transitions"] = json::array();
  for (const auto& t : net.transitions)
    j["transitions"].push_back({{"id", t.id},
                                {"page", t.page},
                                {"role", std::string(to_string(t.role))},
                                {"guard", guard_json(t.guard)},
                                {"delay", bounds_json(t.delay)},
                                {"inputs", arcs(t.inputs)},
                                {"outputs", arcs(t.outputs)},
                                {"label", t.label}});
  j["initial_marking"] = json::array();
  for (std::size_t p = 0; p < net.initial.tokens.size(); ++p)
    for (const auto& t : net.initial.tokens[p]) {
      json tj = token_json(t);
      tj["place"] = net.places[p].id;
      j["initial_marking"].push_back(std::move(tj));
    }
  return j.dump(2) + "\n";
}

std::string to_dot(const HcpnModel& net) {
  std::ostringstream out;
  out << "digraph hcpn {\n  rankdir=LR;\n  node [fontname=\"Helvetica\", fontsize=10];\n";
  std::size_t cluster = 0;
  for (const auto& page : net.pages) {
    out << "  subgraph cluster_" << cluster++ << " {\n    label=" << quote(page.id) << ";\n";
    for (const auto* p : net.places_of(page.id)) {
      out << "    " << quote(p->id) << " [shape=ellipse, label=" << quote(short_label(p->id, p->label));
      if (p->role != PlaceRole::internal) out << ", style=dashed";
      if (p->terminal) out << ", peripheries=2";
      out << "];\n";
    }
    for (const auto* t : net.transitions_of(page.id)) {
      std::string label = short_label(t->id, t->label);
      if (!t->guard.empty()) label += "\n[" + t->guard.to_string() + "]";
      out << "    " << quote(t->id) << " [shape=box, label=" << quote(label);
      if (t->substitution) out << ", peripheries=2";
      out << "];\n";
    }
    out << "  }\n";
  }
  for (const auto& a : net.arcs) {
    const bool pt = a.direction == ArcDirection::place_to_transition;
    out << "  " << quote(pt ? a.place : a.transition) << " -> " << quote(pt ? a.transition : a.place);
    if (a.color != kUnit) out << " [label=" << quote(a.color) << "]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string to_dot(const FlatNet& net) {
  std::ostringstream out;
  out << "digraph flat {\n  rankdir=LR;\n  node [fontname=\"Helvetica\", fontsize=10];\n";
  std::vector<std::string> pages;
  for (const auto& p : net.places) pages.push_back(p.page);
  for (const auto& t : net.transitions) pages.push_back(t.page);
  std::sort(pages.begin(), pages.end());
  pages.erase(std::unique(pages.begin(), pages.end()), pages.end());
  for (std::size_t c = 0; c < pages.size(); ++c) {
    out << "  subgraph cluster_" << c << " {\n    label=" << quote(pages[c]) << ";\n";
    for (std::size_t i = 0; i < net.places.size(); ++i) {
      const auto& p = net.places[i];
      if (p.page != pages[c]) continue;
      std::string label = short_label(p.id, p.label);
      if (!net.initial.tokens[i].empty()) label += "\n" + std::to_string(net.initial.tokens[i].size()) + " token(s)";
      out << "    " << quote(p.id) << " [shape=ellipse, label=" << quote(label);
      if (p.terminal) out << ", peripheries=2";
      out << "];\n";
    }
    for (const auto& t : net.transitions) {
      if (t.page != pages[c]) continue;
      std::string label = short_label(t.id, t.label);
      if (!t.guard.empty()) label += "\n[" + t.guard.to_string() + "]";
      out << "    " << quote(t.id) << " [shape=box, label=" << quote(label) << "];\n";
    }
    out << "  }\n";
  }
  for (const auto& t : net.transitions) {
    for (const auto& a : t.inputs) out << "  " << quote(net.places[a.place].id) << " -> " << quote(t.id) << ";\n";
    for (const auto& a : t.outputs) out << "  " << quote(t.id) << " -> " << quote(net.places[a.place].id) << ";\n";
  }
  out << "}\n";
  return out.str();
}

} // namespace iodnet
