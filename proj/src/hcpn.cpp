#include "iodnet/hcpn.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace iodnet {

bool ColorSet::contains(std::string_view v) const {
  return std::find(values.begin(), values.end(), v) != values.end();
}

bool Guard::unsatisfiable() const {
  if (clock_window && clock_window->lo > clock_window->hi) return true;
  return std::find(labels.begin(), labels.end(), "false") != labels.end();
}

std::string Guard::to_string() const {
  std::string out;
  for (const auto& l : labels) out += (out.empty() ? "" : " && ") + l;
  if (clock_window) {
    out += (out.empty() ? "" : " && ");
    out += "clock in [" + std::to_string(clock_window->lo) + "," + std::to_string(clock_window->hi) + "]";
  }
  return out;
}

std::string_view to_string(PlaceRole r) {
  switch (r) {
  case PlaceRole::internal: return "internal";
  case PlaceRole::in_port: return "in-port";
  case PlaceRole::out_port: return "out-port";
  }
  return "?";
}

std::string_view to_string(TransitionRole r) {
  switch (r) {
  case TransitionRole::ordinary: return "ordinary";
  case TransitionRole::in: return "in";
  case TransitionRole::out: return "out";
  }
  return "?";
}

const Page* HcpnModel::find_page(std::string_view id) const {
  for (const auto& p : pages)
    if (p.id == id) return &p;
  return nullptr;
}

const Place* HcpnModel::find_place(std::string_view id) const {
  for (const auto& p : places)
    if (p.id == id) return &p;
  return nullptr;
}

const Transition* HcpnModel::find_transition(std::string_view id) const {
  for (const auto& t : transitions)
    if (t.id == id) return &t;
  return nullptr;
}

const ColorSet* HcpnModel::find_color_set(std::string_view id) const {
  for (const auto& c : color_sets)
    if (c.id == id) return &c;
  return nullptr;
}

std::vector<const Place*> HcpnModel::places_of(std::string_view page) const {
  std::vector<const Place*> out;
  for (const auto& p : places)
    if (p.page == page) out.push_back(&p);
  return out;
}

std::vector<const Transition*> HcpnModel::transitions_of(std::string_view page) const {
  std::vector<const Transition*> out;
  for (const auto& t : transitions)
    if (t.page == page) out.push_back(&t);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<HcpnViolation> check_invariants(const HcpnModel& net) {
  std::vector<HcpnViolation> out;
  auto violation = [&](std::string rule, std::string element, std::string msg) {
    out.push_back({std::move(rule), std::move(element), std::move(msg)});
  };

  std::map<std::string, const Page*> pages;
  for (const auto& p : net.pages)
    if (!pages.emplace(p.id, &p).second) violation("duplicate-id", p.id, "page declared twice");
  const Page* prime = net.find_page(net.prime_page);
  if (!prime) violation("prime-page", net.prime_page, "prime page is not declared");
  for (const auto& p : net.pages)
    if (p.parent.empty() && p.id != net.prime_page) violation("prime-page", p.id, "second parentless page");
  if (prime && !prime->parent.empty()) violation("prime-page", prime->id, "prime page has a parent");

  std::set<std::string> ids;
  std::map<std::string, const Place*> places;
  std::map<std::string, const Transition*> transitions;
  for (const auto& p : net.places) {
    if (!ids.insert(p.id).second) violation("duplicate-id", p.id, "identifier used twice");
    places[p.id] = &p;
    if (!pages.count(p.page)) violation("unknown-page", p.id, "place on undeclared page '" + p.page + "'");
    if (!net.find_color_set(p.color_set)) violation("color-set", p.id, "undeclared color set '" + p.color_set + "'");
    if (p.role != PlaceRole::internal && p.page == net.prime_page)
      violation("port-misuse", p.id, "the prime page has no ports");
  }
  for (const auto& t : net.transitions) {
    if (!ids.insert(t.id).second) violation("duplicate-id", t.id, "identifier used twice");
    transitions[t.id] = &t;
    if (!pages.count(t.page)) violation("unknown-page", t.id, "transition on undeclared page '" + t.page + "'");
  }

  std::map<std::string, std::vector<const Arc*>> arcs_of; // transition -> arcs
  std::map<std::string, std::vector<const Arc*>> arcs_at; // place -> arcs
  for (const auto& a : net.arcs) {
    if (!ids.insert(a.id).second) violation("duplicate-id", a.id, "identifier used twice");
    auto p = places.find(a.place);
    auto t = transitions.find(a.transition);
    if (p == places.end() || t == transitions.end()) {
      violation("arc-endpoint", a.id, "arc endpoint is not declared");
      continue;
    }
    if (p->second->page != t->second->page) violation("arc-endpoint", a.id, "arc crosses pages");
    const auto* cs = net.find_color_set(p->second->color_set);
    if (cs && !cs->contains(a.color)) violation("color-set", a.id, "arc color '" + a.color + "' outside color set");
    if (a.weight == 0) violation("arc-weight", a.id, "arc weight must be positive");
    arcs_of[a.transition].push_back(&a);
    arcs_at[a.place].push_back(&a);
  }

  std::map<std::string, std::vector<const Transition*>> referencing;
  for (const auto& t : net.transitions) {
    if (t.substitution) {
      const auto it = pages.find(t.subpage);
      if (it == pages.end() || t.subpage == net.prime_page)
        violation("page-assignment", t.id, "substitution transition must refer to a non-prime page");
      else if (it->second->parent != t.page)
        violation("page-assignment", t.id, "subpage's parent differs from the transition's page");
      referencing[t.subpage].push_back(&t);
      if (t.role != TransitionRole::ordinary) violation("page-assignment", t.id, "substitution cannot be In/Out");
    } else if (!t.subpage.empty()) {
      violation("page-assignment", t.id, "ordinary transition with a subpage");
    }
    bool timed_incident = false;
    for (const auto* a : arcs_of[t.id]) {
      const auto* cs = net.find_color_set(places[a->place]->color_set);
      timed_incident = timed_incident || (cs && cs->timed);
    }
    if ((t.delay || t.guard.clock_window) && !timed_incident)
      violation("untimed-delay", t.id, "time annotations need an incident timed place");
    if (t.delay && (t.delay->lo < 0 || t.delay->lo > t.delay->hi))
      violation("untimed-delay", t.id, "delay bounds must satisfy 0 <= lo <= hi");
  }

  for (const auto& p : net.pages) {
    if (p.id == net.prime_page) continue;
    const auto refs = referencing[p.id];
    if (refs.size() != 1)
      violation("page-tree", p.id, "page must be referenced by exactly one substitution transition");
    // ancestors must reach the prime page
    std::set<std::string> seen{p.id};
    const Page* cur = &p;
    while (cur && !cur->parent.empty()) {
      if (!seen.insert(cur->parent).second) {
        violation("page-tree", p.id, "page hierarchy contains a cycle");
        break;
      }
      auto it = pages.find(cur->parent);
      cur = it == pages.end() ? nullptr : it->second;
    }
    if (!cur) violation("page-tree", p.id, "page hierarchy does not reach the prime page");
    std::size_t ins = 0, outs = 0;
    for (const auto* t : net.transitions_of(p.id)) {
      ins += t->role == TransitionRole::in;
      outs += t->role == TransitionRole::out;
    }
    if (ins != 1) violation("in-out", p.id, "page needs exactly one In-transition");
    if (outs < 1) violation("in-out", p.id, "page needs at least one Out-transition");
  }

  // Ports touch only In (in-ports, consumed) or Out (out-ports, produced).
  for (const auto& p : net.places) {
    if (p.role == PlaceRole::internal) continue;
    for (const auto* a : arcs_at[p.id]) {
      const auto* t = transitions[a->transition];
      const bool ok = p.role == PlaceRole::in_port
                          ? (t->role == TransitionRole::in && a->direction == ArcDirection::place_to_transition)
                          : (t->role == TransitionRole::out && a->direction == ArcDirection::transition_to_place);
      if (!ok) violation("port-misuse", p.id, "port connected to '" + t->id + "'");
    }
  }

  for (const auto& t : net.transitions) {
    if (!t.substitution || !pages.count(t.subpage)) continue;
    std::set<std::string> in_sockets, out_sockets, bound_sockets, bound_ports;
    for (const auto* a : arcs_of[t.id])
      (a->direction == ArcDirection::place_to_transition ? in_sockets : out_sockets).insert(a->place);
    for (const auto& b : net.socket_bindings) {
      if (b.transition != t.id) continue;
      auto port = places.find(b.port);
      if (port == places.end() || port->second->page != t.subpage || port->second->role == PlaceRole::internal) {
        violation("socket-binding", t.id, "'" + b.port + "' is not a port of '" + t.subpage + "'");
        continue;
      }
      const auto& sockets = port->second->role == PlaceRole::in_port ? in_sockets : out_sockets;
      if (!sockets.count(b.socket)) {
        violation("socket-binding", t.id, "'" + b.socket + "' is not a matching socket");
        continue;
      }
      if (places[b.socket]->color_set != port->second->color_set)
        violation("socket-binding", t.id, "socket and port color sets differ");
      bound_ports.insert(b.port);
      bound_sockets.insert(b.socket);
    }
    for (const auto* p : net.places_of(t.subpage))
      if (p->role != PlaceRole::internal && !bound_ports.count(p->id))
        violation("unbound-socket", t.id, "port '" + p->id + "' is not bound");
    for (const auto& s : in_sockets)
      if (!bound_sockets.count(s)) violation("unbound-socket", t.id, "socket '" + s + "' is not bound");
    for (const auto& s : out_sockets)
      if (!bound_sockets.count(s)) violation("unbound-socket", t.id, "socket '" + s + "' is not bound");
    if (in_sockets.empty() || out_sockets.empty())
      violation("unbound-socket", t.id, "substitution transition has no input or no output socket");
  }

  for (const auto& [place, toks] : net.initial_marking) {
    auto it = places.find(place);
    if (it == places.end()) {
      violation("initial-marking", place, "marked place is not declared");
      continue;
    }
    if (it->second->role != PlaceRole::internal) violation("initial-marking", place, "ports cannot be marked");
    const auto* cs = net.find_color_set(it->second->color_set);
    for (const auto& tok : toks)
      if (cs && (!cs->contains(tok.color) || tok.timestamp.has_value() != cs->timed))
        violation("initial-marking", place, "ill-typed initial token");
  }
  return out;
}

// ---------------------------------------------------------------------------

NetBuilder::NetBuilder() {
  add_color_set({kCtrl, {kUnit}, false});
  add_color_set({kTimedCtrl, {kUnit}, true});
}

std::string NetBuilder::make_id(std::string_view page, std::string_view rule, std::string_view entity) {
  std::string base = std::string(page) + "/" + std::string(rule) + "/" + std::string(entity);
  auto& n = taken_[base];
  ++n;
  return n == 1 ? base : base + "#" + std::to_string(n);
}

void NetBuilder::add_page(Page page) {
  if (page.parent.empty()) net_.prime_page = page.id;
  net_.pages.push_back(std::move(page));
}

void NetBuilder::add_color_set(ColorSet cs) {
  for (const auto& c : net_.color_sets)
    if (c.id == cs.id) return;
  net_.color_sets.push_back(std::move(cs));
}

std::string NetBuilder::add_place(std::string id, std::string page, std::string color_set, PlaceRole role,
                                  std::string label) {
  place_index_[id] = net_.places.size();
  net_.places.push_back({id, std::move(page), std::move(color_set), role, false, std::move(label)});
  return id;
}

std::string NetBuilder::add_transition(Transition t) {
  transition_index_[t.id] = net_.transitions.size();
  std::string id = t.id;
  net_.transitions.push_back(std::move(t));
  return id;
}

std::string NetBuilder::add_arc(std::string id, std::string place, std::string transition, ArcDirection dir,
                                std::string color, std::uint32_t weight) {
  net_.arcs.push_back({id, std::move(place), std::move(transition), dir, std::move(color), weight});
  return id;
}

void NetBuilder::add_binding(SocketBinding b) { net_.socket_bindings.push_back(std::move(b)); }

void NetBuilder::mark(const std::string& place, Token token) { net_.initial_marking[place].push_back(std::move(token)); }

Transition& NetBuilder::transition(std::string_view id) {
  auto it = transition_index_.find(std::string(id));
  if (it == transition_index_.end()) throw Error("unknown-transition", "no transition '" + std::string(id) + "'");
  return net_.transitions[it->second];
}

Place& NetBuilder::place(std::string_view id) {
  auto it = place_index_.find(std::string(id));
  if (it == place_index_.end()) throw Error("unknown-place", "no place '" + std::string(id) + "'");
  return net_.places[it->second];
}

HcpnModel NetBuilder::build() && {
  for (auto& [_, toks] : net_.initial_marking) std::sort(toks.begin(), toks.end());
  return std::move(net_);
}

// ---------------------------------------------------------------------------

std::size_t Marking::total() const {
  std::size_t n = 0;
  for (const auto& bag : tokens) n += bag.size();
  return n;
}

void Marking::add(std::size_t place, Token t) {
  auto& bag = tokens[place];
  bag.insert(std::upper_bound(bag.begin(), bag.end(), t), std::move(t));
}

std::size_t MarkingHash::operator()(const Marking& m) const noexcept {
  std::size_t h = std::hash<Time>{}(m.clock);
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  for (std::size_t p = 0; p < m.tokens.size(); ++p) {
    if (m.tokens[p].empty()) continue;
    mix(p);
    for (const auto& t : m.tokens[p]) {
      mix(std::hash<std::string>{}(t.color));
      mix(t.timestamp ? std::hash<Time>{}(*t.timestamp) : 0x51ed27);
    }
  }
  return h;
}

std::optional<std::size_t> FlatNet::place_index(std::string_view id) const {
  auto it = std::lower_bound(places.begin(), places.end(), id, [](const FlatPlace& p, std::string_view v) {
    return p.id < v;
  });
  if (it == places.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - places.begin());
}

std::optional<std::size_t> FlatNet::transition_index(std::string_view id) const {
  auto it = std::lower_bound(transitions.begin(), transitions.end(), id,
                             [](const FlatTransition& t, std::string_view v) { return t.id < v; });
  if (it == transitions.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - transitions.begin());
}

const ColorSet* FlatNet::find_color_set(std::string_view id) const {
  for (const auto& c : color_sets)
    if (c.id == id) return &c;
  return nullptr;
}

bool FlatNet::has_timed_places() const {
  return std::any_of(places.begin(), places.end(), [](const auto& p) { return p.timed; });
}

Marking FlatNet::empty_marking() const {
  Marking m;
  m.tokens.resize(places.size());
  return m;
}

FlatNet flatten(const HcpnModel& net) {
  const auto violations = check_invariants(net);
  for (const auto& v : violations)
    if (v.rule == "unbound-socket") throw Error("unbound-socket", v.element + ": " + v.message);
  if (!violations.empty())
    throw Error("invalid-hcpn", violations.front().rule + " at " + violations.front().element + ": " +
                                    violations.front().message);

  std::map<std::string, const Place*> places;
  for (const auto& p : net.places) places[p.id] = &p;
  std::map<std::string, const Transition*> substitution_of_page;
  for (const auto& t : net.transitions)
    if (t.substitution) substitution_of_page[t.subpage] = &t;

  // Sockets bound to each port, and the substitution transition's arc from/to each socket.
  std::map<std::string, std::vector<std::string>> sockets_of_port;
  for (const auto& b : net.socket_bindings) sockets_of_port[b.port].push_back(b.socket);
  std::map<std::pair<std::string, std::string>, const Arc*> subst_arc; // (transition, place)
  for (const auto& a : net.arcs)
    if (net.find_transition(a.transition)->substitution) subst_arc[{a.transition, a.place}] = &a;

  FlatNet flat;
  flat.color_sets = net.color_sets;
  for (const auto& p : net.places) {
    if (p.role != PlaceRole::internal) continue;
    const auto* cs = net.find_color_set(p.color_set);
    flat.places.push_back({p.id, p.page, p.color_set, cs && cs->timed, p.terminal, p.label});
  }
  std::sort(flat.places.begin(), flat.places.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  for (const auto& t : net.transitions) {
    if (t.substitution) continue;
    FlatTransition ft{t.id, t.page, t.role, t.guard, t.delay, {}, {}, t.label};
    if (t.role == TransitionRole::in) {
      // The substitution transition's guard moves onto the entry of its page.
      const auto* sub = substitution_of_page.at(t.page);
      for (const auto& l : sub->guard.labels) ft.guard.labels.push_back(l);
      if (!ft.guard.clock_window) ft.guard.clock_window = sub->guard.clock_window;
    }
    flat.transitions.push_back(std::move(ft));
  }
  std::sort(flat.transitions.begin(), flat.transitions.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  std::set<std::pair<std::string, std::string>> connected; // (transition, socket) already wired
  for (const auto& a : net.arcs) {
    const auto* t = net.find_transition(a.transition);
    if (t->substitution) continue;
    auto& ft = flat.transitions[*flat.transition_index(t->id)];
    auto& side = a.direction == ArcDirection::place_to_transition ? ft.inputs : ft.outputs;
    const auto* p = places.at(a.place);
    if (p->role == PlaceRole::internal) {
      side.push_back({a.id, *flat.place_index(p->id), a.color, a.weight});
      continue;
    }
    const auto* sub = substitution_of_page.at(p->page);
    for (const auto& socket : sockets_of_port[p->id]) {
      if (!connected.insert({t->id, socket}).second) continue;
      const Arc* outer = subst_arc.at({sub->id, socket});
      side.push_back({a.id + "@" + socket, *flat.place_index(socket), outer->color, outer->weight});
    }
  }

  flat.initial = flat.empty_marking();
  for (const auto& [place, toks] : net.initial_marking)
    for (const auto& tok : toks) flat.initial.add(*flat.place_index(place), tok);
  return flat;
}

Marking initial_marking(const FlatNet& net) { return net.initial; }

Marking initial_marking(const HcpnModel& net) { return flatten(net).initial; }

std::string to_string(const Token& t) {
  if (!t.timestamp) return t.color;
  return t.color + "@" + std::to_string(*t.timestamp);
}

std::string to_string(const FlatNet& net, const Marking& m) {
  std::string out = "{";
  bool first = true;
  for (std::size_t p = 0; p < m.tokens.size(); ++p) {
    if (m.tokens[p].empty()) continue;
    out += first ? "" : ", ";
    first = false;
    out += net.places[p].id + ": ";
    for (std::size_t i = 0; i < m.tokens[p].size(); ++i) out += (i ? "+" : "") + to_string(m.tokens[p][i]);
  }
  out += "}";
  if (m.clock != 0) out += " @" + std::to_string(m.clock);
  return out;
}

} // namespace iodnet
