#include "iodnet/transformer.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace iodnet {

const TraceEntry* RuleTrace::producer_of(std::string_view element) const {
  for (const auto& e : entries)
    if (std::find(e.produced.begin(), e.produced.end(), element) != e.produced.end()) return &e;
  return nullptr;
}

std::vector<const TraceEntry*> RuleTrace::by_rule(std::string_view rule) const {
  std::vector<const TraceEntry*> out;
  for (const auto& e : entries)
    if (e.rule == rule) out.push_back(&e);
  return out;
}

std::vector<const TraceEntry*> RuleTrace::by_source(std::string_view source) const {
  std::vector<const TraceEntry*> out;
  for (const auto& e : entries)
    if (e.source == source) out.push_back(&e);
  return out;
}

bool RuleTrace::covers(std::string_view source) const {
  return std::any_of(entries.begin(), entries.end(), [&](const auto& e) { return e.source == source; });
}

std::string RuleTrace::to_json() const {
  nlohmann::json j;
  j["format"] = "iodnet-trace";
  j["version"] = 1;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : entries) j["entries"].push_back({{"rule", e.rule}, {"source", e.source}, {"produced", e.produced}});
  return j.dump(2) + "\n";
}

std::string RuleTrace::to_table() const {
  std::size_t rw = 4, sw = 6;
  for (const auto& e : entries) {
    rw = std::max(rw, e.rule.size());
    sw = std::max(sw, e.source.size());
  }
  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
  std::ostringstream out;
  out << pad("rule", rw) << " | " << pad("source", sw) << " | produced\n";
  for (const auto& e : entries) {
    out << pad(e.rule, rw) << " | " << pad(e.source, sw) << " |";
    for (std::size_t i = 0; i < e.produced.size(); ++i) out << (i ? ", " : " ") << e.produced[i];
    out << "\n";
  }
  return out.str();
}

bool is_known_rule(std::string_view rule) {
  static const std::set<std::string, std::less<>> rules = {
      "T1.1",   "T1.2",     "T1.3",     "T1.4",     "T1.5",      "T1.6",       "T1.7",     "T1.8",
      "T1.9",   "T2.10.1",  "T2.10.2",  "T2.10.3",  "T2.10.4",   "T3.11",      "T3.12",    "T3.13",
      "T3.14",  "T3.15",    "T3.16",    "T3.17",    "T3.18",     "Φ.page",     "Φ.lifeline", "Φ.send",
      "Φ.receive", "Φ.message", "Φ.sync", "Φ.alt", "Φ.opt",    "Φ.par",      "Φ.loop"};
  return rules.count(rule) > 0;
}

std::string describe_source(const RuleTrace& trace, std::string_view element) {
  const auto* e = trace.producer_of(element);
  if (!e) return "unknown element " + std::string(element);
  const std::string& r = e->rule;
  if (r == "T1.3" || r == "T1.8" || r == "T1.9") return "interaction node " + e->source;
  if (r == "T1.4") return "initial node " + e->source;
  if (r == "T1.5") return "final node " + e->source;
  if (r == "T1.6") return "fork/join node " + e->source;
  if (r == "T1.7") return "decision/merge node " + e->source;
  if (r.rfind("T2.", 0) == 0) return "edge " + e->source;
  if (r.rfind("Φ.", 0) == 0) return "sequence diagram element " + e->source;
  if (r.rfind("T3.", 0) == 0) return "timing diagram element " + e->source;
  return "diagram " + e->source;
}

namespace {

bool place_image(IodNodeKind k) {
  return k == IodNodeKind::initial || k == IodNodeKind::final_node || k == IodNodeKind::decision ||
         k == IodNodeKind::merge;
}

std::string local(const std::string& id, const std::string& page) {
  return id.size() > page.size() && id.compare(0, page.size(), page) == 0 ? id.substr(page.size() + 1) : id;
}

class Transformer {
public:
  explicit Transformer(const InteractionModel& m) : model_(m) {}

  TransformResult run() {
    const IodGraph* root = root_iod(model_);
    if (!root) throw Error("invalid-model", "model has no unique root IOD");
    const std::size_t e = open("T1.1", root->id);
    b_.add_page({root->id, root->id, DiagramKind::iod, 0, ""});
    produce(e, root->id);
    auto images = map_iod_body(*root, root->id, true);
    map_iod_children(*root, root->id, 0, images);
    return {std::move(b_).build(), std::move(trace_)};
  }

private:
  const InteractionModel& model_;
  NetBuilder b_;
  RuleTrace trace_;

  // -- trace and element helpers ------------------------------------------

  std::size_t open(std::string rule, std::string source) {
    trace_.entries.push_back({std::move(rule), std::move(source), {}});
    return trace_.entries.size() - 1;
  }
  void produce(std::size_t e, std::string id) { trace_.entries[e].produced.push_back(std::move(id)); }

  std::string place(std::size_t e, const std::string& page, std::string_view rule, std::string_view entity,
                    const std::string& cs, PlaceRole role = PlaceRole::internal, std::string label = {}) {
    std::string id = b_.make_id(page, rule, entity);
    b_.add_place(id, page, cs, role, std::move(label));
    produce(e, id);
    return id;
  }

  std::string transition(std::size_t e, const std::string& page, std::string_view rule, std::string_view entity,
                         TransitionRole role = TransitionRole::ordinary, std::string label = {}) {
    Transition t;
    t.id = b_.make_id(page, rule, entity);
    t.page = page;
    t.role = role;
    t.label = std::move(label);
    produce(e, t.id);
    return b_.add_transition(std::move(t));
  }

  // place -> transition
  void arc_in(std::size_t e, const std::string& page, std::string_view rule, const std::string& p,
              const std::string& t, std::string color = kUnit) {
    std::string id = b_.make_id(page, rule, "arc:" + local(p, page) + "->" + local(t, page));
    produce(e, b_.add_arc(id, p, t, ArcDirection::place_to_transition, std::move(color)));
  }

  // transition -> place
  void arc_out(std::size_t e, const std::string& page, std::string_view rule, const std::string& t,
               const std::string& p, std::string color = kUnit) {
    std::string id = b_.make_id(page, rule, "arc:" + local(t, page) + "->" + local(p, page));
    produce(e, b_.add_arc(id, p, t, ArcDirection::transition_to_place, std::move(color)));
  }

  void annotate(std::size_t e, const std::string& element, std::string_view attribute) {
    produce(e, element + ":" + std::string(attribute));
  }

  // -- IOD --------------------------------------------------------------

  struct NodeImage {
    IodNodeKind kind;
    std::string element;
  };
  using Images = std::map<std::string, NodeImage>;

  Images map_iod_body(const IodGraph& iod, const std::string& page, bool prime) {
    Images images;
    for (const auto& n : iod.nodes) {
      const std::string src = iod.id + ":" + n.id;
      std::string id;
      switch (n.kind) {
      case IodNodeKind::initial: {
        id = place(open("T1.4", src), page, "T1.4", n.id, kCtrl, PlaceRole::internal, n.id);
        if (prime) b_.mark(id, Token{kUnit, std::nullopt});
        break;
      }
      case IodNodeKind::final_node:
        id = place(open("T1.5", src), page, "T1.5", n.id, kCtrl, PlaceRole::internal, n.id);
        if (prime) b_.place(id).terminal = true;
        break;
      case IodNodeKind::decision:
      case IodNodeKind::merge:
        id = place(open("T1.7", src), page, "T1.7", n.id, kCtrl, PlaceRole::internal, n.id);
        break;
      case IodNodeKind::fork:
      case IodNodeKind::join:
        id = transition(open("T1.6", src), page, "T1.6", n.id, TransitionRole::ordinary, n.id);
        break;
      case IodNodeKind::interaction: {
        const auto ref = referenced_diagram(model_, n.id);
        const std::size_t e = open("T1.3", src);
        Transition t;
        t.id = b_.make_id(page, "T1.3", n.id);
        t.page = page;
        t.substitution = true;
        t.subpage = page + "/" + ref.diagram;
        t.label = n.id;
        produce(e, t.id);
        id = b_.add_transition(std::move(t));
        break;
      }
      }
      images[n.id] = {n.kind, id};
    }
    for (const auto& edge : iod.edges) map_edge(iod, page, images, edge);
    return images;
  }

  void map_edge(const IodGraph& iod, const std::string& page, const Images& images, const IodEdge& edge) {
    const auto& s = images.at(edge.source);
    const auto& d = images.at(edge.target);
    const std::string entity = edge.source + "->" + edge.target;
    const std::string src = iod.id + ":" + entity;
    const bool sp = place_image(s.kind), dp = place_image(d.kind);
    if (sp && !dp) {
      const std::size_t e = open("T2.10.1", src);
      arc_in(e, page, "T2.10.1", s.element, d.element);
      if (edge.guard) {
        b_.transition(d.element).guard.labels.push_back(*edge.guard);
        annotate(e, d.element, "guard");
      }
    } else if (sp && dp) {
      const std::size_t e = open("T2.10.2", src);
      const std::string t = transition(e, page, "T2.10.2", entity, TransitionRole::ordinary, edge.guard.value_or(""));
      if (edge.guard) b_.transition(t).guard.labels.push_back(*edge.guard);
      arc_in(e, page, "T2.10.2", s.element, t);
      arc_out(e, page, "T2.10.2", t, d.element);
    } else if (!sp && dp) {
      arc_out(open("T2.10.3", src), page, "T2.10.3", s.element, d.element);
    } else {
      const std::size_t e = open("T2.10.4", src);
      const std::string p = place(e, page, "T2.10.4", entity, kCtrl);
      arc_out(e, page, "T2.10.4", s.element, p);
      arc_in(e, page, "T2.10.4", p, d.element);
    }
  }

  void map_iod_children(const IodGraph& iod, const std::string& page, std::size_t level, const Images& images) {
    for (const auto& n : iod.nodes)
      if (n.kind == IodNodeKind::interaction) map_child(iod, n, page, level, images.at(n.id).element);
  }

  // -- child pages --------------------------------------------------------

  struct Sockets {
    std::vector<std::string> in, out;
  };

  Sockets sockets_of(const std::string& subst) {
    Sockets s;
    for (const auto& a : b_.net().arcs) {
      if (a.transition != subst) continue;
      auto& side = a.direction == ArcDirection::place_to_transition ? s.in : s.out;
      if (std::find(side.begin(), side.end(), a.place) == side.end()) side.push_back(a.place);
    }
    return s;
  }

  // Every port and every socket takes part in at least one binding; surplus
  // entries on either side pair with the last entry of the other.
  void bind(const std::string& subst, const std::vector<std::string>& ports, const std::vector<std::string>& sockets) {
    if (ports.empty() || sockets.empty()) return;
    const std::size_t n = std::max(ports.size(), sockets.size());
    for (std::size_t i = 0; i < n; ++i)
      b_.add_binding({subst, ports[std::min(i, ports.size() - 1)], sockets[std::min(i, sockets.size() - 1)]});
  }

  struct Wiring {
    std::string in;
    std::vector<std::string> in_ports;
    std::vector<std::string> out_ports;
  };

  Wiring open_page(std::size_t e8, const std::string& page, const std::vector<std::string>& lifelines) {
    Wiring w;
    w.in = transition(e8, page, "T1.8", "In", TransitionRole::in, "In");
    for (const auto& lf : lifelines) {
      const std::string port = place(e8, page, "T1.8", lf, kCtrl, PlaceRole::in_port, lf);
      arc_in(e8, page, "T1.8", port, w.in);
      w.in_ports.push_back(port);
    }
    return w;
  }

  std::string close_page(std::size_t e9, const std::string& page, const std::vector<std::string>& lifelines,
                         Wiring& w) {
    const std::string out = transition(e9, page, "T1.9", "Out", TransitionRole::out, "Out");
    for (const auto& lf : lifelines) {
      const std::string port = place(e9, page, "T1.9", lf, kCtrl, PlaceRole::out_port, lf);
      arc_out(e9, page, "T1.9", out, port);
      w.out_ports.push_back(port);
    }
    return out;
  }

  void map_child(const IodGraph& parent, const IodNode& node, const std::string& parent_page, std::size_t level,
                 const std::string& subst) {
    const auto ref = referenced_diagram(model_, node.id);
    const std::string page = parent_page + "/" + ref.diagram;
    const std::string src = parent.id + ":" + node.id;
    const char* page_rule = ref.kind == DiagramKind::iod ? "T1.2" : ref.kind == DiagramKind::sd ? "Φ.page" : "T3.11";
    const std::size_t ep = open(page_rule, ref.diagram);
    b_.add_page({page, ref.diagram, ref.kind, level + 1, parent_page});
    produce(ep, page);
    const Sockets sockets = sockets_of(subst);

    switch (ref.kind) {
    case DiagramKind::iod: {
      const IodGraph& iod = *model_.find_iod(ref.diagram);
      const std::size_t e8 = open("T1.8", src);
      Wiring w = open_page(e8, page, {"ctrl"});
      auto images = map_iod_body(iod, page, false);
      for (const auto& n : iod.nodes)
        if (n.kind == IodNodeKind::initial) arc_out(e8, page, "T1.8", w.in, images.at(n.id).element);
      std::string out_port;
      for (const auto& n : iod.nodes) {
        if (n.kind != IodNodeKind::final_node) continue;
        const std::size_t e9 = open("T1.9", src);
        if (out_port.empty()) {
          out_port = place(e9, page, "T1.9", "ctrl", kCtrl, PlaceRole::out_port, "ctrl");
          w.out_ports.push_back(out_port);
        }
        const std::string out = transition(e9, page, "T1.9", n.id, TransitionRole::out, "Out");
        arc_in(e9, page, "T1.9", images.at(n.id).element, out);
        arc_out(e9, page, "T1.9", out, out_port);
      }
      bind(subst, w.in_ports, sockets.in);
      bind(subst, w.out_ports, sockets.out);
      map_iod_children(iod, page, level + 1, images);
      break;
    }
    case DiagramKind::sd: {
      const SdGraph& sd = *model_.find_sd(ref.diagram);
      std::vector<std::string> lfs;
      for (const auto& l : sd.lifelines) lfs.push_back(l.id);
      Wiring w = open_page(open("T1.8", src), page, lfs);
      const std::string out = close_page(open("T1.9", src), page, lfs, w);
      SdMapper(*this, sd, page).run(w.in, out);
      bind(subst, w.in_ports, sockets.in);
      bind(subst, w.out_ports, sockets.out);
      break;
    }
    case DiagramKind::td: {
      const TdGraph& td = *model_.find_td(ref.diagram);
      std::vector<std::string> lfs;
      for (const auto& l : td.lifelines) lfs.push_back(l.id);
      Wiring w = open_page(open("T1.8", src), page, lfs);
      const std::string out = close_page(open("T1.9", src), page, lfs, w);
      map_td(td, page, w.in, out);
      bind(subst, w.in_ports, sockets.in);
      bind(subst, w.out_ports, sockets.out);
      break;
    }
    }
  }

  // -- SD ---------------------------------------------------------------

  class SdMapper {
  public:
    SdMapper(Transformer& t, const SdGraph& sd, std::string page) : t_(t), sd_(sd), page_(std::move(page)) {
      for (const auto& l : sd.lifelines) lifelines_.push_back(l.id);
      pair_replies();
    }

    void run(const std::string& in, const std::string& out) {
      Chains cur;
      for (const auto& lf : lifelines_) {
        const std::size_t e = t_.open("Φ.lifeline", sd_.id + ":" + lf);
        cur[lf] = t_.place(e, page_, "Φ.lifeline", lf, kCtrl, PlaceRole::internal, lf);
        t_.arc_out(e, page_, "Φ.lifeline", in, cur[lf]);
      }
      items(sd_.items, cur);
      for (const auto& lf : lifelines_) {
        const std::size_t e = t_.open("Φ.lifeline", sd_.id + ":" + lf);
        t_.arc_in(e, page_, "Φ.lifeline", cur[lf], out);
      }
    }

  private:
    using Chains = std::map<std::string, std::string>; // lifeline -> current place

    Transformer& t_;
    const SdGraph& sd_;
    std::string page_;
    std::vector<std::string> lifelines_;
    std::set<const SdMessage*> answered_; // sync messages with a matching reply
    std::size_t fragment_index_ = 0;

    void pair_replies() {
      std::vector<std::pair<const SdMessage*, bool>> open;
      for (const auto* m : sd_.messages()) {
        if (m->kind == MessageKind::sync) open.emplace_back(m, false);
        if (m->kind != MessageKind::reply) continue;
        for (auto it = open.rbegin(); it != open.rend(); ++it)
          if (!it->second && it->first->from == m->to && it->first->to == m->from) {
            it->second = true;
            answered_.insert(it->first);
            break;
          }
      }
    }

    void items(const std::vector<SdItem>& body, Chains& cur) {
      for (const auto& item : body) {
        if (const auto* m = std::get_if<SdMessage>(&item.value))
          message(*m, cur);
        else
          fragment(std::get<SdFragment>(item.value), cur);
      }
    }

    // One transition consuming the current place of every lifeline.
    std::string gather(std::size_t e, std::string_view rule, const std::string& entity, Chains& cur,
                       std::string label = {}) {
      const std::string t = t_.transition(e, page_, rule, entity, TransitionRole::ordinary, std::move(label));
      for (const auto& lf : lifelines_) t_.arc_in(e, page_, rule, cur[lf], t);
      return t;
    }

    // Fresh current place for every lifeline, produced by `t`.
    void scatter(std::size_t e, std::string_view rule, const std::string& entity, const std::string& t, Chains& cur) {
      for (const auto& lf : lifelines_) {
        cur[lf] = t_.place(e, page_, rule, entity + "@" + lf, kCtrl);
        t_.arc_out(e, page_, rule, t, cur[lf]);
      }
    }

    void message(const SdMessage& m, Chains& cur) {
      const std::string src = sd_.id + ":" + m.name;
      if (m.flag != MessageFlag::none)
        throw Error("unsupported", std::string("unsupported: ") + (m.flag == MessageFlag::found ? "found" : "lost") +
                                       "-message " + src);
      const std::size_t es = t_.open("Φ.send", src);
      const std::string send = t_.transition(es, page_, "Φ.send", m.name, TransitionRole::ordinary, "!" + m.name);
      t_.arc_in(es, page_, "Φ.send", cur[m.from], send);
      cur[m.from] = t_.place(es, page_, "Φ.send", m.name + "@" + m.from, kCtrl);
      t_.arc_out(es, page_, "Φ.send", send, cur[m.from]);

      const std::size_t em = t_.open("Φ.message", src);
      const std::string msg = t_.place(em, page_, "Φ.message", m.name, kCtrl, PlaceRole::internal, m.name);
      t_.arc_out(em, page_, "Φ.message", send, msg);

      const std::size_t er = t_.open("Φ.receive", src);
      const std::string recv = t_.transition(er, page_, "Φ.receive", m.name, TransitionRole::ordinary, "?" + m.name);
      t_.arc_in(er, page_, "Φ.receive", cur[m.to], recv);
      cur[m.to] = t_.place(er, page_, "Φ.receive", m.name + "@" + m.to, kCtrl);
      t_.arc_out(er, page_, "Φ.receive", recv, cur[m.to]);
      t_.arc_in(em, page_, "Φ.message", msg, recv);

      if (m.kind == MessageKind::sync && !answered_.count(&m)) {
        // Without a reply the caller still blocks until the call is received.
        const std::size_t ey = t_.open("Φ.sync", src);
        const std::string ack = t_.place(ey, page_, "Φ.sync", m.name + ".ack", kCtrl);
        t_.arc_out(ey, page_, "Φ.sync", recv, ack);
        const std::string await = t_.transition(ey, page_, "Φ.sync", m.name, TransitionRole::ordinary, "await " + m.name);
        t_.arc_in(ey, page_, "Φ.sync", ack, await);
        t_.arc_in(ey, page_, "Φ.sync", cur[m.from], await);
        cur[m.from] = t_.place(ey, page_, "Φ.sync", m.name + "@" + m.from, kCtrl);
        t_.arc_out(ey, page_, "Φ.sync", await, cur[m.from]);
      }
    }

    void fragment(const SdFragment& f, Chains& cur) {
      const std::string name = std::string(to_string(f.kind)) + std::to_string(++fragment_index_);
      const std::string src = sd_.id + ":" + name;
      const std::string rule = "Φ." + std::string(to_string(f.kind));
      const std::size_t e = t_.open(rule, src);
      switch (f.kind) {
      case FragmentKind::alt:
      case FragmentKind::opt: {
        const std::string enter = gather(e, rule, name + ".enter", cur);
        const std::string decision = t_.place(e, page_, rule, name + ".decision", kCtrl);
        t_.arc_out(e, page_, rule, enter, decision);
        const std::string merge = t_.place(e, page_, rule, name + ".merge", kCtrl);
        for (std::size_t k = 0; k < f.operands.size(); ++k) {
          const auto& op = f.operands[k];
          const std::string entity = name + "[" + std::to_string(k + 1) + "]";
          const std::size_t eo = t_.open(rule, src + "[" + std::to_string(k + 1) + "]");
          const std::string branch = t_.transition(eo, page_, rule, entity, TransitionRole::ordinary, op.guard.value_or(""));
          if (op.guard) t_.b_.transition(branch).guard.labels.push_back(*op.guard);
          t_.arc_in(eo, page_, rule, decision, branch);
          Chains inner = cur;
          scatter(eo, rule, entity, branch, inner);
          items(op.items, inner);
          const std::string exit = gather(eo, rule, entity + ".exit", inner);
          t_.arc_out(eo, page_, rule, exit, merge);
        }
        if (f.kind == FragmentKind::opt) {
          const std::string skip = t_.transition(e, page_, rule, name + "[else]", TransitionRole::ordinary, "else");
          t_.b_.transition(skip).guard.labels.push_back("else");
          t_.arc_in(e, page_, rule, decision, skip);
          t_.arc_out(e, page_, rule, skip, merge);
        }
        const std::string leave = t_.transition(e, page_, rule, name + ".leave");
        t_.arc_in(e, page_, rule, merge, leave);
        scatter(e, rule, name + ".leave", leave, cur);
        break;
      }
      case FragmentKind::par: {
        const std::string fork = gather(e, rule, name + ".fork", cur);
        std::vector<Chains> ends;
        for (std::size_t k = 0; k < f.operands.size(); ++k) {
          const std::string entity = name + "[" + std::to_string(k + 1) + "]";
          const std::size_t eo = t_.open(rule, src + "[" + std::to_string(k + 1) + "]");
          Chains inner = cur;
          scatter(eo, rule, entity, fork, inner);
          items(f.operands[k].items, inner);
          ends.push_back(std::move(inner));
        }
        const std::string join = t_.transition(e, page_, rule, name + ".join");
        for (auto& end : ends)
          for (const auto& lf : lifelines_) t_.arc_in(e, page_, rule, end[lf], join);
        scatter(e, rule, name + ".join", join, cur);
        break;
      }
      case FragmentKind::loop: {
        const auto& op = f.operands.front();
        const std::string enter = gather(e, rule, name + ".enter", cur);
        const std::string head = t_.place(e, page_, rule, name + ".head", kCtrl);
        t_.arc_out(e, page_, rule, enter, head);
        const std::string iterate = t_.transition(e, page_, rule, name + ".iterate", TransitionRole::ordinary,
                                                  op.guard.value_or(""));
        if (op.guard) t_.b_.transition(iterate).guard.labels.push_back(*op.guard);
        t_.arc_in(e, page_, rule, head, iterate);
        Chains inner = cur;
        scatter(e, rule, name + ".body", iterate, inner);
        items(op.items, inner);
        const std::string back = gather(e, rule, name + ".back", inner);
        t_.arc_out(e, page_, rule, back, head);
        const std::string exit = t_.transition(e, page_, rule, name + ".exit", TransitionRole::ordinary, "else");
        t_.b_.transition(exit).guard.labels.push_back("else");
        t_.arc_in(e, page_, rule, head, exit);
        scatter(e, rule, name + ".exit", exit, cur);
        break;
      }
      }
    }
  };

  // -- TD ---------------------------------------------------------------

  void map_td(const TdGraph& td, const std::string& page, const std::string& in, const std::string& out) {
    std::map<std::string, std::vector<std::string>> point_transitions; // lifeline -> transition ids by point
    for (const auto& lf : td.lifelines) {
      const std::string src = td.id + ":" + lf.id;
      const std::size_t ec = open("T3.15", src);
      const std::string cs = b_.make_id(page, "T3.15", lf.id);
      b_.add_color_set({cs, lf.states, true});
      produce(ec, cs);
      for (const auto& s : lf.states) annotate(open("T3.15", src + "." + s), cs, s);

      const std::size_t el = open("T3.12", src);
      const std::string p = place(el, page, "T3.12", lf.id, cs, PlaceRole::internal, lf.id);
      arc_out(el, page, "T3.12", in, p, td.initial_state(lf.id));

      const auto segments = td.segments_of(lf.id);
      const auto transitions = td.transitions_of(lf.id);
      auto& ids = point_transitions[lf.id];
      for (std::size_t i = 0; i < transitions.size(); ++i) {
        const auto& tr = *transitions[i];
        const std::string point = lf.id + "@" + std::to_string(i + 1);
        const std::size_t et = open("T3.13", td.id + ":" + point);
        const std::string t = transition(et, page, "T3.13", point, TransitionRole::ordinary, tr.from + "->" + tr.to);
        arc_in(et, page, "T3.13", p, t, tr.from);
        arc_out(et, page, "T3.13", t, p, tr.to);
        ids.push_back(t);
        if (tr.time) {
          b_.transition(t).guard.clock_window = *tr.time;
          annotate(open("T3.17", td.id + ":" + point + ".time"), t, "guard");
        }
        if (tr.event) {
          const std::size_t ee = open("T3.18", td.id + ":" + *tr.event);
          const std::string ev = place(ee, page, "T3.18", *tr.event, kTimedCtrl, PlaceRole::internal, *tr.event);
          arc_out(ee, page, "T3.18", in, ev);
          arc_in(ee, page, "T3.18", ev, t);
        }
      }
      // The duration of segment j delays the transition leaving it.
      std::string exit_place = p;
      std::string exit_color = td.final_state(lf.id);
      for (std::size_t j = 0; j < segments.size(); ++j) {
        if (!segments[j]->duration) continue;
        const std::string seg = lf.id + ".seg" + std::to_string(j + 1);
        const std::size_t ed = open("T3.16", td.id + ":" + seg);
        if (j < ids.size()) {
          b_.transition(ids[j]).delay = *segments[j]->duration;
          annotate(ed, ids[j], "delay");
        } else {
          // Last segment: a release transition holds the page open for its duration.
          const std::string release = transition(ed, page, "T3.16", seg, TransitionRole::ordinary, "release");
          b_.transition(release).delay = *segments[j]->duration;
          arc_in(ed, page, "T3.16", p, release, exit_color);
          exit_place = place(ed, page, "T3.16", lf.id + ".hold", kTimedCtrl);
          arc_out(ed, page, "T3.16", release, exit_place);
          exit_color = kUnit;
        }
      }
      arc_in(el, page, "T3.12", exit_place, out, exit_color);
    }
    for (const auto& m : td.messages) {
      const std::size_t em = open("T3.14", td.id + ":" + m.name);
      const std::string p = place(em, page, "T3.14", m.name, kTimedCtrl, PlaceRole::internal, m.name);
      arc_out(em, page, "T3.14", point_transitions.at(m.send.lifeline).at(m.send.index - 1), p);
      arc_in(em, page, "T3.14", p, point_transitions.at(m.recv.lifeline).at(m.recv.index - 1));
    }
  }
};

} // namespace

TransformResult transform(const InteractionModel& model, const TransformOptions& options) {
  if (options.validate_input) {
    const auto report = validate(model);
    if (!report.valid()) {
      for (const auto& v : report.violations)
        if (v.severity == Severity::error)
          throw Error("invalid-model",
                      v.rule + " at " + v.diagram + (v.node.empty() ? "" : ":" + v.node) + ": " + v.message);
    }
  }
  auto result = Transformer(model).run();
  const auto violations = check_invariants(result.net);
  if (!violations.empty())
    throw Error("transformer-bug", violations.front().rule + " at " + violations.front().element + ": " +
                                       violations.front().message);
  return result;
}

} // namespace iodnet
