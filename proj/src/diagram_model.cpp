#include "iodnet/diagram_model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace iodnet {

std::string_view to_string(DiagramKind kind) {
  switch (kind) {
  case DiagramKind::iod: return "iod";
  case DiagramKind::sd: return "sd";
  case DiagramKind::td: return "td";
  }
  return "?";
}

std::string_view to_string(IodNodeKind kind) {
  switch (kind) {
  case IodNodeKind::initial: return "initial";
  case IodNodeKind::final_node: return "final";
  case IodNodeKind::interaction: return "interaction";
  case IodNodeKind::fork: return "fork";
  case IodNodeKind::join: return "join";
  case IodNodeKind::decision: return "decision";
  case IodNodeKind::merge: return "merge";
  }
  return "?";
}

bool is_place_like(IodNodeKind kind) {
  return kind == IodNodeKind::initial || kind == IodNodeKind::final_node ||
         kind == IodNodeKind::decision || kind == IodNodeKind::merge;
}

std::string_view to_string(MessageKind kind) {
  switch (kind) {
  case MessageKind::async: return "async";
  case MessageKind::sync: return "sync";
  case MessageKind::reply: return "reply";
  }
  return "?";
}

std::string_view to_string(FragmentKind kind) {
  switch (kind) {
  case FragmentKind::alt: return "alt";
  case FragmentKind::opt: return "opt";
  case FragmentKind::par: return "par";
  case FragmentKind::loop: return "loop";
  }
  return "?";
}

bool SdFragment::operator==(const SdFragment& o) const {
  return kind == o.kind && operands == o.operands;
}

bool SdOperand::operator==(const SdOperand& o) const {
  return guard == o.guard && items == o.items;
}

const IodNode* IodGraph::find_node(std::string_view node_id) const {
  for (const auto& n : nodes)
    if (n.id == node_id) return &n;
  return nullptr;
}

std::vector<std::string> IodGraph::node_ids(IodNodeKind kind) const {
  std::vector<std::string> out;
  for (const auto& n : nodes)
    if (n.kind == kind) out.push_back(n.id);
  return out;
}

bool SdGraph::has_lifeline(std::string_view lf) const {
  return std::any_of(lifelines.begin(), lifelines.end(), [&](const auto& l) { return l.id == lf; });
}

namespace {

void collect(const std::vector<SdItem>& items, std::vector<const SdMessage*>* msgs,
             std::vector<const SdFragment*>* frags) {
  for (const auto& item : items) {
    if (const auto* m = std::get_if<SdMessage>(&item.value)) {
      if (msgs) msgs->push_back(m);
    } else {
      const auto& f = std::get<SdFragment>(item.value);
      if (frags) frags->push_back(&f);
      for (const auto& op : f.operands) collect(op.items, msgs, frags);
    }
  }
}

} // namespace

std::vector<const SdMessage*> SdGraph::messages() const {
  std::vector<const SdMessage*> out;
  collect(items, &out, nullptr);
  return out;
}

std::vector<const SdFragment*> SdGraph::fragments() const {
  std::vector<const SdFragment*> out;
  collect(items, nullptr, &out);
  return out;
}

const TdLifeline* TdGraph::find_lifeline(std::string_view lf) const {
  for (const auto& l : lifelines)
    if (l.id == lf) return &l;
  return nullptr;
}

std::vector<const TdSegment*> TdGraph::segments_of(std::string_view lf) const {
  std::vector<const TdSegment*> out;
  for (const auto& s : segments)
    if (s.lifeline == lf) out.push_back(&s);
  return out;
}

std::vector<const TdTransition*> TdGraph::transitions_of(std::string_view lf) const {
  std::vector<const TdTransition*> out;
  for (const auto& t : transitions)
    if (t.lifeline == lf) out.push_back(&t);
  return out;
}

std::string TdGraph::initial_state(std::string_view lf) const {
  auto segs = segments_of(lf);
  if (!segs.empty()) return segs.front()->state;
  auto trs = transitions_of(lf);
  if (!trs.empty()) return trs.front()->from;
  const auto* l = find_lifeline(lf);
  return (l && !l->states.empty()) ? l->states.front() : std::string{};
}

std::string TdGraph::final_state(std::string_view lf) const {
  auto trs = transitions_of(lf);
  if (!trs.empty()) return trs.back()->to;
  return initial_state(lf);
}

const IodGraph* InteractionModel::find_iod(std::string_view id) const {
  for (const auto& d : iods)
    if (d.id == id) return &d;
  return nullptr;
}

const SdGraph* InteractionModel::find_sd(std::string_view id) const {
  for (const auto& d : sds)
    if (d.id == id) return &d;
  return nullptr;
}

const TdGraph* InteractionModel::find_td(std::string_view id) const {
  for (const auto& d : tds)
    if (d.id == id) return &d;
  return nullptr;
}

std::optional<DiagramKind> InteractionModel::kind_of(std::string_view diagram_id) const {
  if (find_iod(diagram_id)) return DiagramKind::iod;
  if (find_sd(diagram_id)) return DiagramKind::sd;
  if (find_td(diagram_id)) return DiagramKind::td;
  return std::nullopt;
}

const IodGraph* InteractionModel::owner_of(std::string_view node_id) const {
  for (const auto& d : iods) {
    const auto* n = d.find_node(node_id);
    if (n && n->kind == IodNodeKind::interaction) return &d;
  }
  return nullptr;
}

std::vector<std::string> InteractionModel::diagram_ids() const {
  std::vector<std::string> out;
  for (const auto& d : iods) out.push_back(d.id);
  for (const auto& d : sds) out.push_back(d.id);
  for (const auto& d : tds) out.push_back(d.id);
  return out;
}

// ---------------------------------------------------------------------------

bool ValidationReport::valid() const { return error_count() == 0; }

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(), [](const auto& v) {
    return v.severity == Severity::error;
  }));
}

bool ValidationReport::has(std::string_view rule) const {
  return std::any_of(violations.begin(), violations.end(), [&](const auto& v) { return v.rule == rule; });
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  for (const auto& v : violations)
    os << to_string(v.severity) << ' ' << v.rule << ' ' << v.diagram << ':' << v.node << ' ' << v.message << '\n';
  return os.str();
}

std::string ValidationReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : violations) {
    arr.push_back({{"severity", to_string(v.severity)},
                   {"rule", v.rule},
                   {"diagram", v.diagram},
                   {"node", v.node},
                   {"message", v.message}});
  }
  nlohmann::json doc = {{"format", "iodnet-validation"}, {"version", 1}, {"valid", valid()}, {"violations", arr}};
  return doc.dump(2) + "\n";
}

namespace {

class Validator {
public:
  explicit Validator(const InteractionModel& m) : model_(m) {}

  ValidationReport run() {
    check_diagram_ids();
    for (const auto& iod : model_.iods) check_iod(iod);
    check_refs();
    for (const auto& sd : model_.sds) check_sd(sd);
    for (const auto& td : model_.tds) check_td(td);
    return std::move(report_);
  }

private:
  void add(Severity s, std::string rule, const std::string& diagram, const std::string& node, std::string msg) {
    report_.violations.push_back({s, std::move(rule), diagram, node, std::move(msg)});
  }
  void error(std::string rule, const std::string& d, const std::string& n, std::string msg) {
    add(Severity::error, std::move(rule), d, n, std::move(msg));
  }
  void warn(std::string rule, const std::string& d, const std::string& n, std::string msg) {
    add(Severity::warning, std::move(rule), d, n, std::move(msg));
  }

  void check_diagram_ids() {
    std::set<std::string> seen;
    for (const auto& id : model_.diagram_ids())
      if (!seen.insert(id).second) error("duplicate-diagram", id, "", "diagram id declared more than once");
  }

  void check_iod(const IodGraph& iod) {
    std::set<std::string> ids;
    for (const auto& n : iod.nodes) {
      if (!ids.insert(n.id).second)
        error("iod-duplicate-node", iod.id, n.id, "node id declared more than once");
      if (n.kind == IodNodeKind::interaction) {
        if (!interaction_ids_.insert(n.id).second)
          error("interaction-node-duplicate", iod.id, n.id, "interaction node id is not unique in the model");
        if (!model_.ref_map.count(n.id)) error("ref-missing", iod.id, n.id, "interaction node has no Ref entry");
      }
    }
    if (iod.node_ids(IodNodeKind::initial).empty()) error("iod-no-initial", iod.id, "", "IOD has no initial node");
    if (iod.node_ids(IodNodeKind::final_node).empty()) error("iod-no-final", iod.id, "", "IOD has no final node");

    std::map<std::string, std::size_t> in_degree, out_degree;
    for (const auto& e : iod.edges) {
      const std::string label = e.source + "->" + e.target;
      const auto* src = iod.find_node(e.source);
      const auto* dst = iod.find_node(e.target);
      if (!src || !dst) {
        error("edge-unknown-endpoint", iod.id, label, "edge endpoint is not a declared node");
        continue;
      }
      ++out_degree[src->id];
      ++in_degree[dst->id];
      if (src->kind == IodNodeKind::final_node)
        error("edge-from-final", iod.id, label, "final nodes have no outgoing edges");
      if (dst->kind == IodNodeKind::initial)
        error("edge-into-initial", iod.id, label, "initial nodes have no incoming edges");
      if (e.guard && src->kind != IodNodeKind::decision)
        warn("guard-ignored", iod.id, label, "guard on an edge that does not leave a decision node");
    }
    for (const auto& n : iod.nodes) {
      switch (n.kind) {
      case IodNodeKind::decision:
        if (out_degree[n.id] < 2) warn("decision-arity", iod.id, n.id, "decision node has fewer than 2 outgoing edges");
        [[fallthrough]];
      case IodNodeKind::merge:
      case IodNodeKind::fork:
      case IodNodeKind::join:
        if (in_degree[n.id] == 0 || out_degree[n.id] == 0)
          warn("node-disconnected", iod.id, n.id, "node lacks an incoming or outgoing edge");
        break;
      case IodNodeKind::interaction:
        if (in_degree[n.id] == 0 || out_degree[n.id] == 0)
          error("node-disconnected", iod.id, n.id, "interaction node needs incoming and outgoing edges");
        break;
      default: break;
      }
    }
  }

  void check_refs() {
    std::map<std::string, std::string> referenced_by; // diagram -> node
    for (const auto& [node, ref] : model_.ref_map) {
      if (!model_.owner_of(node)) {
        error("ref-unknown-node", "", node, "Ref entry for a node that is not an interaction node");
        continue;
      }
      const auto kind = model_.kind_of(ref.diagram);
      if (!kind || *kind != ref.kind) {
        error("ref-unknown-diagram", model_.owner_of(node)->id, node,
              "references undeclared " + std::string(to_string(ref.kind)) + " '" + ref.diagram + "'");
        continue;
      }
      auto [it, fresh] = referenced_by.emplace(ref.diagram, node);
      if (!fresh)
        error("ref-not-injective", model_.owner_of(node)->id, node,
              "diagram '" + ref.diagram + "' is also referenced by '" + it->second + "'");
    }

    std::vector<std::string> roots;
    for (const auto& iod : model_.iods)
      if (!referenced_by.count(iod.id)) roots.push_back(iod.id);
    if (roots.empty() && !model_.iods.empty()) error("no-root", "", "", "every IOD is referenced; no root exists");
    if (model_.iods.empty()) error("no-root", "", "", "model has no IOD");
    if (roots.size() > 1) {
      std::string all;
      for (const auto& r : roots) all += (all.empty() ? "" : ",") + r;
      error("multiple-roots", roots[1], "", "unreferenced IODs: " + all);
    }
    for (const auto& sd : model_.sds)
      if (!referenced_by.count(sd.id)) error("unreferenced-diagram", sd.id, "", "SD is not referenced by any node");
    for (const auto& td : model_.tds)
      if (!referenced_by.count(td.id)) error("unreferenced-diagram", td.id, "", "TD is not referenced by any node");

    // Parent of a diagram is the IOD owning the node that references it.
    std::map<std::string, std::string> parent;
    for (const auto& [diagram, node] : referenced_by) parent[diagram] = model_.owner_of(node)->id;
    std::set<std::string> reported;
    for (const auto& iod : model_.iods) {
      std::set<std::string> path{iod.id};
      std::string cur = iod.id;
      while (parent.count(cur)) {
        cur = parent[cur];
        if (!path.insert(cur).second) {
          if (reported.insert(cur).second) error("ref-cycle", cur, "", "Ref hierarchy contains a cycle");
          break;
        }
      }
    }
  }

  void check_sd(const SdGraph& sd) {
    if (sd.lifelines.empty()) error("sd-no-lifeline", sd.id, "", "SD declares no lifeline");
    std::set<std::string> lfs;
    for (const auto& l : sd.lifelines)
      if (!lfs.insert(l.id).second) error("sd-duplicate-lifeline", sd.id, l.id, "lifeline declared more than once");

    struct Pending {
      const SdMessage* msg;
      bool matched;
    };
    std::vector<Pending> pending;
    for (const auto* m : sd.messages()) {
      const bool want_from = m->flag != MessageFlag::found;
      const bool want_to = m->flag != MessageFlag::lost;
      if (want_from != !m->from.empty() || want_to != !m->to.empty())
        error("message-endpoints", sd.id, m->name, "message endpoints do not match its found/lost flag");
      if (!m->from.empty() && !lfs.count(m->from))
        error("sd-unknown-lifeline", sd.id, m->name, "unknown sender lifeline '" + m->from + "'");
      if (!m->to.empty() && !lfs.count(m->to))
        error("sd-unknown-lifeline", sd.id, m->name, "unknown receiver lifeline '" + m->to + "'");
      if (m->flag != MessageFlag::none)
        warn("unsupported-by-transformer", sd.id, m->name,
             std::string(m->flag == MessageFlag::found ? "found" : "lost") + " messages have no mapping rule");
      if (m->kind == MessageKind::sync) pending.push_back({m, false});
      if (m->kind == MessageKind::reply) {
        auto it = std::find_if(pending.rbegin(), pending.rend(), [&](const Pending& p) {
          return !p.matched && p.msg->from == m->to && p.msg->to == m->from;
        });
        if (it == pending.rend())
          error("reply-without-sync", sd.id, m->name, "reply does not answer an open synchronous message");
        else
          it->matched = true;
      }
    }
    for (const auto& p : pending)
      if (!p.matched) warn("sync-without-reply", sd.id, p.msg->name, "synchronous message has no reply");

    std::size_t index = 0;
    for (const auto* f : sd.fragments()) {
      ++index;
      const std::string name = std::string(to_string(f->kind)) + std::to_string(index);
      const bool single = f->kind == FragmentKind::opt || f->kind == FragmentKind::loop;
      if (f->operands.empty() || (single && f->operands.size() != 1))
        error("fragment-operands", sd.id, name, "wrong number of operands for " + std::string(to_string(f->kind)));
      if (f->kind == FragmentKind::par)
        for (const auto& op : f->operands)
          if (op.guard) warn("guard-ignored", sd.id, name, "par operands carry no guard");
    }
  }

  void check_bounds(const TdGraph& td, const std::string& what, const std::optional<TimeBounds>& b) {
    if (b && (b->lo < 0 || b->lo > b->hi))
      error("td-bounds", td.id, what, "bounds must satisfy 0 <= lo <= hi");
  }

  void check_td(const TdGraph& td) {
    if (td.lifelines.empty()) error("td-no-lifeline", td.id, "", "TD declares no lifeline");
    std::set<std::string> lfs;
    for (const auto& l : td.lifelines) {
      if (!lfs.insert(l.id).second) error("td-duplicate-lifeline", td.id, l.id, "lifeline declared more than once");
      if (l.states.empty()) error("td-empty-states", td.id, l.id, "lifeline has an empty state alphabet");
      std::set<std::string> st;
      for (const auto& s : l.states)
        if (!st.insert(s).second) error("td-duplicate-state", td.id, l.id, "state '" + s + "' listed twice");
    }
    auto known_state = [&](const std::string& lf, const std::string& s) {
      const auto* l = td.find_lifeline(lf);
      return l && std::find(l->states.begin(), l->states.end(), s) != l->states.end();
    };
    for (const auto& s : td.segments) {
      if (!lfs.count(s.lifeline)) {
        error("td-unknown-lifeline", td.id, s.lifeline, "segment on unknown lifeline");
        continue;
      }
      if (!known_state(s.lifeline, s.state))
        error("td-unknown-state", td.id, s.lifeline, "unknown state '" + s.state + "'");
      check_bounds(td, s.lifeline + "." + s.state, s.duration);
    }
    std::set<std::string> events;
    for (const auto& t : td.transitions) {
      const std::string label = t.lifeline + "." + t.from + "->" + t.to;
      if (!lfs.count(t.lifeline)) {
        error("td-unknown-lifeline", td.id, t.lifeline, "transition on unknown lifeline");
        continue;
      }
      if (!known_state(t.lifeline, t.from) || !known_state(t.lifeline, t.to))
        error("td-unknown-state", td.id, label, "transition uses an undeclared state");
      if (t.from == t.to) error("td-repeated-state", td.id, label, "state change to the same state");
      check_bounds(td, label, t.time);
      if (t.event && !events.insert(*t.event).second)
        error("td-duplicate-event", td.id, *t.event, "event triggers more than one transition");
    }
    for (const auto& l : td.lifelines) {
      auto segs = td.segments_of(l.id);
      auto trs = td.transitions_of(l.id);
      for (std::size_t i = 1; i < segs.size(); ++i)
        if (segs[i]->state == segs[i - 1]->state)
          error("td-repeated-state", td.id, l.id, "consecutive segments hold the same state '" + segs[i]->state + "'");
      std::vector<std::string> timeline{td.initial_state(l.id)};
      bool chained = true;
      for (const auto* t : trs) {
        if (t->from != timeline.back()) chained = false;
        timeline.push_back(t->to);
      }
      if (!chained) error("td-timeline-mismatch", td.id, l.id, "transitions do not chain from state to state");
      if (segs.size() > timeline.size())
        error("td-timeline-mismatch", td.id, l.id, "more segments than states on the timeline");
      for (std::size_t i = 0; i < segs.size() && i < timeline.size(); ++i)
        if (segs[i]->state != timeline[i]) {
          error("td-timeline-mismatch", td.id, l.id,
                "segment " + std::to_string(i + 1) + " holds '" + segs[i]->state + "' but the timeline is in '" +
                    timeline[i] + "'");
          break;
        }
    }
    for (const auto& m : td.messages) {
      for (const auto* p : {&m.send, &m.recv}) {
        const auto n = lfs.count(p->lifeline) ? td.transitions_of(p->lifeline).size() : 0;
        if (p->index < 1 || p->index > n)
          error("td-bad-point", td.id, m.name,
                "point " + p->lifeline + "@" + std::to_string(p->index) + " is not a timeline point");
      }
    }
  }

  const InteractionModel& model_;
  ValidationReport report_;
  std::set<std::string> interaction_ids_;
};

/// Parent diagram in the Ref tree, or empty for an unreferenced diagram.
std::string parent_of(const InteractionModel& model, std::string_view diagram_id) {
  for (const auto& [node, ref] : model.ref_map) {
    if (ref.diagram == diagram_id) {
      const auto* owner = model.owner_of(node);
      return owner ? owner->id : std::string{};
    }
  }
  return {};
}

} // namespace

ValidationReport validate(const InteractionModel& model) { return Validator(model).run(); }

std::size_t hierarchy_level(const InteractionModel& model, std::string_view diagram_id) {
  if (!model.kind_of(diagram_id)) throw Error("unknown-diagram", "unknown diagram '" + std::string(diagram_id) + "'");
  std::size_t level = 0;
  std::string cur(diagram_id);
  const std::size_t limit = model.iods.size() + model.sds.size() + model.tds.size();
  for (std::string p = parent_of(model, cur); !p.empty(); p = parent_of(model, cur)) {
    cur = p;
    if (++level > limit) throw Error("ref-cycle", "Ref hierarchy contains a cycle");
  }
  return level;
}

std::size_t node_level(const InteractionModel& model, std::string_view node_id) {
  for (const auto& iod : model.iods)
    if (iod.find_node(node_id)) return hierarchy_level(model, iod.id);
  throw Error("unknown-node", "unknown node '" + std::string(node_id) + "'");
}

DiagramRef referenced_diagram(const InteractionModel& model, std::string_view node_id) {
  auto it = model.ref_map.find(std::string(node_id));
  if (it == model.ref_map.end())
    throw Error("unknown-node", "'" + std::string(node_id) + "' is not a referencing interaction node");
  return it->second;
}

const IodGraph* root_iod(const InteractionModel& model) {
  const IodGraph* root = nullptr;
  for (const auto& iod : model.iods) {
    if (!parent_of(model, iod.id).empty()) continue;
    if (root) return nullptr;
    root = &iod;
  }
  return root;
}

} // namespace iodnet
