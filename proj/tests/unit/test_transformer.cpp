#include <gtest/gtest.h>

#include <algorithm>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "generator.hpp"
#include "iodnet/model_parser.hpp"
#include "iodnet/transformer.hpp"

namespace {

using namespace iodnet;

InteractionModel parse_ok(std::string_view text) {
  auto r = parse(text);
  for (const auto& d : r.diagnostics) ADD_FAILURE() << format_diagnostic(d);
  return r.ok() ? *r.model : InteractionModel{};
}

InteractionModel corpus(const char* name) {
  return *parse_file(std::filesystem::path(IODNET_SOURCE_DIR) / "corpus" / name).model;
}

std::string wrap_sd(const std::string& body) {
  return "model \"m\" { iod Main { initial a; interaction X ref sd S; final b; edge a -> X; edge X -> b; }\n sd S {" +
         body + "} }";
}

std::string wrap_td(const std::string& body) {
  return "model \"m\" { iod Main { initial a; interaction X ref td T; final b; edge a -> X; edge X -> b; }\n td T {" +
         body + "} }";
}

std::string error_code(auto&& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  return "";
}

enum class Kind { place, transition, arc, page, color_set, annotation };

Kind kind_of(const HcpnModel& net, const std::string& id) {
  if (net.find_place(id)) return Kind::place;
  if (net.find_transition(id)) return Kind::transition;
  if (std::any_of(net.arcs.begin(), net.arcs.end(), [&](const Arc& a) { return a.id == id; })) return Kind::arc;
  if (net.find_page(id)) return Kind::page;
  if (net.find_color_set(id)) return Kind::color_set;
  return Kind::annotation;
}

std::size_t count_kind(const HcpnModel& net, const TraceEntry& e, Kind k) {
  return static_cast<std::size_t>(
      std::count_if(e.produced.begin(), e.produced.end(), [&](const auto& id) { return kind_of(net, id) == k; }));
}

const Transition* subst_for(const HcpnModel& net, const std::string& page) {
  for (const auto& t : net.transitions)
    if (t.substitution && t.subpage == page) return &t;
  return nullptr;
}

// Every model entity the transformer consumes, named as trace sources.
std::set<std::string> model_entities(const InteractionModel& m) {
  std::set<std::string> out;
  for (const auto& d : m.diagram_ids()) out.insert(d);
  for (const auto& g : m.iods) {
    for (const auto& n : g.nodes) out.insert(g.id + ":" + n.id);
    for (const auto& e : g.edges) out.insert(g.id + ":" + e.source + "->" + e.target);
  }
  for (const auto& s : m.sds) {
    for (const auto& l : s.lifelines) out.insert(s.id + ":" + l.id);
    for (const auto* msg : s.messages()) out.insert(s.id + ":" + msg->name);
    std::size_t k = 0;
    for (const auto* f : s.fragments()) out.insert(s.id + ":" + std::string(to_string(f->kind)) + std::to_string(++k));
  }
  for (const auto& t : m.tds) {
    for (const auto& l : t.lifelines) {
      out.insert(t.id + ":" + l.id);
      for (const auto& s : l.states) out.insert(t.id + ":" + l.id + "." + s);
      const auto trs = t.transitions_of(l.id);
      for (std::size_t i = 0; i < trs.size(); ++i) {
        const std::string point = t.id + ":" + l.id + "@" + std::to_string(i + 1);
        out.insert(point);
        if (trs[i]->time) out.insert(point + ".time");
        if (trs[i]->event) out.insert(t.id + ":" + *trs[i]->event);
      }
      const auto segs = t.segments_of(l.id);
      for (std::size_t j = 0; j < segs.size(); ++j)
        if (segs[j]->duration) out.insert(t.id + ":" + l.id + ".seg" + std::to_string(j + 1));
    }
    for (const auto& msg : t.messages) out.insert(t.id + ":" + msg.name);
  }
  return out;
}

// Shape of a tree as a canonical string: `(child shapes sorted)`.
std::string shape(const std::string& root, const std::function<std::vector<std::string>(const std::string&)>& children) {
  std::vector<std::string> parts;
  for (const auto& c : children(root)) parts.push_back(shape(c, children));
  std::sort(parts.begin(), parts.end());
  std::string out = "(";
  for (const auto& p : parts) out += p;
  return out + ")";
}

std::string ref_tree_shape(const InteractionModel& m) {
  return shape(root_iod(m)->id, [&](const std::string& d) {
    std::vector<std::string> out;
    if (const auto* g = m.find_iod(d))
      for (const auto& n : g->nodes)
        if (n.kind == IodNodeKind::interaction) out.push_back(m.ref_map.at(n.id).diagram);
    return out;
  });
}

std::string page_tree_shape(const HcpnModel& net) {
  return shape(net.prime_page, [&](const std::string& p) {
    std::vector<std::string> out;
    for (const auto& pg : net.pages)
      if (pg.parent == p) out.push_back(pg.id);
    return out;
  });
}

TEST(Transform, AtmPages) {
  const auto r = transform(corpus("atm.iom"));
  EXPECT_EQ(r.net.prime_page, "Main");
  std::vector<std::string> pages;
  for (const auto& p : r.net.pages) pages.push_back(p.id);
  std::sort(pages.begin(), pages.end());
  EXPECT_EQ(pages, (std::vector<std::string>{"Main", "Main/Identification", "Main/Identification/EjectCard",
                                             "Main/Identification/PinTest", "Main/Identification/WelcomeMessage"}));
  EXPECT_EQ(r.net.find_page("Main/Identification/PinTest")->level, 2u);
  EXPECT_EQ(r.net.find_page("Main/Identification/PinTest")->kind, DiagramKind::sd);
  std::size_t subst = 0;
  std::set<std::string> subpages;
  for (const auto* t : r.net.transitions_of("Main/Identification"))
    if (t->substitution) {
      ++subst;
      subpages.insert(t->subpage);
    }
  EXPECT_EQ(subst, 3u);
  EXPECT_EQ(subpages.size(), 3u);
  EXPECT_TRUE(check_invariants(r.net).empty());
}

TEST(Transform, MinimalModel) {
  const auto r = transform(corpus("minimal.iom"));
  ASSERT_EQ(r.net.pages.size(), 1u);
  EXPECT_EQ(r.net.places.size(), 2u);
  EXPECT_EQ(r.net.transitions.size(), 1u);
  EXPECT_EQ(r.net.arcs.size(), 2u);
  EXPECT_FALSE(r.net.transitions[0].substitution);
  EXPECT_EQ(r.net.initial_marking.at("Main/T1.4/start").size(), 1u);
  EXPECT_TRUE(r.net.find_place("Main/T1.5/done")->terminal);
}

TEST(Transform, FoundMessageIsUnsupported) {
  const auto m = parse_ok(wrap_sd("lifeline P; msg f found to P async;"));
  std::string message;
  EXPECT_EQ(error_code([&] { transform(m); }, &message), "unsupported");
  EXPECT_EQ(message, "unsupported: found-message S:f");
  const auto lost = parse_ok(wrap_sd("lifeline P; msg l from P lost async;"));
  EXPECT_EQ(error_code([&] { transform(lost); }, &message), "unsupported");
  EXPECT_EQ(message, "unsupported: lost-message S:l");
}

TEST(Transform, InvalidModelIsRejected) {
  const auto m = parse_ok(R"(model "m" { iod Main { initial a; final b; edge b -> a; } })");
  EXPECT_EQ(error_code([&] { transform(m); }), "invalid-model");
}

TEST(Transform, GuardedDecisionEdge) {
  const auto r = transform(corpus("atm.iom"));
  const auto* t = r.net.find_transition("Main/T2.10.2/auth->done");
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->guard.labels, (std::vector<std::string>{"valid"}));
  const auto* e = r.trace.producer_of(t->id);
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->rule, "T2.10.2");
  EXPECT_EQ(count_kind(r.net, *e, Kind::transition), 1u);
  EXPECT_EQ(count_kind(r.net, *e, Kind::arc), 2u);
}

TEST(Transform, ForkFeedingTwoInteractions) {
  const auto r = transform(corpus("deadlock.iom"));
  std::size_t ordinary = 0, subst = 0;
  for (const auto* t : r.net.transitions_of("Main")) (t->substitution ? subst : ordinary)++;
  EXPECT_EQ(subst, 2u);
  const auto* fork = r.net.find_transition("Main/T1.6/split");
  ASSERT_NE(fork, nullptr);
  std::size_t outputs = 0;
  for (const auto& a : r.net.arcs) outputs += a.transition == fork->id && a.direction == ArcDirection::transition_to_place;
  EXPECT_EQ(outputs, 2u);
  EXPECT_EQ(ordinary, 2u); // split and both
}

TEST(Transform, AltBranchesShareOneDecisionPlace) {
  const auto r = transform(corpus("atm.iom"));
  const std::string page = "Main/Identification/PinTest";
  const auto* decision = r.net.find_place(page + "/Φ.alt/alt1.decision");
  ASSERT_NE(decision, nullptr);
  std::vector<const Transition*> branches;
  for (const auto& a : r.net.arcs)
    if (a.place == decision->id && a.direction == ArcDirection::place_to_transition)
      branches.push_back(r.net.find_transition(a.transition));
  ASSERT_EQ(branches.size(), 2u);
  std::set<std::string> guards;
  for (const auto* t : branches) {
    ASSERT_EQ(t->guard.labels.size(), 1u);
    guards.insert(t->guard.labels[0]);
  }
  EXPECT_EQ(guards, (std::set<std::string>{"valid", "invalid"}));
}

// Single async message between two lifelines: places reachable from the
// In-transition over page arcs, counted without using the mapper's names.
TEST(Transform, SingleMessageSdPlaceCount) {
  const auto r = transform(parse_ok(wrap_sd("lifeline P; lifeline Q; msg x from P to Q async;")));
  const std::string page = "Main/S";
  const Transition* in = nullptr;
  for (const auto* t : r.net.transitions_of(page))
    if (t->role == TransitionRole::in) in = t;
  ASSERT_NE(in, nullptr);
  std::set<std::string> places, transitions{in->id};
  std::deque<std::string> queue{in->id};
  for (const auto& a : r.net.arcs)
    if (a.transition == in->id && a.direction == ArcDirection::place_to_transition) places.insert(a.place);
  while (!queue.empty()) {
    const std::string t = queue.front();
    queue.pop_front();
    for (const auto& a : r.net.arcs) {
      if (a.transition != t || a.direction != ArcDirection::transition_to_place) continue;
      if (!places.insert(a.place).second) continue;
      for (const auto& b : r.net.arcs)
        if (b.place == a.place && b.direction == ArcDirection::place_to_transition && transitions.insert(b.transition).second)
          queue.push_back(b.transition);
    }
  }
  std::size_t ports = 0, internal = 0, messages = 0;
  for (const auto& p : places) {
    const auto* pl = r.net.find_place(p);
    ASSERT_EQ(pl->page, page);
    if (pl->role != PlaceRole::internal) ++ports;
    else ++internal;
    // The message place is the only internal place between two ordinary transitions.
    bool ordinary_ends = true;
    std::size_t ends = 0;
    for (const auto& a : r.net.arcs)
      if (a.place == p) {
        ++ends;
        ordinary_ends &= r.net.find_transition(a.transition)->role == TransitionRole::ordinary;
      }
    if (pl->role == PlaceRole::internal && ends == 2 && ordinary_ends) ++messages;
  }
  EXPECT_EQ(places.size(), r.net.places_of(page).size());
  EXPECT_EQ(ports, 4u);     // one in- and one out-port per lifeline
  EXPECT_EQ(internal, 5u);  // two places per lifeline chain plus the message place
  EXPECT_EQ(messages, 1u);
  EXPECT_EQ(places.size(), 9u);
  EXPECT_EQ(transitions.size(), 4u); // In, send, receive, Out
}

TEST(Transform, EmptySdWiresInToOut) {
  const auto r = transform(parse_ok(wrap_sd("lifeline P; lifeline Q;")));
  const auto places = r.net.places_of("Main/S");
  std::size_t internal = 0;
  for (const auto* p : places) internal += p->role == PlaceRole::internal;
  EXPECT_EQ(internal, 2u);
  std::size_t ordinary = 0;
  for (const auto* t : r.net.transitions_of("Main/S")) ordinary += t->role == TransitionRole::ordinary;
  EXPECT_EQ(ordinary, 0u);
  const auto flat = flatten(r.net);
  EXPECT_EQ(flat.transitions.size(), 2u); // In and Out; the prime page adds only arcs
}

TEST(Transform, TimingDiagramRules) {
  const auto r = transform(parse_ok(wrap_td(
      "lifeline L states idle, busy; segment L idle dur [2, 4]; segment L busy; at L idle -> busy time [3, 5];")));
  const std::string page = "Main/T";
  const auto* cs = r.net.find_color_set(page + "/T3.15/L");
  ASSERT_NE(cs, nullptr);
  EXPECT_TRUE(cs->timed);
  EXPECT_EQ(cs->values, (std::vector<std::string>{"idle", "busy"}));
  std::size_t timed_places = 0;
  for (const auto* p : r.net.places_of(page)) timed_places += p->color_set == cs->id;
  EXPECT_EQ(timed_places, 1u);
  const auto* t = r.net.find_transition(page + "/T3.13/L@1");
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->delay, (TimeBounds{2, 4}));
  EXPECT_EQ(t->guard.clock_window, (TimeBounds{3, 5}));
  std::set<std::string> colors;
  for (const auto& a : r.net.arcs)
    if (a.transition == t->id) colors.insert(a.color);
  EXPECT_EQ(colors, (std::set<std::string>{"idle", "busy"}));
  EXPECT_EQ(r.trace.by_rule("T3.17").size(), 1u);
  EXPECT_EQ(r.trace.by_rule("T3.16").size(), 1u);
}

TEST(Transform, TimingMessageAndEvent) {
  const auto r = transform(corpus("door_timing.iom"));
  const std::string page = "Main/Door";
  const auto* msg = r.net.find_place(page + "/T3.14/unlock");
  ASSERT_NE(msg, nullptr);
  std::vector<std::string> producers, consumers;
  for (const auto& a : r.net.arcs)
    if (a.place == msg->id) (a.direction == ArcDirection::transition_to_place ? producers : consumers).push_back(a.transition);
  EXPECT_EQ(producers, (std::vector<std::string>{page + "/T3.13/Controller@1"}));
  EXPECT_EQ(consumers, (std::vector<std::string>{page + "/T3.13/Door@1"}));
  const auto* ev = r.net.find_place(page + "/T3.18/request");
  ASSERT_NE(ev, nullptr);
  bool from_in = false;
  for (const auto& a : r.net.arcs)
    if (a.place == ev->id && a.direction == ArcDirection::transition_to_place)
      from_in = r.net.find_transition(a.transition)->role == TransitionRole::in;
  EXPECT_TRUE(from_in);
}

TEST(Transform, ChildIodWithTwoFinals) {
  const auto m = parse_ok(R"(model "m" {
    iod Main { initial a; interaction X ref iod C; final b; edge a -> X; edge X -> b; }
    iod C { initial i; decision d; final f1; final f2; edge i -> d; edge d -> f1 guard "p"; edge d -> f2 guard "q"; }
  })");
  const auto r = transform(m);
  std::size_t outs = 0, out_ports = 0;
  for (const auto* t : r.net.transitions_of("Main/C")) outs += t->role == TransitionRole::out;
  for (const auto* p : r.net.places_of("Main/C")) out_ports += p->role == PlaceRole::out_port;
  EXPECT_EQ(outs, 2u);
  EXPECT_EQ(out_ports, 1u);
  EXPECT_TRUE(check_invariants(r.net).empty());
}

TEST(Trace, RulesAreKnown) {
  EXPECT_TRUE(is_known_rule("T1.1"));
  EXPECT_TRUE(is_known_rule("T2.10.4"));
  EXPECT_TRUE(is_known_rule("T3.18"));
  EXPECT_TRUE(is_known_rule("Φ.send"));
  EXPECT_FALSE(is_known_rule("T1.10"));
  EXPECT_FALSE(is_known_rule("T2.10.5"));
  EXPECT_FALSE(is_known_rule("T3.19"));
  EXPECT_FALSE(is_known_rule(""));
}

TEST(Trace, DescribeSource) {
  const auto r = transform(corpus("atm.iom"));
  EXPECT_EQ(describe_source(r.trace, "Main/Identification/T1.3/EjectCard"), "interaction node Identification:EjectCard");
  EXPECT_EQ(describe_source(r.trace, "Main/T1.4/start"), "initial node Main:start");
  EXPECT_EQ(describe_source(r.trace, "nope"), "unknown element nope");
}

TEST(Trace, JsonAndTable) {
  const auto r = transform(corpus("minimal.iom"));
  const auto doc = nlohmann::json::parse(r.trace.to_json());
  EXPECT_EQ(doc["format"], "iodnet-trace");
  EXPECT_EQ(doc["entries"].size(), r.trace.entries.size());
  const auto table = r.trace.to_table();
  EXPECT_NE(table.find("T2.10.2 | Main:start->done |"), std::string::npos) << table;
}

struct GeneratedModels : ::testing::TestWithParam<std::uint64_t> {};

// Every produced element appears in exactly one entry, every non-builtin net
// element is produced, every rule id is known and every entity is covered.
TEST_P(GeneratedModels, TraceIsComplete) {
  testkit::GeneratorOptions opt;
  opt.awkward_strings = GetParam() % 3 == 0;
  const auto g = testkit::generate_model(GetParam(), opt);
  const auto r = transform(g.model);
  std::map<std::string, std::size_t> owners;
  for (const auto& e : r.trace.entries) {
    EXPECT_TRUE(is_known_rule(e.rule)) << e.rule;
    for (const auto& id : e.produced) ++owners[id];
  }
  for (const auto& [id, n] : owners) EXPECT_EQ(n, 1u) << id;
  for (const auto& p : r.net.pages) EXPECT_TRUE(owners.count(p.id)) << p.id;
  for (const auto& p : r.net.places) EXPECT_TRUE(owners.count(p.id)) << p.id;
  for (const auto& t : r.net.transitions) EXPECT_TRUE(owners.count(t.id)) << t.id;
  for (const auto& a : r.net.arcs) EXPECT_TRUE(owners.count(a.id)) << a.id;
  for (const auto& cs : r.net.color_sets)
    if (cs.id != kCtrl && cs.id != kTimedCtrl) EXPECT_TRUE(owners.count(cs.id)) << cs.id;
  for (const auto& src : model_entities(g.model)) EXPECT_TRUE(r.trace.covers(src)) << src;
}

TEST_P(GeneratedModels, StructuralCounts) {
  const auto g = testkit::generate_model(GetParam());
  const auto r = transform(g.model);
  EXPECT_TRUE(check_invariants(r.net).empty());
  for (const auto& iod : g.model.iods) {
    const Page* page = nullptr;
    for (const auto& p : r.net.pages)
      if (p.diagram == iod.id) page = &p;
    ASSERT_NE(page, nullptr);
    std::size_t subst = 0, ordinary = 0, places = 0;
    for (const auto* t : r.net.transitions_of(page->id)) (t->substitution ? subst : ordinary)++;
    places = r.net.places_of(page->id).size();
    const auto n = [&](IodNodeKind k) { return iod.node_ids(k).size(); };
    EXPECT_EQ(subst, n(IodNodeKind::interaction));
    EXPECT_GE(places, n(IodNodeKind::initial) + n(IodNodeKind::final_node) + n(IodNodeKind::decision) +
                          n(IodNodeKind::merge));
    EXPECT_GE(ordinary, n(IodNodeKind::fork) + n(IodNodeKind::join));
  }
  const std::map<std::string, std::array<std::size_t, 3>> expected{// places, transitions, arcs
                                                                   {"T2.10.1", {0, 0, 1}},
                                                                   {"T2.10.2", {0, 1, 2}},
                                                                   {"T2.10.3", {0, 0, 1}},
                                                                   {"T2.10.4", {1, 0, 2}}};
  std::size_t edges = 0;
  for (const auto& iod : g.model.iods) edges += iod.edges.size();
  std::size_t table_two = 0;
  for (const auto& e : r.trace.entries) {
    auto it = expected.find(e.rule);
    if (it == expected.end()) continue;
    ++table_two;
    EXPECT_EQ(count_kind(r.net, e, Kind::place), it->second[0]) << e.rule << " " << e.source;
    EXPECT_EQ(count_kind(r.net, e, Kind::transition), it->second[1]) << e.rule << " " << e.source;
    EXPECT_EQ(count_kind(r.net, e, Kind::arc), it->second[2]) << e.rule << " " << e.source;
  }
  EXPECT_EQ(table_two, edges);
}

TEST_P(GeneratedModels, HierarchyIsPreserved) {
  testkit::GeneratorOptions opt;
  opt.max_depth = 4;
  const auto g = testkit::generate_model(GetParam(), opt);
  const auto r = transform(g.model);
  EXPECT_EQ(page_tree_shape(r.net), ref_tree_shape(g.model));
  for (const auto& p : r.net.pages) {
    EXPECT_EQ(p.level, hierarchy_level(g.model, p.diagram)) << p.id;
    EXPECT_EQ(p.kind, *g.model.kind_of(p.diagram));
    if (p.parent.empty()) continue;
    const auto* s = subst_for(r.net, p.id);
    ASSERT_NE(s, nullptr) << p.id;
    EXPECT_EQ(s->page, p.parent);
    EXPECT_EQ(referenced_diagram(g.model, s->label).diagram, p.diagram);
  }
}

TEST_P(GeneratedModels, DeterministicAndTimedOnlyInTimingPages) {
  const auto g = testkit::generate_model(GetParam());
  const auto a = transform(g.model);
  const auto b = transform(g.model);
  EXPECT_EQ(a.net, b.net);
  EXPECT_EQ(a.trace, b.trace);
  std::map<std::string, DiagramKind> kind;
  for (const auto& p : a.net.pages) kind[p.id] = p.kind;
  for (const auto& p : a.net.places)
    if (a.net.find_color_set(p.color_set)->timed) EXPECT_EQ(kind[p.page], DiagramKind::td) << p.id;
  for (const auto& t : a.net.transitions)
    if (t.delay || t.guard.clock_window) EXPECT_EQ(kind[t.page], DiagramKind::td) << t.id;
}

INSTANTIATE_TEST_SUITE_P(Seeds, GeneratedModels, ::testing::Range<std::uint64_t>(0, 40));

} // namespace
