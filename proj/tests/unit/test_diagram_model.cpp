#include <gtest/gtest.h>

#include "generator.hpp"
#include "iodnet/diagram_model.hpp"
#include "iodnet/model_parser.hpp"

namespace {

using namespace iodnet;

InteractionModel parse_ok(std::string_view text) {
  auto r = parse(text);
  for (const auto& d : r.diagnostics) ADD_FAILURE() << format_diagnostic(d);
  return r.ok() ? *r.model : InteractionModel{};
}

InteractionModel atm() {
  auto r = parse_file(std::filesystem::path(IODNET_SOURCE_DIR) / "corpus" / "atm.iom");
  EXPECT_TRUE(r.ok());
  return *r.model;
}

IodGraph line_iod(const std::string& id, const std::vector<std::string>& interactions) {
  IodGraph g;
  g.id = id;
  g.nodes.push_back({id + "_i", IodNodeKind::initial, {}});
  std::string prev = id + "_i";
  for (const auto& x : interactions) {
    g.nodes.push_back({x, IodNodeKind::interaction, {}});
    g.edges.push_back({prev, x, std::nullopt, {}});
    prev = x;
  }
  g.nodes.push_back({id + "_f", IodNodeKind::final_node, {}});
  g.edges.push_back({prev, id + "_f", std::nullopt, {}});
  return g;
}

TEST(Validation, AtmCorpusIsValid) {
  const auto report = validate(atm());
  EXPECT_TRUE(report.valid()) << report.to_text();
  EXPECT_EQ(report.error_count(), 0u);
}

TEST(Validation, MissingInitialAndFinal) {
  InteractionModel m;
  IodGraph g;
  g.id = "Main";
  g.nodes.push_back({"x", IodNodeKind::merge, {}});
  m.iods.push_back(g);
  const auto report = validate(m);
  EXPECT_FALSE(report.valid());
  EXPECT_TRUE(report.has("iod-no-initial"));
  EXPECT_TRUE(report.has("iod-no-final"));
}

TEST(Validation, EdgeDirectionRules) {
  const auto m = parse_ok(R"(model "m" { iod Main { initial a; final b; edge a -> b; edge b -> a; } })");
  const auto report = validate(m);
  EXPECT_TRUE(report.has("edge-from-final"));
  EXPECT_TRUE(report.has("edge-into-initial"));
}

TEST(Validation, GuardOutsideDecisionIsAWarning) {
  const auto m = parse_ok(R"(model "m" { iod Main { initial a; final b; edge a -> b guard "g"; } })");
  const auto report = validate(m);
  EXPECT_TRUE(report.valid());
  EXPECT_TRUE(report.has("guard-ignored"));
}

TEST(Validation, InteractionNeedsBothEdges) {
  const auto m = parse_ok(R"(model "m" {
    iod Main { initial a; interaction X ref sd S; final b; edge a -> X; edge a -> b; }
    sd S { lifeline L; } })");
  EXPECT_TRUE(validate(m).has("node-disconnected"));
  EXPECT_FALSE(validate(m).valid());
}

TEST(Validation, RefMustBeInjective) {
  InteractionModel m;
  m.iods.push_back(line_iod("Main", {"x", "y"}));
  m.sds.push_back({"S", {{"L", {}}}, {}, {}});
  m.ref_map["x"] = {DiagramKind::sd, "S"};
  m.ref_map["y"] = {DiagramKind::sd, "S"};
  EXPECT_TRUE(validate(m).has("ref-not-injective"));
}

TEST(Validation, RefToUnknownDiagram) {
  InteractionModel m;
  m.iods.push_back(line_iod("Main", {"x"}));
  m.ref_map["x"] = {DiagramKind::sd, "Nowhere"};
  EXPECT_TRUE(validate(m).has("ref-unknown-diagram"));
}

TEST(Validation, UnreferencedDiagramBreaksTheTree) {
  InteractionModel m;
  m.iods.push_back(line_iod("Main", {}));
  m.sds.push_back({"Orphan", {{"L", {}}}, {}, {}});
  EXPECT_TRUE(validate(m).has("unreferenced-diagram"));
}

TEST(Validation, RefCycleHasNoRoot) {
  InteractionModel m;
  m.iods.push_back(line_iod("A", {"toB"}));
  m.iods.push_back(line_iod("B", {"toA"}));
  m.ref_map["toB"] = {DiagramKind::iod, "B"};
  m.ref_map["toA"] = {DiagramKind::iod, "A"};
  const auto report = validate(m);
  EXPECT_FALSE(report.valid());
  EXPECT_TRUE(report.has("no-root") || report.has("ref-cycle"));
  EXPECT_THROW(
      {
        try {
          hierarchy_level(m, "A");
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), "ref-cycle");
          throw;
        }
      },
      Error);
}

TEST(Validation, ReplyPairing) {
  const auto bad = parse_ok(R"(model "m" {
    iod Main { initial a; interaction X ref sd S; final b; edge a -> X; edge X -> b; }
    sd S { lifeline P; lifeline Q; msg r from Q to P reply; } })");
  EXPECT_TRUE(validate(bad).has("reply-without-sync"));

  const auto lonely = parse_ok(R"(model "m" {
    iod Main { initial a; interaction X ref sd S; final b; edge a -> X; edge X -> b; }
    sd S { lifeline P; lifeline Q; msg c from P to Q sync; } })");
  const auto report = validate(lonely);
  EXPECT_TRUE(report.valid());
  EXPECT_TRUE(report.has("sync-without-reply"));
}

TEST(Validation, FoundMessagesAreFlaggedForTheTransformer) {
  const auto m = parse_ok(R"(model "m" {
    iod Main { initial a; interaction X ref sd S; final b; edge a -> X; edge X -> b; }
    sd S { lifeline P; msg f found to P async; } })");
  const auto report = validate(m);
  EXPECT_TRUE(report.valid());
  EXPECT_TRUE(report.has("unsupported-by-transformer"));
}

TEST(Validation, TimingDiagramConsistency) {
  const auto m = parse_ok(R"(model "m" {
    iod Main { initial a; interaction X ref td T; final b; edge a -> X; edge X -> b; }
    td T {
      lifeline L states s0, s1, s2;
      segment L s1;
      at L s0 -> s1 time [5, 2];
      at L s0 -> s2;
      msg m from L@1 to L@9;
    } })");
  const auto report = validate(m);
  EXPECT_FALSE(report.valid());
  EXPECT_TRUE(report.has("td-timeline-mismatch"));
  EXPECT_TRUE(report.has("td-bounds"));
  EXPECT_TRUE(report.has("td-bad-point"));
}

TEST(Validation, ReportTextNamesRuleAndEntity) {
  const auto m = parse_ok(R"(model "m" { iod Main { initial a; final b; edge a -> b guard "g"; } })");
  const auto text = validate(m).to_text();
  EXPECT_NE(text.find("warning guard-ignored Main:"), std::string::npos) << text;
}

TEST(Hierarchy, AtmLevels) {
  const auto m = atm();
  ASSERT_NE(root_iod(m), nullptr);
  EXPECT_EQ(root_iod(m)->id, "Main");
  EXPECT_EQ(hierarchy_level(m, "Main"), 0u);
  EXPECT_EQ(hierarchy_level(m, "Identification"), 1u);
  EXPECT_EQ(hierarchy_level(m, "PinTest"), 2u);
  EXPECT_EQ(hierarchy_level(m, "EjectCard"), 2u);
  EXPECT_EQ(node_level(m, "Identification"), 0u);
  EXPECT_EQ(node_level(m, "PinTest"), 1u);
  EXPECT_EQ(referenced_diagram(m, "PinTest"), (DiagramRef{DiagramKind::sd, "PinTest"}));
}

TEST(Hierarchy, UnknownEntitiesThrow) {
  const auto m = atm();
  try {
    hierarchy_level(m, "Nope");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "unknown-diagram");
  }
  try {
    node_level(m, "Nope");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "unknown-node");
  }
  EXPECT_THROW(referenced_diagram(m, "retry"), Error);
}

// Child diagram = parent + 1 along every Ref edge; root = 0.
TEST(Hierarchy, RecurrenceOnGeneratedTrees) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    testkit::GeneratorOptions opt;
    opt.max_depth = 5;
    opt.chain = seed % 2 == 0;
    const auto g = testkit::generate_model(seed, opt);
    ASSERT_TRUE(validate(g.model).valid()) << "seed " << seed << "\n" << validate(g.model).to_text();
    const auto* root = root_iod(g.model);
    ASSERT_NE(root, nullptr);
    EXPECT_EQ(hierarchy_level(g.model, root->id), 0u);
    for (const auto& [node, ref] : g.model.ref_map) {
      const auto* owner = g.model.owner_of(node);
      ASSERT_NE(owner, nullptr);
      EXPECT_EQ(hierarchy_level(g.model, ref.diagram), hierarchy_level(g.model, owner->id) + 1);
      EXPECT_EQ(node_level(g.model, node), hierarchy_level(g.model, owner->id));
    }
    for (const auto& [diagram, level] : g.level) EXPECT_EQ(hierarchy_level(g.model, diagram), level);
  }
}

TEST(Model, SdPreOrderViews) {
  const auto m = atm();
  const auto* sd = m.find_sd("PinTest");
  ASSERT_NE(sd, nullptr);
  const auto msgs = sd->messages();
  ASSERT_EQ(msgs.size(), 5u);
  EXPECT_EQ(msgs[0]->name, "enterPin");
  EXPECT_EQ(msgs[4]->name, "pinRejected");
  EXPECT_EQ(sd->fragments().size(), 1u);
}

TEST(Model, StructuralEqualityIgnoresSpans) {
  auto a = atm();
  auto b = a;
  b.iods[0].nodes[0].span.line = 999;
  EXPECT_EQ(a, b);
  b.iods[0].nodes[0].id = "other";
  EXPECT_NE(a, b);
}

} // namespace
