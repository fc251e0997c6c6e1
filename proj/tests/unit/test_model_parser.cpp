#include <gtest/gtest.h>

#include <filesystem>

#include "generator.hpp"
#include "iodnet/model_parser.hpp"

namespace {

using namespace iodnet;

const std::filesystem::path corpus = std::filesystem::path(IODNET_SOURCE_DIR) / "corpus";

bool has_code(const ParseResult& r, std::string_view code) {
  for (const auto& d : r.diagnostics)
    if (d.code == code) return true;
  return false;
}

TEST(Parser, CorpusFilesParse) {
  for (const auto& entry : std::filesystem::directory_iterator(corpus)) {
    if (entry.path().extension() != ".iom") continue;
    const auto r = parse_file(entry.path());
    EXPECT_TRUE(r.ok()) << entry.path();
    for (const auto& d : r.diagnostics) ADD_FAILURE() << format_diagnostic(d);
  }
}

TEST(Parser, AtmStructure) {
  const auto r = parse_file(corpus / "atm.iom");
  ASSERT_TRUE(r.ok());
  const auto& m = *r.model;
  EXPECT_EQ(m.iods.size(), 2u);
  EXPECT_EQ(m.sds.size(), 3u);
  EXPECT_TRUE(m.tds.empty());
  EXPECT_EQ(m.ref_map.at("Identification"), (DiagramRef{DiagramKind::iod, "Identification"}));
  const auto* main = m.find_iod("Main");
  ASSERT_NE(main, nullptr);
  EXPECT_EQ(main->find_node("auth")->kind, IodNodeKind::decision);
  const auto* pin = m.find_sd("PinTest");
  ASSERT_NE(pin, nullptr);
  EXPECT_EQ(pin->lifelines.size(), 3u);
  ASSERT_EQ(pin->fragments().size(), 1u);
  EXPECT_EQ(pin->fragments()[0]->kind, FragmentKind::alt);
  EXPECT_EQ(pin->fragments()[0]->operands[0].guard, "valid");
  EXPECT_EQ(pin->messages()[1]->kind, MessageKind::sync);
}

TEST(Parser, TimingDiagram) {
  const auto r = parse_file(corpus / "door_timing.iom");
  ASSERT_TRUE(r.ok());
  const auto* td = r.model->find_td("Door");
  ASSERT_NE(td, nullptr);
  EXPECT_EQ(td->initial_state("Door"), "closed");
  EXPECT_EQ(td->final_state("Door"), "open");
  const auto segs = td->segments_of("Door");
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_EQ(segs[1]->duration, (TimeBounds{2, 4}));
  const auto tr = td->transitions_of("Controller");
  ASSERT_EQ(tr.size(), 1u);
  EXPECT_EQ(tr[0]->time, (TimeBounds{3, 5}));
  EXPECT_EQ(tr[0]->event, "request");
  ASSERT_EQ(td->messages.size(), 1u);
  EXPECT_EQ(td->messages[0].send, (TdPoint{"Controller", 1}));
}

TEST(Parser, SpansPointAtDeclarations) {
  const auto r = parse("model \"m\" {\n  iod Main {\n    initial a;\n    final b;\n    edge a -> b;\n  }\n}\n", "x.iom");
  ASSERT_TRUE(r.ok());
  const auto& n = r.model->iods[0].nodes[1];
  EXPECT_EQ(n.span.file, "x.iom");
  EXPECT_EQ(n.span.line, 4u);
  EXPECT_EQ(n.span.column, 11u);
}

TEST(Parser, LexErrorReportsLocation) {
  const auto r = parse("model \"m\" {\n  iod Main { initial a; $ }\n}", "bad.iom");
  EXPECT_FALSE(r.ok());
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.diagnostics[0].code, "lex-error");
  EXPECT_EQ(r.diagnostics[0].span.line, 2u);
  EXPECT_EQ(format_diagnostic(r.diagnostics[0]).rfind("bad.iom:2:", 0), 0u) << format_diagnostic(r.diagnostics[0]);
}

TEST(Parser, UnterminatedString) {
  const auto r = parse("model \"m { }");
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_code(r, "lex-error"));
}

TEST(Parser, SyntaxErrorNeverThrows) {
  const char* inputs[] = {"", "model", "model \"m\"", "model \"m\" { iod }", "model \"m\" { iod A { edge a -> ; } }",
                          "model \"m\" { sd S { alt guard { } } }", "model \"m\" { td T { at L a -> b time [1; } }",
                          "model \"m\" { td T { msg m from L@x to K@1; } }", "}}}}", "model \"m\" { iod A { initial a; } } trailing"};
  for (const char* in : inputs) {
    ParseResult r;
    EXPECT_NO_THROW(r = parse(in)) << in;
    EXPECT_FALSE(r.ok()) << in;
    EXPECT_FALSE(r.diagnostics.empty()) << in;
  }
}

TEST(Parser, RecoversAndReportsSeveralErrors) {
  const auto r = parse(R"(model "m" {
    iod Main { initial ; final b; edge a -> ; }
    sd S { lifeline ; msg x from to B async; }
  })");
  EXPECT_FALSE(r.ok());
  EXPECT_GE(r.diagnostics.size(), 2u);
}

TEST(Parser, DuplicateIdentifiers) {
  const auto r = parse(R"(model "m" {
    iod Main { initial a; final a; edge a -> a; }
  })");
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_code(r, "duplicate-identifier"));
}

TEST(Parser, DanglingReferences) {
  const auto r = parse(R"(model "m" {
    iod Main { initial a; interaction X ref sd Missing; final b; edge a -> X; edge X -> zz; }
  })");
  EXPECT_FALSE(r.ok());
  bool diagram = false, node = false;
  for (const auto& d : r.diagnostics) {
    if (d.code == "dangling-diagram-ref") diagram = true;
    if (d.code == "dangling-node-ref") node = true;
  }
  EXPECT_TRUE(diagram);
  EXPECT_TRUE(node);
}

TEST(Parser, DanglingLifeline) {
  const auto r = parse(R"(model "m" {
    iod Main { initial a; interaction X ref sd S; final b; edge a -> X; edge X -> b; }
    sd S { lifeline P; msg x from P to Nobody async; }
  })");
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_code(r, "dangling-lifeline-ref"));
}

TEST(Parser, CommentsAndEscapes) {
  const auto r = parse(R"(# leading comment
model "a \"b\" \\ c" { # trailing
  iod Main { initial a; decision d; final b; final c; edge a -> d; edge d -> b guard "x\ny"; edge d -> c guard "t\tz"; }
})");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.model->name, "a \"b\" \\ c");
  EXPECT_EQ(r.model->iods[0].edges[1].guard, "x\ny");
  EXPECT_EQ(r.model->iods[0].edges[2].guard, "t\tz");
}

TEST(Parser, ParseFileMissingThrowsIoError) {
  try {
    parse_file(corpus / "does-not-exist.iom");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "io-error");
  }
}

TEST(Serializer, CorpusRoundTrip) {
  for (const auto* name : {"atm.iom", "door_timing.iom", "deadlock.iom", "minimal.iom"}) {
    const auto r = parse_file(corpus / name);
    ASSERT_TRUE(r.ok()) << name;
    const auto text = serialize(*r.model);
    const auto again = parse(text);
    ASSERT_TRUE(again.ok()) << name << "\n" << text;
    EXPECT_EQ(*again.model, *r.model) << name;
    EXPECT_EQ(serialize(*again.model), text) << name;
  }
}

// parse(serialize(m)) == m, and serialize is a fixed point after one pass.
TEST(Serializer, RoundTripOnGeneratedModels) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    testkit::GeneratorOptions opt;
    opt.awkward_strings = true;
    const auto g = testkit::generate_model(seed, opt);
    const auto text = serialize(g.model);
    const auto r = parse(text);
    ASSERT_TRUE(r.ok()) << "seed " << seed << "\n" << text;
    EXPECT_EQ(*r.model, g.model) << "seed " << seed;
    EXPECT_EQ(serialize(*r.model), text) << "seed " << seed;
  }
}

} // namespace
