#include "iodnet/model_parser.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace iodnet {

namespace {

enum class Tok { ident, string, number, lbrace, rbrace, semi, comma, arrow, lbracket, rbracket, at, invalid, eof };

struct Token {
  Tok kind = Tok::eof;
  std::string text; // identifier name, unescaped string, digits
  SourceSpan span;
};

const char* describe(Tok k) {
  switch (k) {
  case Tok::ident: return "identifier";
  case Tok::string: return "string";
  case Tok::number: return "number";
  case Tok::lbrace: return "'{'";
  case Tok::rbrace: return "'}'";
  case Tok::semi: return "';'";
  case Tok::comma: return "','";
  case Tok::arrow: return "'->'";
  case Tok::lbracket: return "'['";
  case Tok::rbracket: return "']'";
  case Tok::at: return "'@'";
  case Tok::invalid: return "invalid token";
  case Tok::eof: return "end of file";
  }
  return "?";
}

class Lexer {
public:
  Lexer(std::string_view src, std::string file, std::vector<ParseDiagnostic>& diags)
      : src_(src), file_(std::move(file)), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::eof, "", span_here(0)});
        return out;
      }
      out.push_back(next());
    }
  }

private:
  SourceSpan span_here(std::uint32_t len) const { return {file_, line_, col_, len}; }

  char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Token lex_error(SourceSpan span, std::string msg) {
    diags_.push_back({Severity::error, span, std::move(msg), "lex-error"});
    return {Tok::invalid, "", span};
  }

  Token next() {
    SourceSpan span = span_here(1);
    const char c = peek();
    auto single = [&](Tok k) {
      advance();
      return Token{k, std::string(1, c), span};
    };
    switch (c) {
    case '{': return single(Tok::lbrace);
    case '}': return single(Tok::rbrace);
    case ';': return single(Tok::semi);
    case ',': return single(Tok::comma);
    case '[': return single(Tok::lbracket);
    case ']': return single(Tok::rbracket);
    case '@': return single(Tok::at);
    default: break;
    }
    if (c == '-' && peek(1) == '>') {
      advance();
      advance();
      span.length = 2;
      return {Tok::arrow, "->", span};
    }
    if (c == '"') return lex_string(span);
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        digits += peek();
        advance();
      }
      span.length = static_cast<std::uint32_t>(digits.size());
      if (digits.size() > 15) return lex_error(span, "number literal too large");
      return {Tok::number, digits, span};
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
        id += peek();
        advance();
      }
      span.length = static_cast<std::uint32_t>(id.size());
      return {Tok::ident, id, span};
    }
    advance();
    return lex_error(span, std::string("unexpected character '") + c + "'");
  }

  Token lex_string(SourceSpan span) {
    advance(); // opening quote
    std::string value;
    std::uint32_t len = 1;
    while (pos_ < src_.size() && peek() != '"' && peek() != '\n') {
      char c = peek();
      advance();
      ++len;
      if (c == '\\' && pos_ < src_.size() && peek() != '\n') {
        const char e = peek();
        advance();
        ++len;
        switch (e) {
        case 'n': c = '\n'; break;
        case 't': c = '\t'; break;
        case '"': c = '"'; break;
        case '\\': c = '\\'; break;
        default:
          span.length = len;
          return lex_error(span, std::string("unknown escape '\\") + e + "'");
        }
      }
      value += c;
    }
    if (peek() != '"') {
      span.length = len;
      return lex_error(span, "unterminated string literal");
    }
    advance();
    span.length = len + 1;
    return {Tok::string, value, span};
  }

  std::string_view src_;
  std::string file_;
  std::vector<ParseDiagnostic>& diags_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

/// Thrown inside one statement; caught at the statement boundary.
struct SyntaxFailure {};

class Parser {
public:
  Parser(std::vector<Token> toks, std::vector<ParseDiagnostic>& diags) : toks_(std::move(toks)), diags_(diags) {}

  std::optional<InteractionModel> run() {
    InteractionModel model;
    try {
      expect_keyword("model");
      model.name = expect(Tok::string).text;
      expect(Tok::lbrace);
    } catch (const SyntaxFailure&) {
      return std::nullopt;
    }
    while (!at(Tok::rbrace) && !at(Tok::eof)) parse_diagram(model);
    if (at(Tok::eof)) {
      report(cur(), "expected '}' to close the model");
    } else {
      advance();
      if (!at(Tok::eof)) report(cur(), "unexpected input after the model");
    }
    if (syntax_errors_ > 0 || has_errors()) return std::nullopt;
    resolve(model);
    if (has_errors()) return std::nullopt;
    return model;
  }

private:
  // -- token helpers -------------------------------------------------------

  const Token& cur() const { return toks_[pos_]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_keyword(std::string_view kw) const { return at(Tok::ident) && cur().text == kw; }
  const Token& advance() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  bool has_errors() const {
    for (const auto& d : diags_)
      if (d.severity == Severity::error) return true;
    return false;
  }

  void report(const Token& t, const std::string& msg) {
    ++syntax_errors_;
    if (t.kind == Tok::invalid) return; // the lexer already reported it
    diags_.push_back({Severity::error, t.span, msg, "syntax-error"});
  }

  [[noreturn]] void fail(const std::string& msg) {
    report(cur(), msg + ", found " + found());
    throw SyntaxFailure{};
  }

  std::string found() const {
    if (at(Tok::ident)) return "'" + cur().text + "'";
    return describe(cur().kind);
  }

  const Token& expect(Tok k) {
    if (!at(k)) fail(std::string("expected ") + describe(k));
    return advance();
  }

  const Token& expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail("expected '" + std::string(kw) + "'");
    return advance();
  }

  Time expect_number() { return static_cast<Time>(std::stoll(expect(Tok::number).text)); }

  TimeBounds parse_bounds() {
    expect(Tok::lbracket);
    TimeBounds b;
    b.lo = expect_number();
    expect(Tok::comma);
    b.hi = expect_number();
    expect(Tok::rbracket);
    return b;
  }

  /// Skips the rest of a broken statement: through the next ';' at this
  /// depth, or up to (not including) the '}' closing the enclosing block.
  void recover_statement() {
    int depth = 0;
    while (!at(Tok::eof)) {
      if (at(Tok::lbrace)) {
        ++depth;
      } else if (at(Tok::rbrace)) {
        if (depth == 0) return;
        --depth;
        if (depth == 0) {
          advance();
          return;
        }
      } else if (at(Tok::semi) && depth == 0) {
        advance();
        return;
      }
      advance();
    }
  }

  bool at_diagram_start() const { return at_keyword("iod") || at_keyword("sd") || at_keyword("td"); }

  // -- diagrams ------------------------------------------------------------

  void parse_diagram(InteractionModel& model) {
    if (!at_diagram_start()) {
      report(cur(), "expected 'iod', 'sd' or 'td', found " + found());
      advance();
      while (!at(Tok::eof) && !at(Tok::rbrace) && !at_diagram_start()) {
        if (at(Tok::lbrace)) {
          skip_block();
          continue;
        }
        advance();
      }
      return;
    }
    const std::string kind = advance().text;
    const Token* name = nullptr;
    try {
      name = &expect(Tok::ident);
      expect(Tok::lbrace);
    } catch (const SyntaxFailure&) {
      while (!at(Tok::eof) && !at(Tok::lbrace) && !at(Tok::rbrace) && !at_diagram_start()) advance();
      if (at(Tok::lbrace)) skip_block();
      return;
    }
    if (kind == "iod") {
      IodGraph g;
      g.id = name->text;
      g.span = name->span;
      parse_iod_body(g, model);
      model.iods.push_back(std::move(g));
    } else if (kind == "sd") {
      SdGraph g;
      g.id = name->text;
      g.span = name->span;
      g.items = parse_sd_items(g);
      model.sds.push_back(std::move(g));
    } else {
      TdGraph g;
      g.id = name->text;
      g.span = name->span;
      parse_td_body(g);
      model.tds.push_back(std::move(g));
    }
    diagram_spans_.push_back({name->text, name->span});
    lifeline_scopes_.push_back({name->text, std::move(lifeline_decls_), std::move(lifeline_refs_)});
    lifeline_decls_.clear();
    lifeline_refs_.clear();
    if (at(Tok::rbrace)) {
      advance();
    } else {
      report(cur(), "expected '}' to close diagram '" + name->text + "'");
    }
  }

  void skip_block() {
    int depth = 0;
    do {
      if (at(Tok::lbrace)) ++depth;
      if (at(Tok::rbrace)) --depth;
      advance();
    } while (depth > 0 && !at(Tok::eof));
  }

  template <typename F>
  void statement(F&& body) {
    try {
      body();
    } catch (const SyntaxFailure&) {
      recover_statement();
    }
  }

  void parse_iod_body(IodGraph& g, InteractionModel& model) {
    static const std::map<std::string, IodNodeKind> kinds = {
        {"initial", IodNodeKind::initial}, {"final", IodNodeKind::final_node}, {"fork", IodNodeKind::fork},
        {"join", IodNodeKind::join},       {"decision", IodNodeKind::decision}, {"merge", IodNodeKind::merge},
        {"interaction", IodNodeKind::interaction}};
    while (!at(Tok::rbrace) && !at(Tok::eof) && !at_diagram_start()) {
      statement([&] {
        if (at_keyword("edge")) {
          advance();
          IodEdge e;
          const Token& src = expect(Tok::ident);
          expect(Tok::arrow);
          const Token& dst = expect(Tok::ident);
          e.source = src.text;
          e.target = dst.text;
          e.span = src.span;
          if (at_keyword("guard")) {
            advance();
            e.guard = expect(Tok::string).text;
          }
          expect(Tok::semi);
          edge_refs_.push_back({g.id, src, dst});
          g.edges.push_back(std::move(e));
          return;
        }
        if (!at(Tok::ident) || !kinds.count(cur().text))
          fail("expected an IOD node declaration or 'edge'");
        const IodNodeKind kind = kinds.at(advance().text);
        const Token& id = expect(Tok::ident);
        if (kind == IodNodeKind::interaction) {
          expect_keyword("ref");
          DiagramRef ref;
          if (at_keyword("iod")) ref.kind = DiagramKind::iod;
          else if (at_keyword("sd")) ref.kind = DiagramKind::sd;
          else if (at_keyword("td")) ref.kind = DiagramKind::td;
          else fail("expected 'iod', 'sd' or 'td' after 'ref'");
          advance();
          const Token& target = expect(Tok::ident);
          ref.diagram = target.text;
          expect(Tok::semi);
          diagram_refs_.push_back({ref, target});
          if (model.ref_map.count(id.text))
            duplicate(id, "interaction node '" + id.text + "' already declared");
          else
            model.ref_map.emplace(id.text, ref);
        } else {
          expect(Tok::semi);
        }
        g.nodes.push_back({id.text, kind, id.span});
      });
    }
  }

  SdMessage parse_sd_message() {
    SdMessage m;
    const Token& name = expect(Tok::ident);
    m.name = name.text;
    m.span = name.span;
    if (at_keyword("found")) {
      advance();
      m.flag = MessageFlag::found;
    } else {
      expect_keyword("from");
      const Token& lf = expect(Tok::ident);
      m.from = lf.text;
      lifeline_refs_.push_back(lf);
    }
    if (at_keyword("lost")) {
      advance();
      if (m.flag == MessageFlag::found) fail("a message cannot be both found and lost");
      m.flag = MessageFlag::lost;
    } else {
      expect_keyword("to");
      const Token& lf = expect(Tok::ident);
      m.to = lf.text;
      lifeline_refs_.push_back(lf);
    }
    if (at_keyword("async")) m.kind = MessageKind::async;
    else if (at_keyword("sync")) m.kind = MessageKind::sync;
    else if (at_keyword("reply")) m.kind = MessageKind::reply;
    else fail("expected 'async', 'sync' or 'reply'");
    advance();
    expect(Tok::semi);
    return m;
  }

  std::optional<std::string> parse_optional_guard() {
    if (!at_keyword("guard")) return std::nullopt;
    advance();
    return expect(Tok::string).text;
  }

  SdOperand parse_operand(SdGraph& g, std::optional<std::string> guard) {
    SdOperand op;
    op.guard = std::move(guard);
    expect(Tok::lbrace);
    op.items = parse_sd_items(g);
    expect(Tok::rbrace);
    return op;
  }

  std::vector<SdItem> parse_sd_items(SdGraph& g) {
    std::vector<SdItem> items;
    while (!at(Tok::rbrace) && !at(Tok::eof) && !(at_diagram_start() && depth_ == 0)) {
      statement([&] {
        if (at_keyword("lifeline")) {
          if (depth_ > 0) fail("lifelines must be declared at the top of a sequence diagram");
          advance();
          const Token& id = expect(Tok::ident);
          expect(Tok::semi);
          g.lifelines.push_back({id.text, id.span});
          lifeline_decls_.push_back(id);
          return;
        }
        if (at_keyword("msg")) {
          advance();
          items.push_back({parse_sd_message()});
          return;
        }
        static const std::map<std::string, FragmentKind> kinds = {
            {"alt", FragmentKind::alt}, {"opt", FragmentKind::opt}, {"par", FragmentKind::par},
            {"loop", FragmentKind::loop}};
        if (!at(Tok::ident) || !kinds.count(cur().text)) fail("expected 'lifeline', 'msg' or a fragment");
        SdFragment f;
        f.span = cur().span;
        f.kind = kinds.at(advance().text);
        ++depth_;
        struct DepthGuard {
          int& d;
          ~DepthGuard() { --d; }
        } dg{depth_};
        const char* sep = f.kind == FragmentKind::alt ? "else" : f.kind == FragmentKind::par ? "and" : nullptr;
        auto guard = f.kind == FragmentKind::par ? std::nullopt : parse_optional_guard();
        f.operands.push_back(parse_operand(g, std::move(guard)));
        while (sep && at_keyword(sep)) {
          advance();
          auto g2 = f.kind == FragmentKind::par ? std::nullopt : parse_optional_guard();
          f.operands.push_back(parse_operand(g, std::move(g2)));
        }
        items.push_back({std::move(f)});
      });
    }
    return items;
  }

  void parse_td_body(TdGraph& g) {
    while (!at(Tok::rbrace) && !at(Tok::eof) && !at_diagram_start()) {
      statement([&] {
        if (at_keyword("lifeline")) {
          advance();
          const Token& id = expect(Tok::ident);
          TdLifeline l{id.text, {}, id.span};
          expect_keyword("states");
          l.states.push_back(expect(Tok::ident).text);
          while (at(Tok::comma)) {
            advance();
            l.states.push_back(expect(Tok::ident).text);
          }
          expect(Tok::semi);
          lifeline_decls_.push_back(id);
          g.lifelines.push_back(std::move(l));
        } else if (at_keyword("segment")) {
          advance();
          const Token& lf = expect(Tok::ident);
          TdSegment s{lf.text, expect(Tok::ident).text, std::nullopt, lf.span};
          if (at_keyword("dur")) {
            advance();
            s.duration = parse_bounds();
          }
          expect(Tok::semi);
          lifeline_refs_.push_back(lf);
          g.segments.push_back(std::move(s));
        } else if (at_keyword("at")) {
          advance();
          const Token& lf = expect(Tok::ident);
          TdTransition t;
          t.lifeline = lf.text;
          t.span = lf.span;
          t.from = expect(Tok::ident).text;
          expect(Tok::arrow);
          t.to = expect(Tok::ident).text;
          if (at_keyword("time")) {
            advance();
            t.time = parse_bounds();
          }
          if (at_keyword("on")) {
            advance();
            t.event = expect(Tok::ident).text;
          }
          expect(Tok::semi);
          lifeline_refs_.push_back(lf);
          g.transitions.push_back(std::move(t));
        } else if (at_keyword("msg")) {
          advance();
          const Token& name = expect(Tok::ident);
          TdMessage m;
          m.name = name.text;
          m.span = name.span;
          expect_keyword("from");
          const Token& a = expect(Tok::ident);
          expect(Tok::at);
          m.send = {a.text, static_cast<std::size_t>(expect_number())};
          expect_keyword("to");
          const Token& b = expect(Tok::ident);
          expect(Tok::at);
          m.recv = {b.text, static_cast<std::size_t>(expect_number())};
          expect(Tok::semi);
          lifeline_refs_.push_back(a);
          lifeline_refs_.push_back(b);
          g.messages.push_back(std::move(m));
        } else {
          fail("expected 'lifeline', 'segment', 'at' or 'msg'");
        }
      });
    }
  }

  // -- name resolution -------------------------------------------------------

  void duplicate(const Token& t, const std::string& msg) {
    diags_.push_back({Severity::error, t.span, msg, "duplicate-identifier"});
  }

  void resolve_lifelines() {
    for (const auto& scope : lifeline_scopes_) {
      std::set<std::string> declared;
      for (const auto& d : scope.decls)
        if (!declared.insert(d.text).second)
          duplicate(d, "lifeline '" + d.text + "' already declared in '" + scope.diagram + "'");
      for (const auto& r : scope.refs)
        if (!declared.count(r.text))
          diags_.push_back({Severity::error, r.span, "undeclared lifeline '" + r.text + "'", "dangling-lifeline-ref"});
    }
  }

  void resolve(InteractionModel& model) {
    resolve_lifelines();
    std::set<std::string> diagrams;
    for (const auto& [id, span] : diagram_spans_)
      if (!diagrams.insert(id).second)
        diags_.push_back({Severity::error, span, "diagram '" + id + "' already declared", "duplicate-identifier"});

    for (const auto& iod : model.iods) {
      std::set<std::string> ids;
      for (const auto& n : iod.nodes)
        if (!ids.insert(n.id).second)
          diags_.push_back({Severity::error, n.span, "node '" + n.id + "' already declared in '" + iod.id + "'",
                            "duplicate-identifier"});
    }
    for (const auto& er : edge_refs_) {
      const auto* iod = model.find_iod(er.iod);
      for (const Token* t : {&er.src, &er.dst})
        if (iod && !iod->find_node(t->text))
          diags_.push_back({Severity::error, t->span, "undeclared node '" + t->text + "'", "dangling-node-ref"});
    }
    for (const auto& [ref, tok] : diagram_refs_) {
      const auto kind = model.kind_of(ref.diagram);
      if (!kind || *kind != ref.kind)
        diags_.push_back({Severity::error, tok.span,
                          "no " + std::string(to_string(ref.kind)) + " named '" + ref.diagram + "'",
                          "dangling-diagram-ref"});
    }
  }

  struct EdgeRef {
    std::string iod;
    Token src;
    Token dst;
  };

  std::vector<Token> toks_;
  std::vector<ParseDiagnostic>& diags_;
  std::size_t pos_ = 0;
  int syntax_errors_ = 0;
  int depth_ = 0;
  std::vector<std::pair<std::string, SourceSpan>> diagram_spans_;
  std::vector<EdgeRef> edge_refs_;
  std::vector<std::pair<DiagramRef, Token>> diagram_refs_;
  struct LifelineScope {
    std::string diagram;
    std::vector<Token> decls;
    std::vector<Token> refs;
  };
  std::vector<LifelineScope> lifeline_scopes_;
  std::vector<Token> lifeline_decls_;
  std::vector<Token> lifeline_refs_;
};

// -- serializer ---------------------------------------------------------------

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
    case '"': out += "\\\""; break;
    case '\\': out += "\\\\"; break;
    case '\n': out += "\\n"; break;
    case '\t': out += "\\t"; break;
    default: out += c;
    }
  }
  return out + "\"";
}

std::string bounds(const TimeBounds& b) { return "[" + std::to_string(b.lo) + "," + std::to_string(b.hi) + "]"; }

void write_items(std::ostringstream& os, const std::vector<SdItem>& items, int indent);

void write_message(std::ostringstream& os, const SdMessage& m, const std::string& pad) {
  os << pad << "msg " << m.name;
  if (m.flag == MessageFlag::found) os << " found";
  else os << " from " << m.from;
  if (m.flag == MessageFlag::lost) os << " lost";
  else os << " to " << m.to;
  os << ' ' << to_string(m.kind) << ";\n";
}

void write_items(std::ostringstream& os, const std::vector<SdItem>& items, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  for (const auto& item : items) {
    if (const auto* m = std::get_if<SdMessage>(&item.value)) {
      write_message(os, *m, pad);
      continue;
    }
    const auto& f = std::get<SdFragment>(item.value);
    os << pad << to_string(f.kind);
    for (std::size_t i = 0; i < f.operands.size(); ++i) {
      const auto& op = f.operands[i];
      if (i > 0) os << (f.kind == FragmentKind::par ? " and" : " else");
      if (op.guard) os << " guard " << quote(*op.guard);
      os << " {\n";
      write_items(os, op.items, indent + 1);
      os << pad << "}";
    }
    os << "\n";
  }
}

} // namespace

ParseResult parse(std::string_view source, std::string file_name) {
  ParseResult result;
  auto tokens = Lexer(source, std::move(file_name), result.diagnostics).run();
  result.model = Parser(std::move(tokens), result.diagnostics).run();
  return result;
}

ParseResult parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io-error", "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::string serialize(const InteractionModel& model) {
  std::ostringstream os;
  os << "model " << quote(model.name) << " {";
  if (model.iods.empty() && model.sds.empty() && model.tds.empty()) {
    os << "}\n";
    return os.str();
  }
  os << "\n";
  for (const auto& iod : model.iods) {
    os << "  iod " << iod.id << " {\n";
    for (const auto& n : iod.nodes) {
      os << "    " << to_string(n.kind) << ' ' << n.id;
      if (n.kind == IodNodeKind::interaction) {
        auto it = model.ref_map.find(n.id);
        if (it != model.ref_map.end()) os << " ref " << to_string(it->second.kind) << ' ' << it->second.diagram;
      }
      os << ";\n";
    }
    for (const auto& e : iod.edges) {
      os << "    edge " << e.source << " -> " << e.target;
      if (e.guard) os << " guard " << quote(*e.guard);
      os << ";\n";
    }
    os << "  }\n";
  }
  for (const auto& sd : model.sds) {
    os << "  sd " << sd.id << " {\n";
    for (const auto& l : sd.lifelines) os << "    lifeline " << l.id << ";\n";
    write_items(os, sd.items, 2);
    os << "  }\n";
  }
  for (const auto& td : model.tds) {
    os << "  td " << td.id << " {\n";
    for (const auto& l : td.lifelines) {
      os << "    lifeline " << l.id << " states ";
      for (std::size_t i = 0; i < l.states.size(); ++i) os << (i ? ", " : "") << l.states[i];
      os << ";\n";
    }
    for (const auto& s : td.segments) {
      os << "    segment " << s.lifeline << ' ' << s.state;
      if (s.duration) os << " dur " << bounds(*s.duration);
      os << ";\n";
    }
    for (const auto& t : td.transitions) {
      os << "    at " << t.lifeline << ' ' << t.from << "->" << t.to;
      if (t.time) os << " time " << bounds(*t.time);
      if (t.event) os << " on " << *t.event;
      os << ";\n";
    }
    for (const auto& m : td.messages)
      os << "    msg " << m.name << " from " << m.send.lifeline << '@' << m.send.index << " to " << m.recv.lifeline
         << '@' << m.recv.index << ";\n";
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

std::string format_diagnostic(const ParseDiagnostic& d) {
  std::ostringstream os;
  os << d.span.file << ':' << d.span.line << ':' << d.span.column << ": " << to_string(d.severity) << '[' << d.code
     << "]: " << d.message;
  return os.str();
}

} // namespace iodnet
