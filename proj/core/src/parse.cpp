#include "tsslab/parse.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace tsslab {

namespace {

bool ident_start(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '%'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '%';
}
bool name_char(char c) { return ident_char(c) || c == '-' || c == '+'; }

class Cursor {
 public:
  Cursor(std::string text, std::size_t base_line) : text_(std::move(text)), line_(base_line) {}

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool try_consume(char c) {
    if (peek() != c) return false;
    advance();
    return true;
  }

  void expect(char c) {
    if (!try_consume(c)) fail(std::string("expected '") + c + "'");
  }

  bool try_keyword(const std::string& word) {
    skip_ws();
    if (text_.compare(pos_, word.size(), word) != 0) return false;
    std::size_t after = pos_ + word.size();
    if (after < text_.size() && ident_char(text_[after])) return false;
    for (std::size_t i = 0; i < word.size(); ++i) advance();
    return true;
  }

  std::string ident() {
    skip_ws();
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail("expected an identifier");
    std::string out;
    while (pos_ < text_.size() && ident_char(text_[pos_])) {
      out += text_[pos_];
      advance();
    }
    return out;
  }

  // Names of TSSs and graphs; may contain '-' and '+'.
  std::string object_name() {
    skip_ws();
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail("expected a name");
    std::string out;
    while (pos_ < text_.size() && name_char(text_[pos_])) {
      out += text_[pos_];
      advance();
    }
    return out;
  }

  // "-a->" or "-/a->"; returns (positive, label).
  std::pair<bool, Name> arrow() {
    expect('-');
    bool positive = true;
    if (pos_ < text_.size() && text_[pos_] == '/') {
      positive = false;
      advance();
    }
    Name label = ident();
    if (pos_ + 1 >= text_.size() || text_[pos_] != '-' || text_[pos_ + 1] != '>') {
      fail("expected '->' closing the transition arrow");
    }
    advance();
    advance();
    return {positive, label};
  }

  bool at_arrow() { return peek() == '-'; }

  bool try_turnstile() {
    if (peek() != '|') return false;
    advance();
    if (pos_ >= text_.size() || text_[pos_] != '-') fail("expected '|-'");
    advance();
    return true;
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line_, col_); }

 private:
  void advance() {
    if (pos_ < text_.size()) {
      ++col_;
      ++pos_;
    }
  }

  std::string text_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t col_ = 1;
};

Term parse_term_at(Cursor& cur, const Signature& sig);

Term parse_primary(Cursor& cur, const Signature& sig) {
  if (cur.try_keyword("rec")) {
    Name x = cur.ident();
    cur.expect('{');
    RecSpec spec;
    while (!cur.try_consume('}')) {
      Name y = cur.ident();
      cur.expect('=');
      Term body = parse_term_at(cur, sig);
      cur.expect(';');
      if (!spec.bindings.emplace(y, body).second) {
        cur.fail("variable '" + y + "' bound twice in a recursive specification");
      }
    }
    if (spec.bindings.empty()) cur.fail("empty recursive specification");
    if (spec.bindings.count(x) == 0) {
      cur.fail("recursion variable '" + x + "' is not bound by the specification");
    }
    return Term::rec(x, std::move(spec));
  }
  Name head = cur.ident();
  if (cur.try_consume('.')) {
    Term body = parse_term_at(cur, sig);
    return Term::app("prefix_" + head, {std::move(body)});
  }
  if (cur.try_consume('(')) {
    std::vector<Term> args;
    if (!cur.try_consume(')')) {
      args.push_back(parse_term_at(cur, sig));
      while (cur.try_consume(',')) args.push_back(parse_term_at(cur, sig));
      cur.expect(')');
    }
    if (!sig.contains(head)) cur.fail("undeclared symbol '" + head + "'");
    return Term::app(head, std::move(args));
  }
  if (sig.contains(head)) {
    if (*sig.arity(head) != 0) {
      cur.fail("symbol '" + head + "' has arity " + std::to_string(*sig.arity(head)) +
               " and needs arguments");
    }
    return Term::app(head);
  }
  if (!std::isalpha(static_cast<unsigned char>(head[0])) && head[0] != '%') {
    cur.fail("'" + head + "' is neither a declared symbol nor a valid variable");
  }
  return Term::var(head);
}

Term parse_term_at(Cursor& cur, const Signature& sig) { return parse_primary(cur, sig); }

Literal parse_literal(Cursor& cur, const Signature& sig) {
  Term source = parse_term_at(cur, sig);
  auto [positive, label] = cur.arrow();
  if (!positive) return Literal::neg(std::move(source), label);
  Term target = parse_term_at(cur, sig);
  return Literal::pos(std::move(source), label, std::move(target));
}

TransitionRule parse_rule(Cursor& cur, const Signature& sig) {
  TransitionRule rule;
  if (cur.try_keyword("forall")) {
    ActionSchema schema;
    schema.metavar = cur.ident();
    if (!cur.try_keyword("in")) cur.fail("expected 'in' after the schema metavariable");
    cur.expect('{');
    schema.range.push_back(cur.ident());
    while (cur.try_consume(',')) schema.range.push_back(cur.ident());
    cur.expect('}');
    cur.expect(':');
    rule.schema = std::move(schema);
  }
  if (!cur.try_turnstile()) {
    rule.premises.push_back(parse_literal(cur, sig));
    while (cur.try_consume(',')) rule.premises.push_back(parse_literal(cur, sig));
    if (!cur.try_turnstile()) cur.fail("expected '|-' before the rule conclusion");
  }
  Literal conclusion = parse_literal(cur, sig);
  if (!conclusion.positive) cur.fail("rule conclusion must be positive");
  rule.conclusion = std::move(conclusion);
  if (!cur.at_end()) cur.fail("unexpected input after the rule conclusion");
  return rule;
}

struct Line {
  std::string text;
  std::size_t number;
};

std::vector<Line> logical_lines(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    bool blank = std::all_of(line.begin(), line.end(),
                             [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (!blank) out.push_back(Line{line, number});
  }
  return out;
}

bool starts_with_keyword(const std::string& line, const std::string& word) {
  std::size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  if (line.compare(i, word.size(), word) != 0) return false;
  std::size_t after = i + word.size();
  return after >= line.size() || !ident_char(line[after]);
}

}  // namespace

Term parse_term(const std::string& text, const Signature& sig) {
  Cursor cur(text, 1);
  Term t = parse_term_at(cur, sig);
  if (!cur.at_end()) cur.fail("unexpected input after the term");
  try {
    check_well_formed(t, sig);
  } catch (const Error& e) {
    throw ParseError(e.what(), 1, 1);
  }
  return t;
}

Tss parse_tss(const std::string& text) {
  std::vector<Line> lines = logical_lines(text);
  if (lines.empty()) throw ParseError("empty TSS file", 1, 1);
  Tss tss;
  {
    Cursor cur(lines[0].text, lines[0].number);
    if (!cur.try_keyword("tss")) cur.fail("a TSS file starts with 'tss <name>'");
    tss.name = cur.object_name();
    if (!cur.at_end()) cur.fail("unexpected input after the TSS name");
  }

  // Header statements may span lines up to ';'; rules are one per line.
  std::vector<Line> rule_lines;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    bool is_stmt = starts_with_keyword(lines[i].text, "actions") ||
                   starts_with_keyword(lines[i].text, "sig") ||
                   starts_with_keyword(lines[i].text, "unfolding");
    if (!is_stmt) {
      rule_lines.push_back(lines[i]);
      continue;
    }
    std::string stmt = lines[i].text;
    std::size_t first = lines[i].number;
    while (stmt.find(';') == std::string::npos && i + 1 < lines.size()) {
      stmt += '\n' + lines[++i].text;
    }
    Cursor cur(stmt, first);
    if (cur.try_keyword("actions")) {
      cur.expect(':');
      tss.actions.insert(cur.ident());
      while (cur.try_consume(',')) tss.actions.insert(cur.ident());
      cur.expect(';');
    } else if (cur.try_keyword("sig")) {
      cur.expect(':');
      do {
        Name symbol = cur.ident();
        cur.expect('/');
        Name arity = cur.ident();
        for (char c : arity) {
          if (!std::isdigit(static_cast<unsigned char>(c))) cur.fail("arity must be a number");
        }
        tss.signature.declare(symbol, std::stoul(arity));
      } while (cur.try_consume(','));
      cur.expect(';');
    } else {
      cur.try_keyword("unfolding");
      cur.expect(':');
      if (cur.try_keyword("on")) {
        tss.recursion_unfolding = true;
      } else if (cur.try_keyword("off")) {
        tss.recursion_unfolding = false;
      } else {
        cur.fail("expected 'on' or 'off'");
      }
      cur.expect(';');
    }
    if (!cur.at_end()) cur.fail("unexpected input after ';'");
  }
  for (const Line& line : rule_lines) {
    Cursor cur(line.text, line.number);
    try {
      tss.rules.push_back(parse_rule(cur, tss.signature));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), line.number, 1);
    }
  }
  try {
    validate(tss);
  } catch (const Error& e) {
    throw ParseError(std::string("invalid TSS: ") + e.what(), lines[0].number, 1);
  }
  return tss;
}

namespace {

ProcessGraph parse_graph_block(Cursor& cur) {
  ProcessGraph g;
  if (!cur.try_keyword("graph")) cur.fail("expected 'graph <name> { ... }'");
  g.name = cur.object_name();
  cur.expect('{');
  bool have_root = false;
  bool have_actions = false;
  while (!cur.try_consume('}')) {
    if (cur.try_keyword("states")) {
      cur.expect(':');
      g.states.insert(cur.ident());
      while (cur.try_consume(',')) g.states.insert(cur.ident());
      cur.expect(';');
    } else if (cur.try_keyword("root")) {
      cur.expect(':');
      g.root = cur.ident();
      have_root = true;
      cur.expect(';');
    } else if (cur.try_keyword("actions")) {
      cur.expect(':');
      g.actions.insert(cur.ident());
      while (cur.try_consume(',')) g.actions.insert(cur.ident());
      have_actions = true;
      cur.expect(';');
    } else if (cur.try_keyword("edges")) {
      cur.expect(':');
      if (!cur.try_consume(';')) {
        do {
          std::string from = cur.ident();
          auto [positive, label] = cur.arrow();
          if (!positive) cur.fail("graph edges are positive transitions");
          std::string to = cur.ident();
          g.edges.insert(Edge{from, label, to});
        } while (cur.try_consume(','));
        cur.expect(';');
      }
    } else {
      cur.fail("expected one of states/root/actions/edges");
    }
  }
  if (!have_root) cur.fail("graph '" + g.name + "' has no root");
  if (!have_actions) {
    for (const Edge& e : g.edges) g.actions.insert(e.label);
  }
  try {
    g.validate();
  } catch (const Error& e) {
    cur.fail(std::string("invalid graph '") + g.name + "': " + e.what());
  }
  return g;
}

}  // namespace

GraphFamily parse_graph_family(const std::string& text) {
  Cursor cur(text, 1);
  GraphFamily family;
  while (!cur.at_end()) family.add(parse_graph_block(cur));
  return family;
}

ProcessGraph parse_graph(const std::string& text) {
  Cursor cur(text, 1);
  ProcessGraph g = parse_graph_block(cur);
  if (!cur.at_end()) cur.fail("unexpected input after the graph block");
  return g;
}

std::string serialize_term(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
      return t.var_name();
    case TermKind::App: {
      const std::string& sym = t.symbol();
      if (sym.rfind("prefix_", 0) == 0 && t.args().size() == 1 && sym.size() > 7) {
        return sym.substr(7) + "." + serialize_term(t.args()[0]);
      }
      if (t.args().empty()) return sym;
      std::string out = sym + "(";
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        if (i) out += ", ";
        out += serialize_term(t.args()[i]);
      }
      return out + ")";
    }
    case TermKind::Rec: {
      std::string out = "rec " + t.rec_var() + " { ";
      for (const auto& [y, body] : t.rec_spec().bindings) {
        out += y + " = " + serialize_term(body) + "; ";
      }
      return out + "}";
    }
  }
  return {};
}

std::string serialize_literal(const Literal& lit) {
  std::string out = serialize_term(lit.source);
  if (lit.positive) {
    out += " -" + lit.label + "-> " + serialize_term(*lit.target);
  } else {
    out += " -/" + lit.label + "->";
  }
  return out;
}

std::string serialize_rule(const TransitionRule& rule) {
  std::string out;
  if (rule.schema) {
    out += "forall " + rule.schema->metavar + " in {";
    for (std::size_t i = 0; i < rule.schema->range.size(); ++i) {
      if (i) out += ",";
      out += rule.schema->range[i];
    }
    out += "}: ";
  }
  for (std::size_t i = 0; i < rule.premises.size(); ++i) {
    if (i) out += ", ";
    out += serialize_literal(rule.premises[i]);
  }
  if (!rule.premises.empty()) out += " ";
  out += "|- " + serialize_literal(rule.conclusion);
  return out;
}

namespace {

template <typename It>
std::string join(It begin, It end, const std::string& sep) {
  std::string out;
  for (It it = begin; it != end; ++it) {
    if (it != begin) out += sep;
    out += *it;
  }
  return out;
}

}  // namespace

std::string serialize_tss(const Tss& tss) {
  std::ostringstream out;
  out << "tss " << (tss.name.empty() ? "unnamed" : tss.name) << "\n";
  out << "actions: " << join(tss.actions.begin(), tss.actions.end(), ", ") << ";\n";
  if (!tss.signature.empty()) {
    out << "sig: ";
    bool first = true;
    for (const auto& [sym, arity] : tss.signature.declarations()) {
      if (!first) out << ", ";
      first = false;
      out << sym << "/" << arity;
    }
    out << ";\n";
  }
  if (tss.recursion_unfolding) out << "unfolding: on;\n";
  std::vector<std::string> rules;
  rules.reserve(tss.rules.size());
  for (const TransitionRule& r : tss.rules) rules.push_back(serialize_rule(r));
  std::sort(rules.begin(), rules.end());
  rules.erase(std::unique(rules.begin(), rules.end()), rules.end());
  for (const std::string& r : rules) out << r << "\n";
  return out.str();
}

std::string serialize_graph(const ProcessGraph& g) {
  std::ostringstream out;
  out << "graph " << (g.name.empty() ? graph_constant_name(g) : g.name) << " {\n";
  out << "  states: " << join(g.states.begin(), g.states.end(), ", ") << ";\n";
  out << "  root: " << g.root << ";\n";
  if (!g.actions.empty()) {
    out << "  actions: " << join(g.actions.begin(), g.actions.end(), ", ") << ";\n";
  }
  if (!g.edges.empty()) {
    out << "  edges: ";
    bool first = true;
    for (const Edge& e : g.edges) {
      if (!first) out << ", ";
      first = false;
      out << e.from << " -" << e.label << "-> " << e.to;
    }
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string serialize_family(const GraphFamily& family) {
  std::string out;
  for (const ProcessGraph& g : family.members) out += serialize_graph(g);
  return out;
}

std::string serialize_lts(const Lts& lts) {
  std::ostringstream out;
  out << "lts {\n";
  out << "  states: ";
  bool first = true;
  for (const std::string& s : lts.states) {
    if (!first) out << ", ";
    first = false;
    out << "\"" << s << "\"";
  }
  out << ";\n";
  out << "  actions: " << join(lts.actions.begin(), lts.actions.end(), ", ") << ";\n";
  if (!lts.edges.empty()) {
    out << "  edges:\n";
    for (const Edge& e : lts.edges) {
      out << "    \"" << e.from << "\" -" << e.label << "-> \"" << e.to << "\";\n";
    }
  }
  if (lts.truncated) out << "  truncated: true;\n";
  out << "}\n";
  return out.str();
}

std::string serialize_subst(const Subst& sigma) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, t] : sigma.mapping()) {
    if (!first) out += ", ";
    first = false;
    out += v + " -> " + serialize_term(t);
  }
  return out + "}";
}

}  // namespace tsslab
