#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bach/agent.hpp"
#include "bach/errors.hpp"
#include "bach/logic.hpp"
#include "bach/term.hpp"

namespace bach {

/// A complete program: procedure and formula definitions plus the optional
/// entry point and goal designated by a `run` directive.
struct Model {
  ProcEnv procs;
  FormulaEnv formulae;
  std::optional<std::string> entry;
  std::optional<std::string> goal;

  Agent entry_agent() const {
    if (!entry) {
      throw ValidationError("model has no entry procedure");
    }
    return call(*entry);
  }

  BslFormula goal_formula() const {
    if (!goal) {
      throw ValidationError("model has no goal formula");
    }
    return fvar(*goal);
  }
};

inline bool operator==(const Model& a, const Model& b) {
  if (a.entry != b.entry || a.goal != b.goal) {
    return false;
  }
  if (a.procs.names() != b.procs.names() ||
      a.formulae.names() != b.formulae.names()) {
    return false;
  }
  for (const std::string& name : a.procs.names()) {
    const ProcDef& x = a.procs.at(name);
    const ProcDef& y = b.procs.at(name);
    if (x.formals != y.formals || !(x.body == y.body)) {
      return false;
    }
  }
  for (const std::string& name : a.formulae.names()) {
    if (!(a.formulae.at(name) == b.formulae.at(name))) {
      return false;
    }
  }
  return true;
}

inline bool operator!=(const Model& a, const Model& b) { return !(a == b); }

/// Runs all static checks and, when no `run` directive named an entry,
/// defaults to a zero-parameter procedure called Protocol if one exists.
inline void finalize_model(Model& m) {
  validate(m.procs);
  validate(m.formulae);
  if (!m.entry && m.procs.contains("Protocol") &&
      m.procs.at("Protocol").formals.empty()) {
    m.entry = "Protocol";
  }
  if (m.entry) {
    const ProcDef& def = m.procs.at(*m.entry);  // UnknownProcedureError
    if (!def.formals.empty()) {
      throw ArityError(*m.entry, 0, def.formals.size());
    }
  }
  if (m.goal && !m.formulae.contains(*m.goal)) {
    throw UnknownFormulaVariableError(*m.goal);
  }
}

namespace detail {

enum class Tok {
  ident,
  kw_proc, kw_form, kw_run, kw_with,
  kw_sum, kw_in,
  kw_tell, kw_ask, kw_get, kw_nask,
  kw_bf,
  lparen, rparen, lbracket, rbracket, lbrace, rbrace,
  comma, semicolon, dot, plus, parallel, bang, amp, pipe, equals,
  end
};

struct Token {
  Tok type;
  std::string text;
  int line;
  int col;
};

inline Tok keyword_or_ident(const std::string& s) {
  if (s == "proc") return Tok::kw_proc;
  if (s == "form") return Tok::kw_form;
  if (s == "run") return Tok::kw_run;
  if (s == "with") return Tok::kw_with;
  if (s == "sum") return Tok::kw_sum;
  if (s == "in") return Tok::kw_in;
  if (s == "tell") return Tok::kw_tell;
  if (s == "ask") return Tok::kw_ask;
  if (s == "get") return Tok::kw_get;
  if (s == "nask") return Tok::kw_nask;
  if (s == "bf") return Tok::kw_bf;
  return Tok::ident;
}

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto step = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      step();
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < src.size() && src[i] != '\n') {
        step();
      }
      continue;
    }
    const int tl = line;
    const int tc = col;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) ||
              src[j] == '_')) {
        ++j;
      }
      std::string word(src.substr(i, j - i));
      step(j - i);
      out.push_back(Token{keyword_or_ident(word), std::move(word), tl, tc});
      continue;
    }
    auto single = [&](Tok t) {
      out.push_back(Token{t, std::string(1, c), tl, tc});
      step();
    };
    switch (c) {
      case '(': single(Tok::lparen); break;
      case ')': single(Tok::rparen); break;
      case '[': single(Tok::lbracket); break;
      case ']': single(Tok::rbracket); break;
      case '{': single(Tok::lbrace); break;
      case '}': single(Tok::rbrace); break;
      case ',': single(Tok::comma); break;
      case ';': single(Tok::semicolon); break;
      case '.': single(Tok::dot); break;
      case '+': single(Tok::plus); break;
      case '!': single(Tok::bang); break;
      case '&': single(Tok::amp); break;
      case '=': single(Tok::equals); break;
      case '|':
        if (i + 1 < src.size() && src[i + 1] == '|') {
          out.push_back(Token{Tok::parallel, "||", tl, tc});
          step(2);
        } else {
          single(Tok::pipe);
        }
        break;
      default:
        throw SyntaxError(tl, tc,
                          std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back(Token{Tok::end, "", line, col});
  return out;
}

class Parser {
public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Model parse_program() {
    Model m;
    while (!check(Tok::end)) {
      parse_decl(m);
    }
    finalize_model(m);
    return m;
  }

  SiTerm parse_whole_term() {
    SiTerm t = parse_term();
    if (!check(Tok::end)) {
      fail("trailing input after the term");
    }
    return t;
  }

private:
  const Token& peek() const { return toks_[pos_]; }

  bool check(Tok t) const { return peek().type == t; }

  const Token& advance() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(peek().line, peek().col, msg);
  }

  const Token& expect(Tok t, const char* what) {
    if (!check(t)) {
      fail(std::string("expected ") + what);
    }
    return advance();
  }

  void parse_decl(Model& m) {
    if (check(Tok::kw_proc)) {
      advance();
      std::string name = expect(Tok::ident, "a procedure name").text;
      std::vector<std::string> formals;
      if (check(Tok::lparen)) {
        advance();
        while (true) {
          const Token& f = expect(Tok::ident, "a formal parameter");
          if (!is_upper_identifier(f.text)) {
            throw SyntaxError(f.line, f.col,
                              "formal parameters must start with an uppercase "
                              "letter");
          }
          formals.push_back(f.text);
          if (!check(Tok::comma)) {
            break;
          }
          advance();
        }
        expect(Tok::rparen, "')'");
      }
      expect(Tok::equals, "'='");
      Agent body = parse_agent();
      expect(Tok::dot, "'.' after the procedure body");
      m.procs.define(std::move(name), std::move(formals), std::move(body));
      return;
    }
    if (check(Tok::kw_form)) {
      advance();
      std::string name = expect(Tok::ident, "a formula name").text;
      expect(Tok::equals, "'='");
      BslFormula f = parse_formula();
      expect(Tok::dot, "'.' after the formula");
      m.formulae.define(std::move(name), std::move(f));
      return;
    }
    if (check(Tok::kw_run)) {
      const Token& kw = advance();
      if (m.entry) {
        throw SyntaxError(kw.line, kw.col, "duplicate run directive");
      }
      m.entry = expect(Tok::ident, "a procedure name").text;
      if (check(Tok::kw_with)) {
        advance();
        m.goal = expect(Tok::ident, "a formula name").text;
      }
      expect(Tok::dot, "'.' after the run directive");
      return;
    }
    fail("expected 'proc', 'form' or 'run'");
  }

  // agent := par { "+" par } ; par := seq { "||" seq } ; seq := atom { ";" atom }
  Agent parse_agent() {
    Agent a = parse_par();
    while (check(Tok::plus)) {
      advance();
      a = choice(std::move(a), parse_par());
    }
    return a;
  }

  Agent parse_par() {
    Agent a = parse_seq();
    while (check(Tok::parallel)) {
      advance();
      a = par(std::move(a), parse_seq());
    }
    return a;
  }

  Agent parse_seq() {
    Agent a = parse_atom();
    while (check(Tok::semicolon)) {
      advance();
      a = seq(std::move(a), parse_atom());
    }
    return a;
  }

  Agent parse_atom() {
    switch (peek().type) {
      case Tok::kw_tell:
      case Tok::kw_ask:
      case Tok::kw_get:
      case Tok::kw_nask: {
        const Tok op = advance().type;
        expect(Tok::lparen, "'('");
        SiTerm t = parse_term();
        expect(Tok::rparen, "')'");
        switch (op) {
          case Tok::kw_tell: return tell(std::move(t));
          case Tok::kw_ask: return ask(std::move(t));
          case Tok::kw_get: return get(std::move(t));
          default: return nask(std::move(t));
        }
      }
      case Tok::kw_sum: {
        advance();
        const Token& b = expect(Tok::ident, "a sum binder");
        if (!is_upper_identifier(b.text)) {
          throw SyntaxError(b.line, b.col,
                            "sum binders must start with an uppercase letter");
        }
        std::string binder = b.text;
        expect(Tok::kw_in, "'in'");
        expect(Tok::lbracket, "'['");
        std::vector<SiTerm> domain;
        while (true) {
          const Token& at = peek();
          SiTerm d = parse_term();
          if (!d.is_ground()) {
            throw SyntaxError(at.line, at.col, "sum domains must be ground");
          }
          domain.push_back(std::move(d));
          if (!check(Tok::comma)) {
            break;
          }
          advance();
        }
        expect(Tok::rbracket, "']'");
        expect(Tok::lbrace, "'{'");
        Agent body = parse_agent();
        expect(Tok::rbrace, "'}'");
        return gsum(std::move(binder), std::move(domain), std::move(body));
      }
      case Tok::lparen: {
        advance();
        Agent a = parse_agent();
        expect(Tok::rparen, "')'");
        return a;
      }
      case Tok::ident: {
        std::string name = advance().text;
        std::vector<SiTerm> args;
        if (check(Tok::lparen)) {
          advance();
          while (true) {
            args.push_back(parse_term());
            if (!check(Tok::comma)) {
              break;
            }
            advance();
          }
          expect(Tok::rparen, "')'");
        }
        return call(std::move(name), std::move(args));
      }
      default:
        fail("expected an agent");
    }
  }

  SiTerm parse_term() {
    if (!check(Tok::ident)) {
      fail("expected a term");
    }
    const Token& t = advance();
    if (is_upper_identifier(t.text)) {
      if (check(Tok::lparen)) {
        fail("variables take no arguments");
      }
      return var(t.text);
    }
    if (check(Tok::lparen)) {
      advance();
      std::vector<SiTerm> args;
      while (true) {
        args.push_back(parse_term());
        if (!check(Tok::comma)) {
          break;
        }
        advance();
      }
      expect(Tok::rparen, "')'");
      return compound(t.text, std::move(args));
    }
    return token(t.text);
  }

  // formula := fseq { "+" fseq } ; fseq := fatom { ";" fatom }
  BslFormula parse_formula() {
    BslFormula f = parse_fseq();
    while (check(Tok::plus)) {
      advance();
      f = fchoice(std::move(f), parse_fseq());
    }
    return f;
  }

  BslFormula parse_fseq() {
    BslFormula f = parse_fatom();
    while (check(Tok::semicolon)) {
      advance();
      f = fseq(std::move(f), parse_fatom());
    }
    return f;
  }

  BslFormula parse_fatom() {
    switch (peek().type) {
      case Tok::kw_bf:
      case Tok::bang:
        return basic(parse_basic());
      case Tok::lparen: {
        // A parenthesis may open either a basic formula, "(bf(a) | bf(b))",
        // or a grouped compound formula, "(F ; G)". Try the basic reading
        // first and fall back on failure.
        const std::size_t saved = pos_;
        try {
          return basic(parse_basic());
        } catch (const SyntaxError&) {
          pos_ = saved;
        }
        advance();
        BslFormula f = parse_formula();
        expect(Tok::rparen, "')'");
        return f;
      }
      case Tok::ident:
        return fvar(advance().text);
      default:
        fail("expected a formula");
    }
  }

  // basic := and { "|" and } ; and := not { "&" not }
  // not := "!" not | "bf" "(" term ")" | "(" basic ")"
  BasicFormula parse_basic() {
    BasicFormula f = parse_basic_and();
    while (check(Tok::pipe)) {
      advance();
      f = std::move(f) | parse_basic_and();
    }
    return f;
  }

  BasicFormula parse_basic_and() {
    BasicFormula f = parse_basic_not();
    while (check(Tok::amp)) {
      advance();
      f = std::move(f) & parse_basic_not();
    }
    return f;
  }

  BasicFormula parse_basic_not() {
    switch (peek().type) {
      case Tok::bang:
        advance();
        return !parse_basic_not();
      case Tok::kw_bf: {
        advance();
        expect(Tok::lparen, "'('");
        const Token& at = peek();
        SiTerm t = parse_term();
        if (!t.is_ground()) {
          throw SyntaxError(at.line, at.col, "bf terms must be ground");
        }
        expect(Tok::rparen, "')'");
        return bf(std::move(t));
      }
      case Tok::lparen: {
        advance();
        BasicFormula f = parse_basic();
        expect(Tok::rparen, "')'");
        return f;
      }
      default:
        fail("expected a basic formula");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses and validates a complete program.
inline Model parse_program(std::string_view source) {
  detail::Parser p(source);
  return p.parse_program();
}

/// Parses a single term; the whole input must be one term. Inverse of
/// render() for ground terms.
inline SiTerm parse_term(std::string_view source) {
  detail::Parser p(source);
  return p.parse_whole_term();
}

inline Model parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_program(buf.str());
}

/// Source form of a whole model, one declaration per line. Parsing the
/// result yields an equal model.
inline std::string pretty(const Model& m) {
  std::string out;
  for (const std::string& name : m.procs.names()) {
    const ProcDef& def = m.procs.at(name);
    out += "proc ";
    out += name;
    if (!def.formals.empty()) {
      out += '(';
      bool first = true;
      for (const std::string& f : def.formals) {
        if (!first) {
          out += ',';
        }
        first = false;
        out += f;
      }
      out += ')';
    }
    out += " = ";
    out += pretty_agent(def.body);
    out += " .\n";
  }
  for (const std::string& name : m.formulae.names()) {
    out += "form ";
    out += name;
    out += " = ";
    out += pretty_formula(m.formulae.at(name));
    out += " .\n";
  }
  if (m.entry) {
    out += "run ";
    out += *m.entry;
    if (m.goal) {
      out += " with ";
      out += *m.goal;
    }
    out += " .\n";
  }
  return out;
}

}  // namespace bach
