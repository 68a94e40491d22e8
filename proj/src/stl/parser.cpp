// Copyright 2026 The Lawforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Recursive-descent parser for the law formula dialect. The grammar is
// documented in docs/stl_grammar.md.

#include <cctype>
#include <charconv>
#include <cmath>

#include "lawforge/stl.hpp"

namespace lawforge::stl {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : InputError("syntax error at " + std::to_string(line) + ":" + std::to_string(column) +
                 ": " + message),
      line_(line),
      column_(column) {}

namespace {

enum class Tok {
  kIdent,
  kNumber,
  kComparator,
  kLParen,
  kRParen,
  kLBrace,
  kRBrace,
  kLBracket,
  kRBracket,
  kComma,
  kArrow,
  kEnd
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  double number = 0.0;
  Comparator cmp = Comparator::kGt;
  std::size_t line = 1;
  std::size_t column = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::kEnd;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (ident_start(c)) {
        lex_ident(t);
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
                 (c == '-' && pos_ + 1 < src_.size() &&
                  (std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) ||
                   src_[pos_ + 1] == '.'))) {
        lex_number(t);
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
        t.kind = Tok::kArrow;
        t.text = "->";
        advance(2);
      } else if (c == '<' || c == '>' || c == '=' || c == '!') {
        lex_comparator(t);
      } else {
        switch (c) {
          case '(': t.kind = Tok::kLParen; break;
          case ')': t.kind = Tok::kRParen; break;
          case '{': t.kind = Tok::kLBrace; break;
          case '}': t.kind = Tok::kRBrace; break;
          case '[': t.kind = Tok::kLBracket; break;
          case ']': t.kind = Tok::kRBracket; break;
          case ',': t.kind = Tok::kComma; break;
          default:
            throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
        }
        t.text = std::string(1, c);
        advance(1);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
      } else {
        break;
      }
    }
  }

  void lex_ident(Token& t) {
    std::size_t start = pos_;
    for (;;) {
      while (pos_ < src_.size() && ident_char(src_[pos_])) advance(1);
      // Dotted names such as traffic_light_ahead.color.
      if (pos_ + 1 < src_.size() && src_[pos_] == '.' && ident_start(src_[pos_ + 1])) {
        advance(1);
        continue;
      }
      break;
    }
    t.kind = Tok::kIdent;
    t.text = std::string(src_.substr(start, pos_ - start));
  }

  void lex_number(Token& t) {
    std::size_t start = pos_;
    if (src_[pos_] == '-') advance(1);
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                                  src_[pos_] == '.')) {
      advance(1);
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      advance(1);
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance(1);
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance(1);
    }
    t.text = std::string(src_.substr(start, pos_ - start));
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size() || !std::isfinite(t.number)) {
      throw ParseError(t.line, t.column, "malformed number '" + t.text + "'");
    }
    t.kind = Tok::kNumber;
  }

  void lex_comparator(Token& t) {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (src_[pos_] == '<' || src_[pos_] == '>' || src_[pos_] == '=' || src_[pos_] == '!')) {
      advance(1);
    }
    t.text = std::string(src_.substr(start, pos_ - start));
    t.kind = Tok::kComparator;
    if (t.text == ">") t.cmp = Comparator::kGt;
    else if (t.text == ">=") t.cmp = Comparator::kGe;
    else if (t.text == "<") t.cmp = Comparator::kLt;
    else if (t.text == "<=") t.cmp = Comparator::kLe;
    else if (t.text == "=" || t.text == "==") t.cmp = Comparator::kEq;
    else if (t.text == "!=") t.cmp = Comparator::kNe;
    else throw ParseError(t.line, t.column, "unknown comparator '" + t.text + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

bool is_keyword(const std::string& s) {
  return s == "G" || s == "F" || s == "not" || s == "and" || s == "or" || s == "implies" ||
         s == "true" || s == "false";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Formula parse() {
    Formula f = implication();
    if (peek().kind != Tok::kEnd) fail(peek(), "unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool at_keyword(std::string_view kw) const {
    return peek().kind == Tok::kIdent && peek().text == kw;
  }

  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.column, msg);
  }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      fail(peek(), std::string("expected ") + what +
                       (peek().kind == Tok::kEnd ? " before end of input"
                                                 : ", found '" + peek().text + "'"));
    }
    return next();
  }

  // implies is right-associative and binds loosest.
  Formula implication() {
    Formula lhs = disjunction();
    if (at_keyword("implies") || peek().kind == Tok::kArrow) {
      next();
      Formula rhs = implication();
      return Formula::implication(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Formula disjunction() {
    std::vector<Formula> parts{conjunction()};
    while (at_keyword("or")) {
      next();
      parts.push_back(conjunction());
    }
    return parts.size() == 1 ? std::move(parts[0]) : Formula::disjunction(std::move(parts));
  }

  Formula conjunction() {
    std::vector<Formula> parts{unary()};
    while (at_keyword("and")) {
      next();
      parts.push_back(unary());
    }
    return parts.size() == 1 ? std::move(parts[0]) : Formula::conjunction(std::move(parts));
  }

  Formula unary() {
    if (at_keyword("not")) {
      next();
      return Formula::negation(unary());
    }
    if (at_keyword("G") || at_keyword("F")) {
      bool always = next().text == "G";
      std::optional<Window> w;
      if (peek().kind == Tok::kLBracket) w = window();
      Formula body = unary();
      return always ? Formula::always(std::move(body), std::move(w))
                    : Formula::eventually(std::move(body), std::move(w));
    }
    return primary();
  }

  Window window() {
    const Token& open = next();  // '['
    Window w;
    const Token& lo = peek();
    if (lo.kind != Tok::kNumber) fail(lo, "malformed window: lower bound must be a number");
    next();
    w.lower = lo.number;
    if (w.lower < 0.0) fail(lo, "malformed window: negative lower bound");
    if (peek().kind != Tok::kComma) fail(peek(), "malformed window: expected ','");
    next();
    const Token& hi = peek();
    if (hi.kind == Tok::kNumber) {
      if (hi.number < w.lower) fail(hi, "malformed window: upper bound below lower bound");
      w.upper = hi.number;
    } else if (hi.kind == Tok::kIdent && !is_keyword(hi.text)) {
      w.upper = Budget{hi.text};
    } else {
      fail(hi, "malformed window: upper bound must be a number or a budget signal");
    }
    next();
    if (peek().kind != Tok::kRBracket) fail(peek(), "malformed window: expected ']'");
    next();
    (void)open;
    return w;
  }

  Formula primary() {
    const Token& t = peek();
    if (t.kind == Tok::kLParen || t.kind == Tok::kLBrace) {
      next();
      Formula inner = implication();
      if (t.kind == Tok::kLParen) {
        expect(Tok::kRParen, "')'");
      } else {
        expect(Tok::kRBrace, "'}'");
      }
      return inner;
    }
    if (at_keyword("true") || at_keyword("false")) {
      return Formula::constant(next().text == "true");
    }
    if (t.kind == Tok::kIdent) {
      if (is_keyword(t.text)) fail(t, "unexpected keyword '" + t.text + "'");
      return atom();
    }
    if (t.kind == Tok::kEnd) fail(t, "unexpected end of input");
    if (t.kind == Tok::kNumber) fail(t, "expected a signal name before the comparator");
    fail(t, "unexpected '" + t.text + "'");
  }

  Formula atom() {
    const Token& name = next();
    Atom a;
    a.signal = name.text;
    if (peek().kind == Tok::kLParen) {
      // Call form: name(budget) means name <= budget.
      next();
      const Token& arg = peek();
      if (arg.kind == Tok::kIdent && !is_keyword(arg.text)) {
        a.rhs = Budget{arg.text};
      } else if (arg.kind == Tok::kNumber) {
        a.rhs = arg.number;
      } else {
        fail(arg, "expected a budget signal or number inside '" + name.text + "(...)'");
      }
      next();
      expect(Tok::kRParen, "')'");
      a.cmp = Comparator::kLe;
      return Formula::atom(std::move(a));
    }
    if (peek().kind != Tok::kComparator) {
      // Bare boolean signal.
      a.cmp = Comparator::kEq;
      a.rhs = Symbol{"true"};
      return Formula::atom(std::move(a));
    }
    const Token& cmp = next();
    a.cmp = cmp.cmp;
    const Token& rhs = peek();
    const bool equality = a.cmp == Comparator::kEq || a.cmp == Comparator::kNe;
    if (rhs.kind == Tok::kNumber) {
      a.rhs = rhs.number;
    } else if (rhs.kind == Tok::kIdent && (rhs.text == "true" || rhs.text == "false" ||
                                           !is_keyword(rhs.text))) {
      if (equality) {
        a.rhs = Symbol{rhs.text};
      } else if (rhs.text == "true" || rhs.text == "false") {
        fail(rhs, "boolean literal needs '=' or '!='");
      } else {
        a.rhs = SignalRef{rhs.text};
      }
    } else {
      fail(cmp, "dangling comparator '" + cmp.text + "'");
    }
    next();
    return Formula::atom(std::move(a));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text) {
  Parser p(Lexer(text).run());
  return p.parse();
}

}  // namespace lawforge::stl
