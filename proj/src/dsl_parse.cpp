#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "deftop/dsl.hpp"
#include "deftop/error.hpp"

namespace deftop {

Cell Cell::isol(const Rational& q, std::string var) {
  return {Kind::IsolPoint, q, q, std::move(var)};
}

Cell Cell::open(const Rational& lo, const Rational& hi, std::string var) {
  if (!(lo < hi)) throw DomainError("open cell needs lo < hi");
  return {Kind::OpenCell, lo, hi, std::move(var)};
}

bool Cell::contains(const Rational& q) const {
  if (is_point()) return q == lo;
  return lo < q && q < hi;
}

Rational Cell::midpoint() const { return is_point() ? lo : deftop::midpoint(lo, hi); }

SemilinearSet Cell::as_set() const {
  return is_point() ? SemilinearSet::point(lo) : SemilinearSet::open(lo, hi);
}

std::string Cell::str() const {
  if (is_point()) return "{" + to_string(lo) + "}";
  return "(" + to_string(lo) + "," + to_string(hi) + ")";
}

std::size_t TopologySpec::cell_of(const Rational& q) const {
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (cells[i].contains(q)) return i;
  throw DomainError("point " + to_string(q) + " is not in X");
}

std::size_t TopologySpec::max_pieces() const {
  std::size_t m = 0;
  for (const auto& t : templates) m = std::max(m, t.pieces.size());
  return m;
}

std::vector<Rational> TopologySpec::cell_boundaries() const {
  std::vector<Rational> v;
  for (const auto& c : cells) {
    v.push_back(c.lo);
    v.push_back(c.hi);
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

SemilinearSet TopologySpec::neighborhood(const Rational& a, const Rational& eps) const {
  return eval_template(templates[cell_of(a)].pieces, a, eps);
}

const ValidationFailure* ValidationReport::failure(const std::string& check) const {
  for (const auto& f : failures)
    if (f.check == check) return &f;
  return nullptr;
}

namespace {

enum class Tok { Ident, Int, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : s_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip();
      Token t;
      t.line = line_;
      t.col = col_;
      if (i_ >= s_.size()) {
        out.push_back(t);
        return out;
      }
      char c = s_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t st = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) adv(1);
        t.kind = Tok::Ident;
        t.text = std::string(s_.substr(st, i_ - st));
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t st = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) adv(1);
        t.kind = Tok::Int;
        t.text = std::string(s_.substr(st, i_ - st));
      } else if (s_.substr(i_, 3) == "\xE2\x88\x92") {  // U+2212 minus sign
        adv(3, 1);
        t.kind = Tok::Punct;
        t.text = "-";
      } else if (std::string_view("()[]{},;:+-*/").find(c) != std::string_view::npos) {
        adv(1);
        t.kind = Tok::Punct;
        t.text = std::string(1, c);
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
      }
      out.push_back(t);
    }
  }

 private:
  void adv(std::size_t bytes, std::size_t cols = 0) {
    for (std::size_t k = 0; k < bytes; ++k) {
      if (s_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else if (cols == 0) {
        ++col_;
      }
      ++i_;
    }
    col_ += cols;
  }

  void skip() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') adv(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        adv(1);
      } else {
        break;
      }
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// an expression value: affine in (a, eps)
struct Val {
  AffineExpr e;
  bool constant() const { return e.coef_a == 0 && e.coef_eps == 0; }
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  TopologySpec run() {
    TopologySpec spec;
    keyword("space");
    punct("{");
    std::vector<Component> items;
    for (;;) {
      items.push_back(item().first);
      if (is("}")) break;
      punct(",");
    }
    punct("}");
    spec.space = canonicalize(items);
    keyword("topology");
    punct("{");
    do {
      rule(spec);
    } while (!is("}"));
    punct("}");
    if (cur().kind != Tok::End) fail("unexpected text after the topology block");
    return spec;
  }

 private:
  const Token& cur() const { return t_[p_]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("syntax error: " + what, cur().line, cur().col);
  }

  bool is(const char* p) const { return cur().kind == Tok::Punct && cur().text == p; }
  bool is_word(const char* w) const { return cur().kind == Tok::Ident && cur().text == w; }

  void punct(const char* p) {
    if (!is(p)) fail(std::string("expected '") + p + "'" + found());
    ++p_;
  }

  void keyword(const char* w) {
    if (!is_word(w)) fail(std::string("expected '") + w + "'" + found());
    ++p_;
  }

  std::string found() const {
    if (cur().kind == Tok::End) return " but reached end of input";
    return " but found '" + cur().text + "'";
  }

  Rational rat() {
    bool neg = false;
    if (is("-")) {
      neg = true;
      ++p_;
    }
    if (cur().kind != Tok::Int) fail("expected a number" + found());
    std::string text = cur().text;
    ++p_;
    if (is("/")) {
      ++p_;
      if (cur().kind != Tok::Int) fail("expected a denominator" + found());
      text += "/" + cur().text;
      ++p_;
    }
    Rational q;
    try {
      q = parse_rational(text);
    } catch (const std::invalid_argument&) {
      fail("bad rational '" + text + "'");
    }
    return neg ? Rational(-q) : q;
  }

  std::pair<Component, Token> item() {
    if (is_word("interval") || is_word("point")) ++p_;
    Token at = cur();
    if (is("{")) {
      ++p_;
      Rational q = rat();
      punct("}");
      return {Component::point(q), at};
    }
    if (!is("(")) fail("expected '(' or '{'" + found());
    ++p_;
    Rational lo = rat();
    punct(",");
    Rational hi = rat();
    punct(")");
    if (!(lo < hi)) throw ParseError("syntax error: empty interval", at.line, at.col);
    return {Component::interval(lo, hi), at};
  }

  void rule(TopologySpec& spec) {
    keyword("on");
    auto [comp, at] = item();
    keyword("at");
    if (cur().kind != Tok::Ident || cur().text == "eps") fail("expected a variable name" + found());
    std::string var = cur().text;
    ++p_;
    punct(":");
    Cell cell = comp.is_point() ? Cell::isol(comp.lo, var) : Cell::open(comp.lo, comp.hi, var);
    for (const auto& c : spec.cells) {
      if (c.kind == cell.kind && c.lo == cell.lo && c.hi == cell.hi)
        throw ParseError("duplicate cell " + cell.str(), at.line, at.col);
    }
    var_ = var;
    point_ = cell.is_point();
    pt_ = cell.lo;
    NbhdTemplate tpl;
    tpl.owner = spec.cells.size();
    punct("{");
    for (;;) {
      tpl.pieces.push_back(piece());
      if (is("}")) break;
      punct(",");
    }
    punct("}");
    punct(";");
    spec.cells.push_back(cell);
    spec.templates.push_back(tpl);
  }

  IntervalPiece piece() {
    if (is("{")) {
      ++p_;
      AffineExpr at = expr().e;
      punct("}");
      return IntervalPiece::singleton(at);
    }
    bool lc;
    if (is("("))
      lc = false;
    else if (is("["))
      lc = true;
    else
      fail("expected '(', '[' or '{'" + found());
    ++p_;
    AffineExpr lo = expr().e;
    punct(",");
    AffineExpr hi = expr().e;
    bool rc;
    if (is(")"))
      rc = false;
    else if (is("]"))
      rc = true;
    else
      fail("expected ')' or ']'" + found());
    ++p_;
    return IntervalPiece::interval(lo, hi, lc, rc);
  }

  Val expr() {
    Val v;
    bool neg = false;
    if (is("+") || is("-")) {
      neg = is("-");
      ++p_;
    }
    v = term();
    if (neg) v.e = v.e * Rational(-1);
    while (is("+") || is("-")) {
      bool minus = is("-");
      ++p_;
      Val r = term();
      v.e = minus ? v.e - r.e : v.e + r.e;
    }
    return v;
  }

  Val term() {
    Val v = factor();
    while (is("*") || is("/")) {
      bool div = is("/");
      Token at = cur();
      ++p_;
      Val r = factor();
      if (div) {
        if (!r.constant() || r.e.constant == 0)
          throw ParseError("syntax error: division by a non-constant or zero", at.line, at.col);
        v.e = v.e * (Rational(1) / r.e.constant);
      } else if (r.constant()) {
        v.e = v.e * r.e.constant;
      } else if (v.constant()) {
        v.e = r.e * v.e.constant;
      } else {
        throw ParseError("syntax error: product of two variables is not affine", at.line, at.col);
      }
    }
    return v;
  }

  Val factor() {
    Val v;
    if (is("-")) {
      ++p_;
      v = factor();
      v.e = v.e * Rational(-1);
      return v;
    }
    if (is("(")) {
      ++p_;
      v = expr();
      punct(")");
      return v;
    }
    if (cur().kind == Tok::Int) {
      v.e.constant = parse_rational(cur().text);
      ++p_;
      return v;
    }
    if (cur().kind == Tok::Ident) {
      const std::string& name = cur().text;
      if (name == "eps") {
        v.e.coef_eps = 1;
      } else if (name == var_) {
        if (point_)
          v.e.constant = pt_;
        else
          v.e.coef_a = 1;
      } else {
        throw ParseError("unknown identifier '" + name + "'", cur().line, cur().col);
      }
      ++p_;
      return v;
    }
    fail("expected an expression" + found());
  }

  std::vector<Token> t_;
  std::size_t p_ = 0;
  std::string var_;
  bool point_ = false;
  Rational pt_;
};

}  // namespace

TopologySpec parse_spec(std::string_view text) { return Parser(Lexer(text).run()).run(); }

std::string emit(const TopologySpec& spec) {
  std::ostringstream out;
  out << "space { ";
  bool first = true;
  for (const auto& c : spec.space.components()) {
    if (!first) out << ", ";
    first = false;
    if (c.is_point())
      out << "{" << to_string(c.lo) << "}";
    else
      out << "(" << to_string(c.lo) << "," << to_string(c.hi) << ")";
  }
  out << " }\ntopology {\n";
  for (std::size_t i = 0; i < spec.cells.size(); ++i) {
    const Cell& c = spec.cells[i];
    out << "  on " << c.str() << " at " << c.var << ": { ";
    const auto& ps = spec.templates[i].pieces;
    for (std::size_t k = 0; k < ps.size(); ++k) {
      if (k) out << ", ";
      out << ps[k].str(c.var);
    }
    out << " };\n";
  }
  out << "}\n";
  return out.str();
}

TopologySpec load_spec(std::string_view text) {
  ValidationReport r = validate(parse_spec(text));
  if (!r.ok) {
    std::string msg = "invalid topology:";
    for (const auto& f : r.failures) msg += " " + f.check + " (" + f.detail + ")";
    throw DomainError(msg);
  }
  return *r.spec;
}

TopologySpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_spec(ss.str());
}

void require_validated(const TopologySpec& spec) {
  if (!spec.validated || spec.eps_domain.size() != spec.cells.size())
    throw DomainError("operation needs a validated spec");
}

}  // namespace deftop
