#include "deftop/lra.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <unordered_map>

#include "deftop/error.hpp"
#include "lra_dnf.hpp"

namespace deftop {

using detail::Dnf;

// ---------------------------------------------------------------- LinTerm

LinTerm LinTerm::var(const std::string& name, const Rational& coef) {
  if (name.empty()) throw std::invalid_argument("empty variable name");
  LinTerm t;
  t.add(name, coef);
  return t;
}

void LinTerm::add(const std::string& name, const Rational& coef) {
  if (coef == 0) return;
  auto it = coeffs_.find(name);
  if (it == coeffs_.end()) {
    coeffs_.emplace(name, coef);
    return;
  }
  it->second += coef;
  if (it->second == 0) coeffs_.erase(it);
}

Rational LinTerm::coefficient(const std::string& name) const {
  auto it = coeffs_.find(name);
  return it == coeffs_.end() ? Rational(0) : it->second;
}

LinTerm LinTerm::operator+(const LinTerm& o) const {
  LinTerm r = *this;
  for (const auto& [n, c] : o.coeffs_) r.add(n, c);
  r.constant_ += o.constant_;
  return r;
}

LinTerm LinTerm::operator-(const LinTerm& o) const { return *this + (-o); }

LinTerm LinTerm::operator-() const { return *this * Rational(-1); }

LinTerm LinTerm::operator*(const Rational& k) const {
  LinTerm r;
  if (k == 0) return r;
  for (const auto& [n, c] : coeffs_) r.coeffs_.emplace(n, c * k);
  r.constant_ = constant_ * k;
  return r;
}

bool LinTerm::operator<(const LinTerm& o) const {
  if (coeffs_ != o.coeffs_) return coeffs_ < o.coeffs_;
  return constant_ < o.constant_;
}

Rational LinTerm::eval(const Assignment& env) const {
  Rational v = constant_;
  for (const auto& [n, c] : coeffs_) {
    auto it = env.find(n);
    if (it == env.end()) throw DomainError("no value for variable '" + n + "'");
    v += c * it->second;
  }
  return v;
}

LinTerm LinTerm::substitute(const std::string& name, const LinTerm& by) const {
  auto it = coeffs_.find(name);
  if (it == coeffs_.end()) return *this;
  LinTerm r = *this;
  Rational c = it->second;
  r.coeffs_.erase(name);
  return r + by * c;
}

LinTerm LinTerm::rename(const std::map<std::string, std::string>& names) const {
  LinTerm r(constant_);
  for (const auto& [n, c] : coeffs_) {
    auto it = names.find(n);
    r.add(it == names.end() ? n : it->second, c);
  }
  return r;
}

std::string LinTerm::str() const {
  std::vector<std::string> parts;
  for (const auto& [n, c] : coeffs_) {
    if (c == 1)
      parts.push_back(n);
    else
      parts.push_back("(* " + to_string(c) + " " + n + ")");
  }
  if (constant_ != 0 || parts.empty()) parts.push_back(to_string(constant_));
  if (parts.size() == 1) return parts[0];
  std::string out = "(+";
  for (const auto& p : parts) out += " " + p;
  return out + ")";
}

// ------------------------------------------------------------- LinFormula

struct LinFormula::Node {
  Kind kind = Kind::True;
  LinTerm term;
  Rel rel = Rel::Lt;
  std::vector<LinFormula> kids;
  std::string var;
  // normal form, present when the node was produced by the engine
  std::shared_ptr<const detail::Dnf> dnf;
};

namespace {

LinFormula make(LinFormula::Kind k) {
  auto n = std::make_shared<LinFormula::Node>();
  n->kind = k;
  return LinFormula(n);
}

const LinFormula& true_formula() {
  static const LinFormula t = make(LinFormula::Kind::True);
  return t;
}

const LinFormula& false_formula() {
  static const LinFormula f = make(LinFormula::Kind::False);
  return f;
}

}  // namespace

LinFormula::LinFormula() : node_(true_formula().node_) {}

LinFormula LinFormula::truth(bool value) { return value ? true_formula() : false_formula(); }

LinFormula LinFormula::atom(const LinTerm& t, Rel rel) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atom;
  n->term = t;
  n->rel = rel;
  return LinFormula(n);
}

LinFormula LinFormula::conj(std::vector<LinFormula> parts) {
  std::vector<LinFormula> kept;
  for (auto& p : parts) {
    if (p.kind() == Kind::False) return truth(false);
    if (p.kind() == Kind::True) continue;
    kept.push_back(std::move(p));
  }
  if (kept.empty()) return truth(true);
  if (kept.size() == 1) return kept[0];
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->kids = std::move(kept);
  return LinFormula(n);
}

LinFormula LinFormula::disj(std::vector<LinFormula> parts) {
  std::vector<LinFormula> kept;
  for (auto& p : parts) {
    if (p.kind() == Kind::True) return truth(true);
    if (p.kind() == Kind::False) continue;
    kept.push_back(std::move(p));
  }
  if (kept.empty()) return truth(false);
  if (kept.size() == 1) return kept[0];
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->kids = std::move(kept);
  return LinFormula(n);
}

LinFormula LinFormula::negation(const LinFormula& f) {
  if (f.kind() == Kind::True) return truth(false);
  if (f.kind() == Kind::False) return truth(true);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->kids.push_back(f);
  return LinFormula(n);
}

LinFormula LinFormula::exists(const std::string& var, const LinFormula& body) {
  if (var.empty()) throw std::invalid_argument("empty variable name");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Exists;
  n->var = var;
  n->kids.push_back(body);
  return LinFormula(n);
}

LinFormula LinFormula::forall(const std::string& var, const LinFormula& body) {
  if (var.empty()) throw std::invalid_argument("empty variable name");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Forall;
  n->var = var;
  n->kids.push_back(body);
  return LinFormula(n);
}

LinFormula LinFormula::exists(const std::vector<std::string>& vars, const LinFormula& body) {
  LinFormula f = body;
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) f = exists(*it, f);
  return f;
}

LinFormula LinFormula::forall(const std::vector<std::string>& vars, const LinFormula& body) {
  LinFormula f = body;
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) f = forall(*it, f);
  return f;
}

LinFormula::Kind LinFormula::kind() const { return node_->kind; }

const LinTerm& LinFormula::term() const {
  if (kind() != Kind::Atom) throw std::logic_error("term() of a non-atom");
  return node_->term;
}

Rel LinFormula::rel() const {
  if (kind() != Kind::Atom) throw std::logic_error("rel() of a non-atom");
  return node_->rel;
}

const std::vector<LinFormula>& LinFormula::children() const { return node_->kids; }

const std::string& LinFormula::bound_var() const {
  if (kind() != Kind::Exists && kind() != Kind::Forall)
    throw std::logic_error("bound_var() of an unquantified formula");
  return node_->var;
}

const LinFormula& LinFormula::body() const {
  if (node_->kids.size() != 1 || kind() == Kind::And || kind() == Kind::Or)
    throw std::logic_error("body() of a formula without a single child");
  return node_->kids[0];
}

namespace {

void collect_free(const LinFormula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  using K = LinFormula::Kind;
  switch (f.kind()) {
    case K::True:
    case K::False:
      return;
    case K::Atom:
      for (const auto& [n, c] : f.term().coefficients())
        if (!bound.count(n)) out.insert(n);
      return;
    case K::And:
    case K::Or:
    case K::Not:
      for (const auto& k : f.children()) collect_free(k, bound, out);
      return;
    case K::Exists:
    case K::Forall: {
      bool fresh = bound.insert(f.bound_var()).second;
      collect_free(f.body(), bound, out);
      if (fresh) bound.erase(f.bound_var());
      return;
    }
  }
}

}  // namespace

std::set<std::string> LinFormula::free_vars() const {
  if (node_->dnf) return node_->dnf->vars();
  std::set<std::string> bound, out;
  collect_free(*this, bound, out);
  return out;
}

bool LinFormula::is_quantifier_free() const {
  if (node_->dnf) return true;
  if (kind() == Kind::Exists || kind() == Kind::Forall) return false;
  for (const auto& k : children())
    if (!k.is_quantifier_free()) return false;
  return true;
}

std::size_t LinFormula::size() const {
  std::size_t s = 1;
  for (const auto& k : children()) s += k.size();
  return s;
}

bool LinFormula::eval(const Assignment& env) const {
  switch (kind()) {
    case Kind::True:
      return true;
    case Kind::False:
      return false;
    case Kind::Atom: {
      Rational v = term().eval(env);
      switch (rel()) {
        case Rel::Lt:
          return v < 0;
        case Rel::Le:
          return v <= 0;
        case Rel::Eq:
          return v == 0;
      }
      return false;
    }
    case Kind::And:
      for (const auto& k : children())
        if (!k.eval(env)) return false;
      return true;
    case Kind::Or:
      for (const auto& k : children())
        if (k.eval(env)) return true;
      return false;
    case Kind::Not:
      return !body().eval(env);
    case Kind::Exists:
    case Kind::Forall:
      break;
  }
  throw DomainError("eval of a quantified formula; eliminate quantifiers first");
}

LinFormula LinFormula::rename(const std::map<std::string, std::string>& names) const {
  if (names.empty()) return *this;
  if (node_->dnf) return detail::from_dnf(detail::dnf_rename(*node_->dnf, names));
  switch (kind()) {
    case Kind::True:
    case Kind::False:
      return *this;
    case Kind::Atom:
      return atom(term().rename(names), rel());
    case Kind::And:
    case Kind::Or: {
      std::vector<LinFormula> ks;
      for (const auto& k : children()) ks.push_back(k.rename(names));
      return kind() == Kind::And ? conj(ks) : disj(ks);
    }
    case Kind::Not:
      return negation(body().rename(names));
    case Kind::Exists:
    case Kind::Forall: {
      auto inner = names;
      inner.erase(bound_var());
      auto fv = body().free_vars();
      for (const auto& [from, to] : inner) {
        if (to == bound_var() && fv.count(from))
          throw std::logic_error("renaming '" + from + "' would be captured by '" + to + "'");
      }
      LinFormula b = body().rename(inner);
      return kind() == Kind::Exists ? exists(bound_var(), b) : forall(bound_var(), b);
    }
  }
  return *this;
}

LinFormula LinFormula::substitute(const std::string& name, const LinTerm& by) const {
  if (node_->dnf) return detail::from_dnf(detail::dnf_substitute(*node_->dnf, name, by));
  switch (kind()) {
    case Kind::True:
    case Kind::False:
      return *this;
    case Kind::Atom:
      return atom(term().substitute(name, by), rel());
    case Kind::And:
    case Kind::Or: {
      std::vector<LinFormula> ks;
      for (const auto& k : children()) ks.push_back(k.substitute(name, by));
      return kind() == Kind::And ? conj(ks) : disj(ks);
    }
    case Kind::Not:
      return negation(body().substitute(name, by));
    case Kind::Exists:
    case Kind::Forall: {
      if (bound_var() == name) return *this;
      for (const auto& [n, c] : by.coefficients())
        if (n == bound_var()) throw std::logic_error("substitution captured by '" + n + "'");
      LinFormula b = body().substitute(name, by);
      return kind() == Kind::Exists ? exists(bound_var(), b) : forall(bound_var(), b);
    }
  }
  return *this;
}

std::string LinFormula::str() const {
  switch (kind()) {
    case Kind::True:
      return "true";
    case Kind::False:
      return "false";
    case Kind::Atom: {
      const char* op = rel() == Rel::Lt ? "<" : rel() == Rel::Le ? "<=" : "=";
      return std::string("(") + op + " " + term().str() + ")";
    }
    case Kind::And:
    case Kind::Or: {
      std::string out = kind() == Kind::And ? "(and" : "(or";
      for (const auto& k : children()) out += " " + k.str();
      return out + ")";
    }
    case Kind::Not:
      return "(not " + body().str() + ")";
    case Kind::Exists:
      return "(exists " + bound_var() + " " + body().str() + ")";
    case Kind::Forall:
      return "(forall " + bound_var() + " " + body().str() + ")";
  }
  return "";
}

bool LinFormula::operator==(const LinFormula& o) const {
  if (node_ == o.node_) return true;
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case Kind::True:
    case Kind::False:
      return true;
    case Kind::Atom:
      return rel() == o.rel() && term() == o.term();
    case Kind::Exists:
    case Kind::Forall:
      if (bound_var() != o.bound_var()) return false;
      [[fallthrough]];
    default:
      return children() == o.children();
  }
}

// ----------------------------------------------------------------- reader

namespace {

class SexpReader {
 public:
  explicit SexpReader(std::string_view t) : t_(t) {}

  LinFormula formula_at_top() {
    LinFormula f = formula();
    skip();
    if (pos_ != t_.size()) fail("trailing text");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < t_.size(); ++i) {
      if (t_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(what, line, col);
  }

  void skip() {
    while (pos_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < t_.size() && t_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string symbol() {
    skip();
    std::size_t start = pos_;
    while (pos_ < t_.size() && !std::isspace(static_cast<unsigned char>(t_[pos_])) &&
           t_[pos_] != '(' && t_[pos_] != ')')
      ++pos_;
    if (start == pos_) fail("expected a symbol");
    return std::string(t_.substr(start, pos_ - start));
  }

  static bool numeric(const std::string& s) {
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    return i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
  }

  Rational rational() {
    std::size_t at = pos_;
    std::string s = symbol();
    try {
      return parse_rational(s);
    } catch (const std::invalid_argument&) {
      pos_ = at;
      fail("expected a rational");
    }
  }

  LinTerm term() {
    if (!peek('(')) {
      std::size_t at = pos_;
      std::string s = symbol();
      if (numeric(s)) {
        pos_ = at;
        return LinTerm(rational());
      }
      return LinTerm::var(s);
    }
    expect('(');
    std::string op = symbol();
    LinTerm t;
    if (op == "+") {
      while (!peek(')')) t += term();
    } else if (op == "*") {
      Rational k = rational();
      t = term() * k;
    } else if (op == "-") {
      t = -term();
    } else {
      fail("unknown term operator '" + op + "'");
    }
    expect(')');
    return t;
  }

  LinFormula formula() {
    if (!peek('(')) {
      std::string s = symbol();
      if (s == "true") return LinFormula::truth(true);
      if (s == "false") return LinFormula::truth(false);
      fail("expected a formula");
    }
    expect('(');
    std::string op = symbol();
    LinFormula f;
    if (op == "and" || op == "or") {
      std::vector<LinFormula> ks;
      while (!peek(')')) ks.push_back(formula());
      f = op == "and" ? LinFormula::conj(ks) : LinFormula::disj(ks);
    } else if (op == "not") {
      f = LinFormula::negation(formula());
    } else if (op == "exists" || op == "forall") {
      std::string v = symbol();
      LinFormula b = formula();
      f = op == "exists" ? LinFormula::exists(v, b) : LinFormula::forall(v, b);
    } else if (op == "<" || op == "<=" || op == "=") {
      LinTerm t = term();
      f = LinFormula::atom(t, op == "<" ? Rel::Lt : op == "<=" ? Rel::Le : Rel::Eq);
    } else {
      fail("unknown operator '" + op + "'");
    }
    expect(')');
    return f;
  }

  std::string_view t_;
  std::size_t pos_ = 0;
};

}  // namespace

LinFormula LinFormula::parse(std::string_view text) { return SexpReader(text).formula_at_top(); }

// ---------------------------------------------------------------- helpers

LinFormula operator&&(const LinFormula& a, const LinFormula& b) { return LinFormula::conj({a, b}); }
LinFormula operator||(const LinFormula& a, const LinFormula& b) { return LinFormula::disj({a, b}); }
LinFormula operator!(const LinFormula& a) { return LinFormula::negation(a); }

LinFormula lt(const LinTerm& a, const LinTerm& b) { return LinFormula::atom(a - b, Rel::Lt); }
LinFormula le(const LinTerm& a, const LinTerm& b) { return LinFormula::atom(a - b, Rel::Le); }
LinFormula eq(const LinTerm& a, const LinTerm& b) { return LinFormula::atom(a - b, Rel::Eq); }
LinFormula gt(const LinTerm& a, const LinTerm& b) { return LinFormula::atom(b - a, Rel::Lt); }
LinFormula ge(const LinTerm& a, const LinTerm& b) { return LinFormula::atom(b - a, Rel::Le); }
LinFormula implies(const LinFormula& a, const LinFormula& b) { return !a || b; }
LinFormula iff(const LinFormula& a, const LinFormula& b) { return (a && b) || (!a && !b); }

LinFormula in_set(const std::string& var, const SemilinearSet& s) {
  return detail::from_dnf(detail::dnf_of_set(var, s));
}

// ------------------------------------------------------------ elimination

namespace detail {

LinFormula from_dnf(Dnf d) {
  std::vector<LinFormula> ors;
  for (const auto& c : d.conjs) {
    std::vector<LinFormula> ands;
    for (const auto& [t, r] : c.atoms()) ands.push_back(LinFormula::atom(t, r));
    ors.push_back(LinFormula::conj(ands));
  }
  LinFormula f = LinFormula::disj(ors);
  if (f.kind() == LinFormula::Kind::True || f.kind() == LinFormula::Kind::False) return f;
  auto n = std::make_shared<LinFormula::Node>(*f.node());
  n->dnf = std::make_shared<const Dnf>(std::move(d));
  return LinFormula(n);
}

namespace {

std::size_t occurrences(const Dnf& d, const std::string& x) {
  std::size_t n = 0;
  for (const auto& c : d.conjs)
    for (const auto& [l, b] : c.rows())
      for (const auto& [name, k] : l)
        if (name == x) ++n;
  return n;
}

// eliminates a block of like quantifiers, fewest occurrences first
Dnf eliminate_block(Dnf d, std::vector<std::string> vars) {
  while (!vars.empty()) {
    std::size_t best = 0;
    std::size_t best_n = occurrences(d, vars[0]);
    for (std::size_t i = 1; i < vars.size(); ++i) {
      std::size_t n = occurrences(d, vars[i]);
      if (n < best_n) {
        best = i;
        best_n = n;
      }
    }
    if (best_n > 0) d = dnf_exists(d, vars[best]);
    vars.erase(vars.begin() + static_cast<long>(best));
  }
  return d;
}

class Eliminator {
 public:
  Dnf run(const LinFormula& f) {
    const auto* key = f.node().get();
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Dnf d = compute(f);
    memo_.emplace(key, d);
    return d;
  }

 private:
  Dnf compute(const LinFormula& f) {
    using K = LinFormula::Kind;
    if (f.node()->dnf) return *f.node()->dnf;
    switch (f.kind()) {
      case K::True:
        return Dnf::top();
      case K::False:
        return Dnf::bottom();
      case K::Atom:
        return dnf_atom(f.term(), f.rel());
      case K::And: {
        // cheapest first keeps intermediate products small
        std::vector<Dnf> parts;
        for (const auto& k : f.children()) {
          parts.push_back(run(k));
          if (parts.back().is_false()) return Dnf::bottom();
        }
        std::stable_sort(parts.begin(), parts.end(), [](const Dnf& a, const Dnf& b) {
          return a.conjs.size() < b.conjs.size();
        });
        Dnf acc = Dnf::top();
        for (const auto& p : parts) {
          acc = dnf_and(acc, p);
          if (acc.is_false()) break;
        }
        return acc;
      }
      case K::Or: {
        std::vector<Conj> all;
        for (const auto& k : f.children()) {
          Dnf d = run(k);
          if (d.is_true()) return Dnf::top();
          all.insert(all.end(), d.conjs.begin(), d.conjs.end());
        }
        return dnf_simplify(std::move(all));
      }
      case K::Not:
        return dnf_not(run(f.body()));
      case K::Exists:
      case K::Forall: {
        K k = f.kind();
        std::vector<std::string> vars;
        const LinFormula* cur = &f;
        while (cur->kind() == k) {
          vars.push_back(cur->bound_var());
          cur = &cur->body();
        }
        Dnf body = run(*cur);
        if (k == K::Exists) return eliminate_block(std::move(body), vars);
        return dnf_not(eliminate_block(dnf_not(body), vars));
      }
    }
    return Dnf::bottom();
  }

  std::unordered_map<const LinFormula::Node*, Dnf> memo_;
};

}  // namespace

Dnf to_dnf(const LinFormula& f) { return Eliminator().run(f); }

}  // namespace detail

LinFormula eliminate_exists(const std::string& var, const LinFormula& body) {
  if (!body.is_quantifier_free())
    throw DomainError("eliminate_exists needs a quantifier-free body");
  return detail::from_dnf(detail::dnf_exists(detail::to_dnf(body), var));
}

LinFormula eliminate_quantifiers(const LinFormula& f) { return detail::from_dnf(detail::to_dnf(f)); }

bool decide_sentence(const LinFormula& f) {
  auto fv = f.free_vars();
  if (!fv.empty()) throw DomainError("sentence has free variable '" + *fv.begin() + "'");
  Dnf d = detail::to_dnf(f);
  return d.is_true();
}

SemilinearSet solution_set_1d(const LinFormula& f, const std::string& var) {
  for (const auto& v : f.free_vars())
    if (v != var) throw DomainError("formula has free variable '" + v + "' besides '" + var + "'");
  Dnf d = detail::to_dnf(f);
  return detail::set_of_dnf(d, var);
}

}  // namespace deftop
