#include "deftop/geom.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <stdexcept>

#include "deftop/error.hpp"

namespace deftop {

Component Component::point(const Rational& q) { return {Kind::Point, q, q, false, false}; }

Component Component::interval(const Rational& lo, const Rational& hi) {
  return {Kind::Interval, lo, hi, false, false};
}

Component Component::ray_above(const Rational& lo) { return {Kind::Interval, lo, 0, false, true}; }

Component Component::ray_below(const Rational& hi) { return {Kind::Interval, 0, hi, true, false}; }

Component Component::line() { return {Kind::Interval, 0, 0, true, true}; }

bool Component::contains(const Rational& q) const {
  if (kind == Kind::Point) return q == lo;
  return (lo_inf || lo < q) && (hi_inf || q < hi);
}

bool Component::operator==(const Component& o) const {
  if (kind != o.kind || lo_inf != o.lo_inf || hi_inf != o.hi_inf) return false;
  if (kind == Kind::Point) return lo == o.lo;
  return (lo_inf || lo == o.lo) && (hi_inf || hi == o.hi);
}

namespace {

// Rebuilds a canonical component list from a membership predicate that is
// constant on every elementary region cut out by `coords`.
std::vector<Component> from_regions(const std::vector<Rational>& coords,
                                    const std::function<bool(const Rational&)>& member) {
  const std::size_t n = coords.size();
  std::vector<Component> out;
  if (n == 0) {
    if (member(Rational(0))) out.push_back(Component::line());
    return out;
  }
  // region 2i is the open gap left of coords[i] (i == n: right of the last),
  // region 2i+1 is the point coords[i]
  const std::size_t regions = 2 * n + 1;
  std::vector<char> in(regions, 0);
  for (std::size_t r = 0; r < regions; ++r) {
    Rational rep;
    if (r % 2 == 1) {
      rep = coords[r / 2];
    } else {
      std::size_t i = r / 2;
      if (i == 0)
        rep = coords[0] - 1;
      else if (i == n)
        rep = coords[n - 1] + 1;
      else
        rep = midpoint(coords[i - 1], coords[i]);
    }
    in[r] = member(rep) ? 1 : 0;
  }
  std::size_t r = 0;
  while (r < regions) {
    if (!in[r]) {
      ++r;
      continue;
    }
    std::size_t first = r;
    while (r + 1 < regions && in[r + 1]) ++r;
    std::size_t last = r;
    ++r;
    if (first == last && first % 2 == 1) {
      out.push_back(Component::point(coords[first / 2]));
      continue;
    }
    if (first % 2 == 1) out.push_back(Component::point(coords[first / 2]));
    std::size_t open_first = first % 2 == 0 ? first : first + 1;
    std::size_t open_last = last % 2 == 0 ? last : last - 1;
    Component c;
    c.kind = Component::Kind::Interval;
    std::size_t i0 = open_first / 2;
    std::size_t i1 = open_last / 2;
    if (i0 == 0)
      c.lo_inf = true;
    else
      c.lo = coords[i0 - 1];
    if (i1 == n)
      c.hi_inf = true;
    else
      c.hi = coords[i1];
    out.push_back(c);
    if (last % 2 == 1 && last != first) out.push_back(Component::point(coords[last / 2]));
  }
  return out;
}

void collect_coords(const std::vector<Component>& cs, std::vector<Rational>& into) {
  for (const auto& c : cs) {
    if (c.is_point()) {
      into.push_back(c.lo);
    } else {
      if (!c.lo_inf) into.push_back(c.lo);
      if (!c.hi_inf) into.push_back(c.hi);
    }
  }
}

void sort_unique(std::vector<Rational>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool any_contains(const std::vector<Component>& cs, const Rational& q) {
  for (const auto& c : cs)
    if (c.contains(q)) return true;
  return false;
}

}  // namespace

SemilinearSet canonicalize(const std::vector<Component>& raw) {
  for (const auto& c : raw) {
    if (!c.is_point() && !c.lo_inf && !c.hi_inf && !(c.lo < c.hi))
      throw DomainError("interval (" + to_string(c.lo) + "," + to_string(c.hi) +
                        ") has lo >= hi");
  }
  std::vector<Rational> coords;
  collect_coords(raw, coords);
  sort_unique(coords);
  SemilinearSet s;
  s.comps_ = from_regions(coords, [&](const Rational& q) { return any_contains(raw, q); });
  return s;
}

SemilinearSet combine(SetOp op, const SemilinearSet& a, const SemilinearSet& b) {
  std::vector<Rational> coords;
  collect_coords(a.components(), coords);
  collect_coords(b.components(), coords);
  sort_unique(coords);
  std::vector<Component> out = from_regions(coords, [&](const Rational& q) {
    bool in_a = a.contains(q);
    bool in_b = b.contains(q);
    switch (op) {
      case SetOp::Union:
        return in_a || in_b;
      case SetOp::Intersection:
        return in_a && in_b;
      case SetOp::Difference:
        return in_a && !in_b;
    }
    return false;
  });
  return canonicalize(out);
}

SemilinearSet SemilinearSet::point(const Rational& q) { return canonicalize({Component::point(q)}); }

SemilinearSet SemilinearSet::points(const std::vector<Rational>& qs) {
  std::vector<Component> cs;
  for (const auto& q : qs) cs.push_back(Component::point(q));
  return canonicalize(cs);
}

SemilinearSet SemilinearSet::open(const Rational& lo, const Rational& hi) {
  return canonicalize({Component::interval(lo, hi)});
}

SemilinearSet SemilinearSet::closed(const Rational& lo, const Rational& hi) {
  return interval(lo, hi, true, true);
}

SemilinearSet SemilinearSet::interval(const Rational& lo, const Rational& hi, bool left_closed,
                                      bool right_closed) {
  std::vector<Component> cs;
  if (lo < hi) cs.push_back(Component::interval(lo, hi));
  if (lo <= hi) {
    if (left_closed) cs.push_back(Component::point(lo));
    if (right_closed) cs.push_back(Component::point(hi));
  }
  return canonicalize(cs);
}

SemilinearSet SemilinearSet::line() { return canonicalize({Component::line()}); }

bool SemilinearSet::contains(const Rational& q) const {
  // binary search would do, but sets stay small
  for (const auto& c : comps_) {
    if (c.contains(q)) return true;
  }
  return false;
}

bool SemilinearSet::bounded() const {
  for (const auto& c : comps_)
    if (c.lo_inf || c.hi_inf) return false;
  return true;
}

bool SemilinearSet::finite() const {
  for (const auto& c : comps_)
    if (!c.is_point()) return false;
  return true;
}

bool SemilinearSet::is_subset_of(const SemilinearSet& other) const {
  return subset_of(*this, other);
}

std::vector<Rational> SemilinearSet::coordinates() const {
  std::vector<Rational> v;
  collect_coords(comps_, v);
  sort_unique(v);
  return v;
}

std::vector<Rational> SemilinearSet::as_points() const {
  if (!finite()) throw DomainError("set " + str() + " is not finite");
  std::vector<Rational> v;
  for (const auto& c : comps_) v.push_back(c.lo);
  return v;
}

Rational SemilinearSet::min_coordinate() const {
  if (comps_.empty() || (comps_.front().lo_inf && !comps_.front().is_point()))
    throw DomainError("set has no least coordinate");
  return comps_.front().lo;
}

Rational SemilinearSet::max_coordinate() const {
  if (comps_.empty()) throw DomainError("set has no greatest coordinate");
  const auto& c = comps_.back();
  if (c.is_point()) return c.lo;
  if (c.hi_inf) throw DomainError("set has no greatest coordinate");
  return c.hi;
}

std::string SemilinearSet::str() const {
  if (comps_.empty()) return "∅";
  std::string out;
  auto sep = [&] {
    if (!out.empty()) out += " ∪ ";
  };
  std::size_t i = 0;
  while (i < comps_.size()) {
    const Component& c = comps_[i];
    if (c.is_point()) {
      bool opens_interval = i + 1 < comps_.size() && !comps_[i + 1].is_point() &&
                            !comps_[i + 1].lo_inf && comps_[i + 1].lo == c.lo;
      if (!opens_interval) {
        sep();
        out += "{" + to_string(c.lo) + "}";
        ++i;
        continue;
      }
      ++i;
      const Component& iv = comps_[i];
      bool closes = i + 1 < comps_.size() && comps_[i + 1].is_point() && !iv.hi_inf &&
                    comps_[i + 1].lo == iv.hi;
      sep();
      out += "[" + to_string(iv.lo) + "," + (iv.hi_inf ? "+inf" : to_string(iv.hi)) +
             (closes ? "]" : ")");
      i += closes ? 2 : 1;
      continue;
    }
    bool closes = i + 1 < comps_.size() && comps_[i + 1].is_point() && !c.hi_inf &&
                  comps_[i + 1].lo == c.hi;
    sep();
    out += "(" + (c.lo_inf ? std::string("-inf") : to_string(c.lo)) + "," +
           (c.hi_inf ? std::string("+inf") : to_string(c.hi)) + (closes ? "]" : ")");
    i += closes ? 2 : 1;
  }
  return out;
}

namespace {

class SetReader {
 public:
  explicit SetReader(std::string_view t) : t_(t) {}

  SemilinearSet read() {
    skip();
    std::vector<Component> cs;
    if (eat("∅")) {
      skip();
      if (pos_ != t_.size()) fail("trailing text");
      return {};
    }
    for (;;) {
      read_item(cs);
      skip();
      if (pos_ == t_.size()) break;
      if (!eat("∪") && !eat("U")) fail("expected union sign");
      skip();
    }
    return canonicalize(cs);
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw ParseError(what, 1, pos_ + 1);
  }

  void skip() {
    while (pos_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[pos_]))) ++pos_;
  }

  bool eat(std::string_view s) {
    if (t_.substr(pos_, s.size()) == s) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  // returns false with `inf` set when an infinite end was read
  Rational read_end(int& inf) {
    skip();
    inf = 0;
    if (eat("-inf")) {
      inf = -1;
      return 0;
    }
    if (eat("+inf") || eat("inf")) {
      inf = 1;
      return 0;
    }
    return read_rat();
  }

  Rational read_rat() {
    skip();
    std::size_t start = pos_;
    if (pos_ < t_.size() && (t_[pos_] == '-' || t_[pos_] == '+')) ++pos_;
    while (pos_ < t_.size() && (std::isdigit(static_cast<unsigned char>(t_[pos_])) || t_[pos_] == '/'))
      ++pos_;
    try {
      return parse_rational(t_.substr(start, pos_ - start));
    } catch (const std::invalid_argument&) {
      pos_ = start;
      fail("expected rational");
    }
  }

  void read_item(std::vector<Component>& cs) {
    if (eat("{")) {
      for (;;) {
        cs.push_back(Component::point(read_rat()));
        skip();
        if (eat("}")) return;
        if (!eat(",")) fail("expected ',' or '}'");
      }
    }
    bool lc;
    if (eat("("))
      lc = false;
    else if (eat("["))
      lc = true;
    else
      fail("expected '(', '[' or '{'");
    int lo_inf, hi_inf;
    Rational lo = read_end(lo_inf);
    skip();
    if (!eat(",")) fail("expected ','");
    Rational hi = read_end(hi_inf);
    skip();
    bool rc;
    if (eat(")"))
      rc = false;
    else if (eat("]"))
      rc = true;
    else
      fail("expected ')' or ']'");
    if (lo_inf == 1 || hi_inf == -1 || (lo_inf && lc) || (hi_inf && rc)) fail("bad infinite end");
    Component c;
    c.kind = Component::Kind::Interval;
    c.lo = lo;
    c.hi = hi;
    c.lo_inf = lo_inf != 0;
    c.hi_inf = hi_inf != 0;
    if (!c.lo_inf && !c.hi_inf && lo >= hi) {
      if (lo == hi && lc && rc) {
        cs.push_back(Component::point(lo));
        return;
      }
      fail("empty interval");
    }
    cs.push_back(c);
    if (lc) cs.push_back(Component::point(lo));
    if (rc) cs.push_back(Component::point(hi));
  }

  std::string_view t_;
  std::size_t pos_ = 0;
};

}  // namespace

SemilinearSet SemilinearSet::parse(std::string_view text) { return SetReader(text).read(); }

SemilinearSet affine_closure(const SemilinearSet& a) {
  if (!a.bounded()) throw DomainError("affine closure of unbounded set " + a.str());
  std::vector<Component> cs = a.components();
  for (const auto& c : a.components()) {
    if (!c.is_point()) {
      cs.push_back(Component::point(c.lo));
      cs.push_back(Component::point(c.hi));
    }
  }
  return canonicalize(cs);
}

SemilinearSet affine_interior(const SemilinearSet& a) {
  std::vector<Component> cs;
  for (const auto& c : a.components())
    if (!c.is_point()) cs.push_back(c);
  return canonicalize(cs);
}

bool subset_of(const SemilinearSet& a, const SemilinearSet& b) { return (a - b).empty(); }

namespace {

Rational floor_q(const Rational& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(f);
}

// simplest rational in the open interval (lo, hi); hi_inf for +infinity
Rational simplest_open(const Rational& lo, const Rational& hi, bool hi_inf) {
  Rational fl = floor_q(lo);
  if (hi_inf || fl + 1 < hi) return fl + 1;
  Rational l = lo - fl;
  Rational h = hi - fl;
  // both in [0,1], no integer strictly between
  if (l == 0) return fl + 1 / simplest_open(1 / h, 0, true);
  return fl + 1 / simplest_open(1 / h, 1 / l, false);
}

}  // namespace

Rational simplest_between(const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) throw DomainError("simplest_between needs lo < hi");
  if (lo < 0 && 0 < hi) return 0;
  if (hi <= 0) return -simplest_open(-hi, -lo, false);
  return simplest_open(lo, hi, false);
}

Rational sample_point(const SemilinearSet& s) {
  if (s.empty()) throw DomainError("sample_point of empty set");
  const Component& c = s.components().front();
  if (c.is_point()) return c.lo;
  if (c.lo_inf && c.hi_inf) return 0;
  if (c.lo_inf) return floor_q(c.hi) - (floor_q(c.hi) == c.hi ? 1 : 0);
  if (c.hi_inf) return floor_q(c.lo) + 1;
  return simplest_between(c.lo, c.hi);
}

std::string AffineExpr::str(const std::string& a_name, const std::string& eps_name) const {
  std::string out;
  auto term = [&](const Rational& k, const std::string& name) {
    if (k == 0) return;
    Rational mag = abs(k);
    if (out.empty()) {
      if (k < 0) out += "-";
    } else {
      out += k < 0 ? " - " : " + ";
    }
    if (name.empty()) {
      out += to_string(mag);
    } else {
      if (mag != 1) out += to_string(mag) + "*";
      out += name;
    }
  };
  term(coef_a, a_name);
  term(coef_eps, eps_name);
  term(constant, "");
  return out.empty() ? "0" : out;
}

IntervalPiece IntervalPiece::interval(const AffineExpr& lo, const AffineExpr& hi, bool left_closed,
                                      bool right_closed) {
  return {Kind::Interval, lo, hi, left_closed, right_closed};
}

IntervalPiece IntervalPiece::singleton(const AffineExpr& at) {
  return {Kind::Singleton, at, at, true, true};
}

bool IntervalPiece::operator==(const IntervalPiece& o) const {
  if (kind != o.kind) return false;
  if (kind == Kind::Singleton) return lo == o.lo;
  return lo == o.lo && hi == o.hi && left_closed == o.left_closed && right_closed == o.right_closed;
}

std::string IntervalPiece::str(const std::string& a_name) const {
  if (is_singleton()) return "{" + lo.str(a_name) + "}";
  return std::string(left_closed ? "[" : "(") + lo.str(a_name) + ", " + hi.str(a_name) +
         (right_closed ? "]" : ")");
}

SemilinearSet eval_template(const std::vector<IntervalPiece>& pieces, const Rational& a,
                            const Rational& eps) {
  std::vector<Component> cs;
  for (const auto& p : pieces) {
    if (p.is_singleton()) {
      cs.push_back(Component::point(p.at().eval(a, eps)));
      continue;
    }
    Rational lo = p.lo.eval(a, eps);
    Rational hi = p.hi.eval(a, eps);
    if (!(lo < hi))
      throw DomainError("piece " + p.str() + " degenerates at a=" + to_string(a) +
                        ", eps=" + to_string(eps));
    cs.push_back(Component::interval(lo, hi));
    if (p.left_closed) cs.push_back(Component::point(lo));
    if (p.right_closed) cs.push_back(Component::point(hi));
  }
  return canonicalize(cs);
}

}  // namespace deftop
