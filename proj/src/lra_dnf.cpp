#include "lra_dnf.hpp"

#include <algorithm>

#include "deftop/error.hpp"

namespace deftop::detail {

bool Bounds::implies(const Bounds& w) const {
  if (w.has_lo) {
    if (!has_lo) return false;
    if (lo < w.lo) return false;
    if (lo == w.lo && w.lo_strict && !lo_strict) return false;
  }
  if (w.has_hi) {
    if (!has_hi) return false;
    if (hi > w.hi) return false;
    if (hi == w.hi && w.hi_strict && !hi_strict) return false;
  }
  return true;
}

bool Bounds::operator<(const Bounds& o) const {
  if (has_lo != o.has_lo) return has_lo < o.has_lo;
  if (has_lo) {
    if (lo != o.lo) return lo < o.lo;
    if (lo_strict != o.lo_strict) return lo_strict < o.lo_strict;
  }
  if (has_hi != o.has_hi) return has_hi < o.has_hi;
  if (has_hi) {
    if (hi != o.hi) return hi < o.hi;
    if (hi_strict != o.hi_strict) return hi_strict < o.hi_strict;
  }
  return false;
}

LinTerm to_term(const LinPart& l) {
  LinTerm t;
  for (const auto& [name, c] : l) t += LinTerm::var(name, c);
  return t;
}

namespace {

// t = scale * (L + offset), L with leading coefficient 1
void normalize(const LinTerm& t, LinPart& l, Rational& scale, Rational& offset) {
  const auto& co = t.coefficients();
  scale = co.begin()->second;
  l.clear();
  l.reserve(co.size());
  for (const auto& [name, c] : co) {
    Rational q = c / scale;
    l.emplace_back(name, q);
  }
  offset = t.constant() / scale;
}

bool constant_holds(const Rational& v, Rel r) {
  switch (r) {
    case Rel::Lt:
      return v < 0;
    case Rel::Le:
      return v <= 0;
    case Rel::Eq:
      return v == 0;
  }
  return false;
}

}  // namespace

bool Conj::check(const Bounds& b) {
  if (b.has_lo && b.has_hi) {
    if (b.lo > b.hi || (b.lo == b.hi && (b.lo_strict || b.hi_strict))) ok_ = false;
  }
  return ok_;
}

bool Conj::add_lower(const LinPart& l, const Rational& v, bool strict) {
  if (!ok_) return false;
  Bounds& b = rows_[l];
  if (!b.has_lo || v > b.lo || (v == b.lo && strict && !b.lo_strict)) {
    b.has_lo = true;
    b.lo = v;
    b.lo_strict = strict;
  }
  return check(b);
}

bool Conj::add_upper(const LinPart& l, const Rational& v, bool strict) {
  if (!ok_) return false;
  Bounds& b = rows_[l];
  if (!b.has_hi || v < b.hi || (v == b.hi && strict && !b.hi_strict)) {
    b.has_hi = true;
    b.hi = v;
    b.hi_strict = strict;
  }
  return check(b);
}

bool Conj::add_row(const LinPart& l, const Bounds& b) {
  if (b.has_lo) add_lower(l, b.lo, b.lo_strict);
  if (b.has_hi) add_upper(l, b.hi, b.hi_strict);
  return ok_;
}

bool Conj::merge(const Conj& o) {
  if (!o.ok_) ok_ = false;
  for (const auto& [l, b] : o.rows_) {
    if (!ok_) break;
    add_row(l, b);
  }
  return ok_;
}

bool Conj::add_atom(const LinTerm& t, Rel r) {
  if (!ok_) return false;
  if (t.is_constant()) {
    if (!constant_holds(t.constant(), r)) ok_ = false;
    return ok_;
  }
  LinPart l;
  Rational scale, offset;
  normalize(t, l, scale, offset);
  Rational v = -offset;
  if (r == Rel::Eq) {
    add_lower(l, v, false);
    return add_upper(l, v, false);
  }
  bool strict = r == Rel::Lt;
  if (scale > 0) return add_upper(l, v, strict);
  return add_lower(l, v, strict);
}

std::set<std::string> Conj::vars() const {
  std::set<std::string> out;
  for (const auto& [l, b] : rows_)
    for (const auto& [name, c] : l) out.insert(name);
  return out;
}

bool Conj::mentions(const std::string& x) const {
  for (const auto& [l, b] : rows_)
    for (const auto& [name, c] : l)
      if (name == x) return true;
  return false;
}

bool Conj::eval(const Assignment& env) const {
  if (!ok_) return false;
  for (const auto& [l, b] : rows_) {
    Rational v = to_term(l).eval(env);
    if (b.has_lo && (v < b.lo || (v == b.lo && b.lo_strict))) return false;
    if (b.has_hi && (v > b.hi || (v == b.hi && b.hi_strict))) return false;
  }
  return true;
}

std::vector<std::pair<LinTerm, Rel>> Conj::atoms() const {
  std::vector<std::pair<LinTerm, Rel>> out;
  if (!ok_) {
    out.emplace_back(LinTerm(1), Rel::Lt);
    return out;
  }
  for (const auto& [l, b] : rows_) {
    LinTerm t = to_term(l);
    if (b.is_eq()) {
      out.emplace_back(t - LinTerm(b.lo), Rel::Eq);
      continue;
    }
    if (b.has_lo) out.emplace_back(LinTerm(b.lo) - t, b.lo_strict ? Rel::Lt : Rel::Le);
    if (b.has_hi) out.emplace_back(t - LinTerm(b.hi), b.hi_strict ? Rel::Lt : Rel::Le);
  }
  return out;
}

Dnf Dnf::top() {
  Dnf d;
  d.conjs.emplace_back();
  return d;
}

bool Dnf::is_true() const {
  for (const auto& c : conjs)
    if (c.ok() && c.rows().empty()) return true;
  return false;
}

std::set<std::string> Dnf::vars() const {
  std::set<std::string> out;
  for (const auto& c : conjs) {
    auto v = c.vars();
    out.insert(v.begin(), v.end());
  }
  return out;
}

bool Dnf::eval(const Assignment& env) const {
  for (const auto& c : conjs)
    if (c.eval(env)) return true;
  return false;
}

Conj project(const Conj& c, const std::string& x) {
  if (!c.ok()) return c;
  Conj out;
  std::vector<const std::pair<const LinPart, Bounds>*> with;
  for (const auto& row : c.rows()) {
    bool has = false;
    for (const auto& [name, k] : row.first)
      if (name == x) has = true;
    if (has)
      with.push_back(&row);
    else
      out.add_row(row.first, row.second);
  }
  if (with.empty()) return c;
  if (!out.ok()) return out;

  auto coef = [&](const LinPart& l) {
    for (const auto& [name, k] : l)
      if (name == x) return k;
    return Rational(0);
  };

  const std::pair<const LinPart, Bounds>* pivot = nullptr;
  for (auto* row : with) {
    if (row->second.is_eq() && (!pivot || row->first.size() < pivot->first.size())) pivot = row;
  }
  if (pivot) {
    Rational cx = coef(pivot->first);
    LinTerm rest = to_term(pivot->first) - LinTerm::var(x, cx);
    LinTerm sol = (LinTerm(pivot->second.lo) - rest) * (Rational(1) / cx);
    for (auto* row : with) {
      if (row == pivot) continue;
      LinTerm t = to_term(row->first).substitute(x, sol);
      const Bounds& b = row->second;
      if (b.is_eq()) {
        out.add_atom(t - LinTerm(b.lo), Rel::Eq);
      } else {
        if (b.has_lo) out.add_atom(LinTerm(b.lo) - t, b.lo_strict ? Rel::Lt : Rel::Le);
        if (b.has_hi) out.add_atom(t - LinTerm(b.hi), b.hi_strict ? Rel::Lt : Rel::Le);
      }
      if (!out.ok()) return out;
    }
    return out;
  }

  std::vector<std::pair<LinTerm, bool>> lowers, uppers;
  for (auto* row : with) {
    Rational cx = coef(row->first);
    LinTerm rest = to_term(row->first) - LinTerm::var(x, cx);
    Rational inv = Rational(1) / cx;
    const Bounds& b = row->second;
    if (b.has_lo) {
      LinTerm e = (LinTerm(b.lo) - rest) * inv;
      (cx > 0 ? lowers : uppers).emplace_back(e, b.lo_strict);
    }
    if (b.has_hi) {
      LinTerm e = (LinTerm(b.hi) - rest) * inv;
      (cx > 0 ? uppers : lowers).emplace_back(e, b.hi_strict);
    }
  }
  for (const auto& [e, s1] : lowers) {
    for (const auto& [f, s2] : uppers) {
      if (!out.add_atom(e - f, (s1 || s2) ? Rel::Lt : Rel::Le)) return out;
    }
  }
  return out;
}

bool satisfiable(const Conj& c) {
  if (!c.ok()) return false;
  Conj cur = c;
  for (;;) {
    if (!cur.ok()) return false;
    if (cur.rows().empty()) return true;
    // rows over pairwise disjoint variables are independently satisfiable
    std::map<std::string, int> seen;
    bool disjoint = true;
    for (const auto& [l, b] : cur.rows()) {
      for (const auto& [name, k] : l) {
        if (++seen[name] > 1) disjoint = false;
      }
    }
    if (disjoint) return true;
    // variable with the smallest Fourier–Motzkin product
    std::string best;
    long best_score = -1;
    for (const auto& [name, cnt] : seen) {
      long lo = 0, hi = 0;
      bool eq = false;
      for (const auto& [l, b] : cur.rows()) {
        for (const auto& [n2, k] : l) {
          if (n2 != name) continue;
          if (b.is_eq()) eq = true;
          bool pos = k > 0;
          if (b.has_lo) (pos ? lo : hi)++;
          if (b.has_hi) (pos ? hi : lo)++;
        }
      }
      long score = eq ? 0 : lo * hi - lo - hi;
      if (best.empty() || score < best_score) {
        best = name;
        best_score = score;
      }
    }
    cur = project(cur, best);
  }
}

namespace {

struct End {
  bool inf = true;
  bool closed = false;
  Rational v;
};

// union of two intervals when it is again an interval
bool interval_union(const Bounds& a, const Bounds& b, Bounds& out) {
  auto lo_of = [](const Bounds& x) { return End{!x.has_lo, x.has_lo && !x.lo_strict, x.lo}; };
  auto hi_of = [](const Bounds& x) { return End{!x.has_hi, x.has_hi && !x.hi_strict, x.hi}; };
  // lower-end comparison: true when p starts no later than q
  auto lo_le = [](const End& p, const End& q) {
    if (p.inf) return true;
    if (q.inf) return false;
    if (p.v != q.v) return p.v < q.v;
    return p.closed || !q.closed;
  };
  auto hi_ge = [](const End& p, const End& q) {
    if (p.inf) return true;
    if (q.inf) return false;
    if (p.v != q.v) return p.v > q.v;
    return p.closed || !q.closed;
  };
  const Bounds* first = lo_le(lo_of(a), lo_of(b)) ? &a : &b;
  const Bounds* second = first == &a ? &b : &a;
  End fh = hi_of(*first);
  End sl = lo_of(*second);
  bool touches = fh.inf || sl.inf || sl.v < fh.v || (sl.v == fh.v && (sl.closed || fh.closed));
  if (!touches) return false;
  End lo = lo_of(*first);
  End hi = hi_ge(hi_of(a), hi_of(b)) ? hi_of(a) : hi_of(b);
  out = Bounds{};
  out.has_lo = !lo.inf;
  out.lo = lo.v;
  out.lo_strict = !lo.closed;
  out.has_hi = !hi.inf;
  out.hi = hi.v;
  out.hi_strict = !hi.closed;
  return true;
}

// c ⊆ d as syntactic row-wise implication
bool conj_implies(const Conj& c, const Conj& d) {
  const auto& cr = c.rows();
  for (const auto& [l, b] : d.rows()) {
    auto it = cr.find(l);
    if (it == cr.end() || !it->second.implies(b)) return false;
  }
  return true;
}

// merges two conjuncts differing in one row into one, if possible
bool try_merge(const Conj& a, const Conj& b, Conj& out) {
  const auto& ar = a.rows();
  const auto& br = b.rows();
  if (ar.size() != br.size()) return false;
  const LinPart* diff = nullptr;
  auto ia = ar.begin();
  auto ib = br.begin();
  for (; ia != ar.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    const Bounds& x = ia->second;
    const Bounds& y = ib->second;
    bool same = x.has_lo == y.has_lo && x.has_hi == y.has_hi &&
                (!x.has_lo || (x.lo == y.lo && x.lo_strict == y.lo_strict)) &&
                (!x.has_hi || (x.hi == y.hi && x.hi_strict == y.hi_strict));
    if (same) continue;
    if (diff) return false;
    diff = &ia->first;
  }
  if (!diff) return false;
  Bounds u;
  if (!interval_union(ar.at(*diff), br.at(*diff), u)) return false;
  out = a;
  if (!u.has_lo && !u.has_hi)
    out.mutable_rows().erase(*diff);
  else
    out.mutable_rows()[*diff] = u;
  return true;
}

}  // namespace

Dnf dnf_of_set(const std::string& var, const SemilinearSet& s) {
  Dnf d;
  LinPart l{{var, Rational(1)}};
  const auto& cs = s.components();
  std::size_t i = 0;
  while (i < cs.size()) {
    Conj c;
    const Component& k = cs[i];
    if (k.is_point()) {
      bool opens = i + 1 < cs.size() && !cs[i + 1].is_point() && !cs[i + 1].lo_inf &&
                   cs[i + 1].lo == k.lo;
      if (!opens) {
        c.add_lower(l, k.lo, false);
        c.add_upper(l, k.lo, false);
        d.conjs.push_back(c);
        ++i;
        continue;
      }
      ++i;
      const Component& iv = cs[i];
      c.add_lower(l, iv.lo, false);
      bool closes = i + 1 < cs.size() && cs[i + 1].is_point() && !iv.hi_inf && cs[i + 1].lo == iv.hi;
      if (!iv.hi_inf) c.add_upper(l, iv.hi, !closes);
      d.conjs.push_back(c);
      i += closes ? 2 : 1;
      continue;
    }
    bool closes = i + 1 < cs.size() && cs[i + 1].is_point() && !k.hi_inf && cs[i + 1].lo == k.hi;
    if (!k.lo_inf) c.add_lower(l, k.lo, true);
    if (!k.hi_inf) c.add_upper(l, k.hi, !closes);
    d.conjs.push_back(c);
    i += closes ? 2 : 1;
  }
  return d;
}

SemilinearSet set_of_dnf(const Dnf& d, const std::string& var) {
  std::vector<Component> cs;
  for (const auto& c : d.conjs) {
    if (!c.ok()) continue;
    if (c.rows().empty()) return SemilinearSet::line();
    if (c.rows().size() != 1) throw DomainError("conjunct is not over one variable");
    const auto& [l, b] = *c.rows().begin();
    if (l.size() != 1 || l[0].first != var || l[0].second != 1)
      throw DomainError("conjunct is not over variable " + var);
    if (b.is_eq()) {
      cs.push_back(Component::point(b.lo));
      continue;
    }
    Component k;
    k.kind = Component::Kind::Interval;
    k.lo_inf = !b.has_lo;
    k.hi_inf = !b.has_hi;
    k.lo = b.lo;
    k.hi = b.hi;
    if (b.has_lo && b.has_hi && b.lo == b.hi) continue;  // empty, already caught by ok()
    cs.push_back(k);
    if (b.has_lo && !b.lo_strict) cs.push_back(Component::point(b.lo));
    if (b.has_hi && !b.hi_strict) cs.push_back(Component::point(b.hi));
  }
  return canonicalize(cs);
}

Dnf dnf_simplify(std::vector<Conj> cs) {
  std::vector<Conj> live;
  live.reserve(cs.size());
  for (auto& c : cs) {
    if (!c.ok()) continue;
    if (c.rows().empty()) return Dnf::top();
    if (satisfiable(c)) live.push_back(std::move(c));
  }
  Dnf d;
  d.conjs = std::move(live);
  auto vars = d.vars();
  if (vars.size() == 1) {
    const std::string& v = *vars.begin();
    return dnf_of_set(v, set_of_dnf(d, v));
  }
  std::sort(d.conjs.begin(), d.conjs.end());
  d.conjs.erase(std::unique(d.conjs.begin(), d.conjs.end()), d.conjs.end());
  bool changed = true;
  while (changed) {
    changed = false;
    // drop conjuncts contained in another
    std::vector<char> dead(d.conjs.size(), 0);
    for (std::size_t i = 0; i < d.conjs.size(); ++i) {
      if (dead[i]) continue;
      for (std::size_t j = 0; j < d.conjs.size(); ++j) {
        if (i == j || dead[j]) continue;
        if (conj_implies(d.conjs[j], d.conjs[i])) {
          dead[j] = 1;
          changed = true;
        }
      }
    }
    std::vector<Conj> kept;
    for (std::size_t i = 0; i < d.conjs.size(); ++i)
      if (!dead[i]) kept.push_back(std::move(d.conjs[i]));
    d.conjs = std::move(kept);
    // glue pairs that differ in one row
    for (std::size_t i = 0; i < d.conjs.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < d.conjs.size(); ++j) {
        Conj m;
        if (try_merge(d.conjs[i], d.conjs[j], m)) {
          if (m.rows().empty()) return Dnf::top();
          d.conjs[i] = std::move(m);
          d.conjs.erase(d.conjs.begin() + static_cast<long>(j));
          changed = true;
          break;
        }
      }
    }
  }
  return d;
}

Dnf dnf_atom(const LinTerm& t, Rel r) {
  Conj c;
  c.add_atom(t, r);
  if (!c.ok()) return Dnf::bottom();
  Dnf d;
  d.conjs.push_back(std::move(c));
  return d;
}

Dnf dnf_and(const Dnf& a, const Dnf& b) {
  if (a.is_false() || b.is_false()) return Dnf::bottom();
  if (a.is_true()) return b;
  if (b.is_true()) return a;
  std::vector<Conj> out;
  for (const auto& x : a.conjs) {
    for (const auto& y : b.conjs) {
      Conj c = x;
      if (c.merge(y) && satisfiable(c)) out.push_back(std::move(c));
    }
  }
  return dnf_simplify(std::move(out));
}

Dnf dnf_or(const Dnf& a, const Dnf& b) {
  if (a.is_true() || b.is_true()) return Dnf::top();
  std::vector<Conj> out = a.conjs;
  out.insert(out.end(), b.conjs.begin(), b.conjs.end());
  return dnf_simplify(std::move(out));
}

Dnf dnf_not(const Dnf& a) {
  if (a.is_false()) return Dnf::top();
  if (a.is_true()) return Dnf::bottom();
  std::vector<const Conj*> order;
  for (const auto& c : a.conjs) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(),
                   [](const Conj* x, const Conj* y) { return x->rows().size() < y->rows().size(); });
  std::vector<Conj> acc(1);
  for (const Conj* c : order) {
    std::vector<Conj> negs;
    for (const auto& [t, r] : c->atoms()) {
      if (r == Rel::Eq) {
        Conj p, q;
        p.add_atom(t, Rel::Lt);
        q.add_atom(-t, Rel::Lt);
        negs.push_back(p);
        negs.push_back(q);
      } else {
        Conj p;
        p.add_atom(-t, r == Rel::Lt ? Rel::Le : Rel::Lt);
        negs.push_back(p);
      }
    }
    std::vector<Conj> next;
    for (const auto& x : acc) {
      Conj meet = x;
      if (!meet.merge(*c) || !satisfiable(meet)) {
        next.push_back(x);  // already disjoint from c
        continue;
      }
      for (const auto& n : negs) {
        Conj y = x;
        if (y.merge(n) && satisfiable(y)) next.push_back(std::move(y));
      }
    }
    Dnf s = dnf_simplify(std::move(next));
    if (s.is_false()) return s;
    acc = std::move(s.conjs);
  }
  Dnf d;
  d.conjs = std::move(acc);
  return d;
}

Dnf dnf_exists(const Dnf& a, const std::string& x) {
  std::vector<Conj> out;
  out.reserve(a.conjs.size());
  for (const auto& c : a.conjs) {
    Conj p = project(c, x);
    if (p.ok()) out.push_back(std::move(p));
  }
  return dnf_simplify(std::move(out));
}

Dnf dnf_forall(const Dnf& a, const std::string& x) { return dnf_not(dnf_exists(dnf_not(a), x)); }

Dnf dnf_substitute(const Dnf& a, const std::string& x, const LinTerm& by) {
  std::vector<Conj> out;
  for (const auto& c : a.conjs) {
    Conj n;
    for (const auto& [t, r] : c.atoms()) {
      if (!n.add_atom(t.substitute(x, by), r)) break;
    }
    if (n.ok()) out.push_back(std::move(n));
  }
  return dnf_simplify(std::move(out));
}

Dnf dnf_rename(const Dnf& a, const std::map<std::string, std::string>& names) {
  Dnf d;
  for (const auto& c : a.conjs) {
    Conj n;
    for (const auto& [t, r] : c.atoms()) {
      if (!n.add_atom(t.rename(names), r)) break;
    }
    if (n.ok()) d.conjs.push_back(std::move(n));
  }
  return d;
}

}  // namespace deftop::detail
