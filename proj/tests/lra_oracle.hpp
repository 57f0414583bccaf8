#pragma once

// Random linear formulas and an exact decision of one existential
// quantifier, used to check the eliminator.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "deftop/lra.hpp"

namespace testing {

using deftop::Assignment;
using deftop::LinFormula;
using deftop::LinTerm;
using deftop::Rational;
using deftop::Rel;
using deftop::rat;

struct FormulaGen {
  std::mt19937 rng;
  explicit FormulaGen(unsigned seed) : rng(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  Rational small_rational() { return rat(uniform(-12, 12), uniform(1, 4)); }

  LinTerm term(const std::vector<std::string>& vars) {
    LinTerm t(rat(uniform(-6, 6), uniform(1, 3)));
    bool any = false;
    for (const auto& v : vars) {
      if (uniform(0, 2) == 0) continue;
      int c = uniform(-3, 3);
      if (c == 0) continue;
      t += LinTerm::var(v, c);
      any = true;
    }
    if (!any) t += LinTerm::var(vars[static_cast<std::size_t>(uniform(0, static_cast<int>(vars.size()) - 1))], uniform(0, 1) ? 1 : -2);
    return t;
  }

  LinFormula qf(const std::vector<std::string>& vars, int max_atoms) {
    int n = uniform(1, max_atoms);
    std::vector<LinFormula> pool;
    for (int i = 0; i < n; ++i) {
      Rel r = static_cast<Rel>(uniform(0, 2));
      if (r == Rel::Eq && uniform(0, 2) != 0) r = Rel::Le;
      pool.push_back(LinFormula::atom(term(vars), r));
    }
    while (pool.size() > 1) {
      std::size_t i = static_cast<std::size_t>(uniform(0, static_cast<int>(pool.size()) - 1));
      LinFormula a = pool[i];
      pool.erase(pool.begin() + static_cast<long>(i));
      std::size_t j = static_cast<std::size_t>(uniform(0, static_cast<int>(pool.size()) - 1));
      LinFormula b = pool[j];
      pool.erase(pool.begin() + static_cast<long>(j));
      LinFormula c = uniform(0, 1) ? (a && b) : (a || b);
      if (uniform(0, 4) == 0) c = !c;
      pool.push_back(c);
    }
    return pool[0];
  }
};

// zero of every atom in `var` under env, as exact candidates
inline void roots(const LinFormula& f, const std::string& var, const Assignment& env,
           std::vector<Rational>& out) {
  if (f.kind() == LinFormula::Kind::Atom) {
    Rational c = f.term().coefficient(var);
    if (c == 0) return;
    LinTerm rest = f.term() - LinTerm::var(var, c);
    out.push_back(-rest.eval(env) / c);
    return;
  }
  for (const auto& k : f.children()) roots(k, var, env, out);
}

// exact decision of ∃var f for quantifier-free f: the truth value of f is
// constant between consecutive roots of its atoms
inline bool exists_oracle(const LinFormula& f, const std::string& var, Assignment env) {
  std::vector<Rational> rs;
  roots(f, var, env, rs);
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  std::vector<Rational> cand;
  if (rs.empty()) {
    cand.push_back(0);
  } else {
    cand.push_back(rs.front() - 1);
    cand.push_back(rs.back() + 1);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      cand.push_back(rs[i]);
      if (i + 1 < rs.size()) cand.push_back((rs[i] + rs[i + 1]) / 2);
    }
  }
  for (const auto& x : cand) {
    env[var] = x;
    if (f.eval(env)) return true;
  }
  return false;
}

}  // namespace testing
