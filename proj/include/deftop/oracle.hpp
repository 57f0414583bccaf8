#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "deftop/decide.hpp"

namespace deftop {

/// Points of X used by the brute-force checks: cell boundaries in X,
/// breakpoints, and the uniform 2^-resolution grid; eps runs over
/// 2^-1 ... 2^-depth.
struct SampleGrid {
  std::vector<Rational> points;
  std::vector<Rational> schedule;
  int resolution = 8;

  static SampleGrid build(const ShadowAnalysis& sa, int resolution, int depth);
};

struct Discrepancy {
  std::string check;     // closure, shadows, components
  std::string location;
  std::string symbolic;
  std::string sampled;
};

struct ClosureComparison {
  std::vector<Rational> adherent;  // grid points every scheduled neighborhood of which meets Z
  SemilinearSet symbolic;
  std::vector<Discrepancy> discrepancies;
};

struct ShadowComparison {
  SemilinearSet sampled;
  SemilinearSet symbolic;
  std::vector<Discrepancy> discrepancies;
};

struct ComponentComparison {
  /// grid points grouped by connectivity at resolution, in order
  std::vector<std::vector<Rational>> groups;
  bool symbolic_finite = false;
  std::size_t symbolic_count = 0;
  std::vector<Discrepancy> discrepancies;
};

/// Marks p adherent when N(p,eps) meets Z for every scheduled eps valid at
/// p. Only a point the symbolic closure contains but some scheduled
/// neighborhood misses counts as a discrepancy.
ClosureComparison brute_closure(const ShadowAnalysis& sa, const SemilinearSet& z,
                                const SampleGrid& grid);
/// Endpoint limits extrapolated from the two smallest valid scheduled eps.
ShadowComparison brute_shadows(const ShadowAnalysis& sa, const Rational& p,
                               const std::vector<Rational>& schedule);
/// Grid points and the gaps between them are joined when one adheres to the
/// other at the smallest valid eps; the groups must refine the symbolic
/// components.
ComponentComparison brute_components(const Decider& d, const SampleGrid& grid);

struct OracleOptions {
  int resolution = 8;
  int depth = 12;
  std::uint64_t seed = 0;
  int closure_trials = 4;
  int shadow_stride = 8;  // compare shadows at every n-th grid point and at all cell boundaries
};

struct OracleReport {
  int resolution = 8;
  std::vector<Rational> schedule;
  std::map<std::string, std::size_t> checks;  // check name -> comparisons made
  std::vector<Discrepancy> discrepancies;

  bool ok() const { return discrepancies.empty(); }
};

/// Closure on random subsets, shadows, and (for Hausdorff input) components.
OracleReport run_oracle(const Decider& d, const OracleOptions& opts = {});

/// A random subset of X: a few intervals and points with small-denominator
/// ends, intersected with X.
SemilinearSet random_subset(const SemilinearSet& space, std::mt19937_64& rng);

struct RandomSpecOptions {
  int max_cells = 4;
  int max_pieces = 3;
  bool require_valid = true;  // otherwise the first parseable draw is returned
  bool hausdorff_only = true;
  int max_attempts = 200;
};

/// Source text of a random spec that validates (and is Hausdorff when asked).
std::string random_spec_text(std::mt19937_64& rng, const RandomSpecOptions& opts = {});
TopologySpec random_spec(std::mt19937_64& rng, const RandomSpecOptions& opts = {});

}  // namespace deftop
