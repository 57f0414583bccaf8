#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "deftop/shadow.hpp"

namespace deftop {

struct SeparationWitness {
  Rational p;
  Rational q;
};

struct HausdorffResult {
  bool hausdorff = true;
  std::optional<SeparationWitness> witness;
};

struct RegularityWitness {
  Rational a;
  Rational eps;
  /// (delta, x) with x in cl(N(a,delta)) but not in N(a,eps), one per
  /// scheduled delta that is valid at a
  std::vector<std::pair<Rational, Rational>> refutation;
};

struct RegularityResult {
  bool regular = true;
  std::optional<RegularityWitness> witness;
};

/// Left: the ray (end, end+g) sits at the left end of its host interval;
/// Right: the ray (end-g, end).
enum class RaySide { Left, Right };

struct Ray {
  Rational point;  // whose neighborhoods contain the ray
  Rational end;    // the shadow the ray abuts
  RaySide side = RaySide::Left;
  std::size_t host_cell = 0;

  std::string str() const;  // `(0,·)` or `(·,4)`
};

struct RayReport {
  std::vector<Ray> rays;
  std::vector<Ray> rays_of(const Rational& a) const;
};

struct ExceptionalSets {
  SemilinearSet E;  // not B_x ⪯ B_x^af
  SemilinearSet A;  // not B_x ∼ B_x^af
  std::optional<SemilinearSet> G;  // E when E is finite
};

struct ClopenWitness {
  SemilinearSet Z;
  std::size_t cell = 0;
  bool is_open = false;
  bool closure_equals_z = false;

  bool certified() const { return is_open && closure_equals_z; }
};

/// An open interval of X all of whose points have small neighborhoods
/// meeting it in {a}, (a',a] or [a,a''), so every subset with two points is
/// disconnected.
struct DisconnectedInterval {
  Rational lo;
  Rational hi;
  PointClass cls = PointClass::LocallyIsolated;
  bool verified = false;
};

struct Components {
  bool finite = false;
  std::vector<SemilinearSet> parts;  // when finite, in order of position
  /// per part: tau_closure(C) = C and tau_closure(X \ C) = X \ C
  std::vector<bool> certified;
  std::vector<DisconnectedInterval> intervals;  // when not finite
  std::optional<ClopenWitness> clopen;
};

struct Conditions {
  bool c3 = false;
  bool c4 = false;
  bool regular_and_finite_components = false;
  /// finitely many locally isolated points, finitely many points with half
  /// closed bases, and finitely many components
  bool isolated_halfclosed_components = false;
};

struct Verdict {
  HausdorffResult hausdorff;
  /// The rest is filled only for Hausdorff input.
  std::optional<RegularityResult> regular;
  std::optional<ExceptionalSets> exceptional;
  RayReport rays;
  bool affinizable = false;
  Conditions conditions;
  std::optional<Components> components;
};

struct DecideOptions {
  int schedule_depth = 12;  // delta = 2^-1 ... 2^-depth for witness confirmation
};

namespace detail {
class DecideEngine;
}

/// Shares formulas and shadow data between the decision procedures.
class Decider {
 public:
  explicit Decider(const TopologySpec& spec, DecideOptions opts = {});
  ~Decider();
  Decider(Decider&&) noexcept;
  Decider& operator=(Decider&&) noexcept;

  const TopologySpec& spec() const;
  const ShadowAnalysis& shadows() const;

  HausdorffResult hausdorff() const;
  /// DomainError on non-Hausdorff input.
  RegularityResult regularity() const;
  ExceptionalSets exceptional() const;
  RayReport rays() const;
  /// rays at the shadows of any point of X
  std::vector<Ray> rays_at(const Rational& a) const;
  /// the independent check of condition (4) with G the finite part of E
  bool condition4() const;
  Components components() const;
  std::optional<ClopenWitness> clopen_witness(std::size_t cell) const;
  /// Everything but components unless `with_components`.
  Verdict verdict(bool with_components = true) const;

 private:
  std::unique_ptr<detail::DecideEngine> e_;
};

HausdorffResult check_hausdorff(const TopologySpec& spec);
RegularityResult check_regularity(const TopologySpec& spec);
std::pair<ExceptionalSets, RayReport> exceptional_sets(const TopologySpec& spec);
Verdict decide_affinizable(const TopologySpec& spec);
Components components(const TopologySpec& spec);
std::optional<ClopenWitness> clopen_witness(const TopologySpec& spec, std::size_t cell);
/// Full verdict including components.
Verdict analyze(const TopologySpec& spec, DecideOptions opts = {});

}  // namespace deftop
