#pragma once

#include <optional>
#include <string>
#include <vector>

#include "deftop/decide.hpp"

namespace deftop {

struct Point3 {
  Rational x, y, z;

  bool operator==(const Point3& o) const { return x == o.x && y == o.y && z == o.z; }
  std::string str() const;
};

/// X with every point of H = F ∪ G ∪ A moved past the right end of X. F is
/// the set of isolated cells and breakpoints of the shadow analysis.
struct NormalizedSpec {
  TopologySpec spec;            // validated
  std::vector<Rational> h;      // in X, sorted
  std::vector<Rational> h_image;
  std::vector<std::pair<Rational, Rational>> intervals;  // open 1-cells, kept in place

  Rational forward(const Rational& x) const;
  Rational inverse(const Rational& y) const;
};

struct Anchor {
  Rational h;  // the point of X
  Point3 at;
};

struct Curve {
  Rational q, r;  // the open interval (q, r) of X it parametrizes
  /// (t, vertex) with t from q to r; the curve is open at both ends
  std::vector<std::pair<Rational, Point3>> vertices;
  std::optional<std::size_t> left_anchor;
  std::optional<std::size_t> right_anchor;

  bool loop() const { return left_anchor && right_anchor && *left_anchor == *right_anchor; }
  Point3 at(const Rational& t) const;
};

struct Embedding {
  std::vector<Anchor> anchors;
  std::vector<Curve> curves;
  Rational sigma;  // anchor spacing

  Point3 image(const Rational& x) const;
  /// the point of X mapped to p, if any
  std::optional<Rational> preimage(const Point3& p) const;
  std::size_t attachments(std::size_t anchor) const;
};

struct CertificateEntry {
  Rational a;
  Rational eps;   // the neighborhood parameter; for direction (ii) the found eps'
  Rational gamma; // the ball radius
  int direction;  // 1 or 2
  bool ok;
};

struct Certificate {
  bool ok = true;
  std::vector<CertificateEntry> entries;
  /// first failing check, if any
  std::optional<CertificateEntry> failure;
};

NormalizedSpec normalize_isolate(const TopologySpec& spec, const ExceptionalSets& exceptional);
NormalizedSpec normalize_isolate(const Decider& d);

/// Gluings are read off the transported templates and must cover every ray
/// of `rays`.
Embedding build_embedding(const NormalizedSpec& n, const RayReport& rays);

/// Sampled points a: every point of H and seven points per interval.
/// Each entry decides the existence of gamma (direction i) or eps'
/// (direction ii) exactly.
Certificate verify_embedding(const TopologySpec& spec, const Embedding& emb, int schedule_depth = 12);

/// The same embedding with one glued end of a curve let go; used as a
/// control that verification catches a broken gluing.
Embedding detach_end(const Embedding& emb, std::size_t curve, bool left_end);

/// normalize, build and verify in one go; DomainError when not affinizable
struct EmbedResult {
  NormalizedSpec normalized;
  Embedding embedding;
  Certificate certificate;
};
EmbedResult embed(const Decider& d, int schedule_depth = 12);

}  // namespace deftop
