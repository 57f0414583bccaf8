#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deftop/geom.hpp"
#include "deftop/lra.hpp"

namespace deftop {

struct Cell {
  enum class Kind { IsolPoint, OpenCell };

  Kind kind = Kind::OpenCell;
  Rational lo;  // the point for IsolPoint
  Rational hi;
  std::string var;

  static Cell isol(const Rational& q, std::string var);
  static Cell open(const Rational& lo, const Rational& hi, std::string var);

  bool is_point() const { return kind == Kind::IsolPoint; }
  const Rational& point() const { return lo; }
  bool contains(const Rational& q) const;
  Rational midpoint() const;
  SemilinearSet as_set() const;
  /// `(0,1)` or `{2}`
  std::string str() const;

  bool operator==(const Cell& o) const {
    return kind == o.kind && lo == o.lo && hi == o.hi && var == o.var;
  }
};

/// Neighborhood family of one cell. Templates of isolated cells never
/// mention the cell variable: it is replaced by the point while parsing.
struct NbhdTemplate {
  std::vector<IntervalPiece> pieces;
  std::size_t owner = 0;

  bool operator==(const NbhdTemplate& o) const { return pieces == o.pieces && owner == o.owner; }
};

struct TopologySpec {
  SemilinearSet space;
  std::vector<Cell> cells;
  std::vector<NbhdTemplate> templates;  // templates[i] belongs to cells[i]
  /// Per cell, the valid (a, eps) pairs as a formula in the free
  /// variables `a` and `eps`. Filled in by validate().
  std::vector<LinFormula> eps_domain;
  bool validated = false;

  /// Index of the cell holding q; DomainError when q is outside X.
  std::size_t cell_of(const Rational& q) const;
  std::size_t max_pieces() const;
  /// Endpoints of open cells and isolated points, sorted.
  std::vector<Rational> cell_boundaries() const;
  SemilinearSet neighborhood(const Rational& a, const Rational& eps) const;

  bool structurally_equal(const TopologySpec& o) const {
    return space == o.space && cells == o.cells && templates == o.templates;
  }
};

struct ValidationFailure {
  std::string check;  // partition, membership, containment, monotonicity, openness, boundedness
  Assignment witness;
  std::string detail;
};

struct ValidationReport {
  bool ok = false;
  std::vector<ValidationFailure> failures;
  /// The validated spec (with eps_domain) when ok.
  std::optional<TopologySpec> spec;

  const ValidationFailure* failure(const std::string& check) const;
};

TopologySpec parse_spec(std::string_view text);
ValidationReport validate(const TopologySpec& spec);
std::string emit(const TopologySpec& spec);

/// parse_spec followed by validate; throws DomainError listing the failures.
TopologySpec load_spec(std::string_view text);
TopologySpec load_spec_file(const std::string& path);
void require_validated(const TopologySpec& spec);

}  // namespace deftop
