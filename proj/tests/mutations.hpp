#pragma once

// Specs that differ from a valid one in a single bracket or endpoint, each
// breaking exactly one validation check.

#include <optional>
#include <string>
#include <vector>

namespace testing {

struct Mutation {
  std::string check;
  std::string what;
  std::string text;
  std::optional<std::pair<std::string, std::string>> witness;  // variable, value
};

inline const std::vector<Mutation>& mutations() {
  static const std::vector<Mutation> all = {
      {"partition", "a gap in the cover",
       "space { (0,2) } topology { on (0,1) at a: { (a - eps, a + eps) }; on (1,2) at a: { (a - eps, a + eps) }; }",
       std::make_pair("x", "1")},
      {"partition", "overlapping cells",
       "space { (0,2) } topology { on (0,3/2) at a: { (a - eps, a + eps) }; on (1,2) at a: { (a - eps, a + eps) }; }",
       std::nullopt},
      {"membership", "a closed bracket opened",
       "space { (0,1) } topology { on (0,1) at a: { (a, a + eps) }; }", std::nullopt},
      {"containment", "a piece shifted off X",
       "space { (0,1), {2} } topology { on (0,1) at a: { (a - eps, a + eps) }; on {2} at p: { {p}, (1 - eps, 1 + eps) }; }",
       std::make_pair("a", "2")},
      {"monotonicity", "a piece that grows as eps shrinks",
       "space { (0,2) } topology { on (0,1) at a: { (a - eps, a + eps), (3/2 + eps, 7/4) }; on {1} at p: { (p - eps, p + eps) }; "
       "on (1,2) at a: { (a - eps, a + eps) }; }",
       std::nullopt},
      {"openness", "a neighborhood holding points that drag a far ray",
       "space { (0,1) } topology { on (0,1/2) at a: { (a - eps, a + eps), (3/4, 3/4 + eps) }; "
       "on {1/2} at p: { (p - eps, p] }; on (1/2,1) at a: { (a - eps, a + eps) }; }",
       std::make_pair("a", "1/2")},
  };
  return all;
}

}  // namespace testing
