#pragma once

#include <string>

#include "deftop/dsl.hpp"

namespace testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(DEFTOP_FIXTURES) + "/" + name + ".top";
}

inline deftop::TopologySpec fixture(const std::string& name) {
  return deftop::load_spec_file(fixture_path(name));
}

inline deftop::Rational q(const char* s) { return deftop::parse_rational(s); }

inline deftop::SemilinearSet S(const char* s) { return deftop::SemilinearSet::parse(s); }

}  // namespace testing
