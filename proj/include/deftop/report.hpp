#pragma once

// JSON renderings shared by the command line tool and the Python module.
// Rationals are strings (`-3/4`), sets use SemilinearSet::str().

#include <json.hpp>

#include "deftop/embed.hpp"
#include "deftop/oracle.hpp"

namespace deftop {

using Json = nlohmann::ordered_json;

Json to_json(const ValidationReport& r);
Json to_json(const Verdict& v);
Json to_json(const ShadowMap& m);
Json to_json(const std::vector<Comparison>& cs);
Json to_json(const NormalizedSpec& n);
Json to_json(const Embedding& e);
Json to_json(const Certificate& c);
Json to_json(const OracleReport& r);
Json to_json(const Components& c);

}  // namespace deftop
