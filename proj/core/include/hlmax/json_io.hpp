#pragma once

#include <json.hpp>

#include <string>

#include "hlmax/body.hpp"
#include "hlmax/covering.hpp"
#include "hlmax/obstruction.hpp"

namespace hlmax {

using Json = nlohmann::ordered_json;

/// Body schema: {"type": ball|box|cross|vpolytope|linear_image, "dim", ...}.
/// Numbers may be given as JSON numbers or as decimal/fraction strings; strings
/// are read exactly, so rational data reaches the certificate path untouched.
Body body_from_json(const Json& j);
Json body_to_json(const Body& body);
Body load_body(const std::string& path);

Vec vec_from_json(const Json& j, const std::string& what);
Json vec_to_json(const Vec& v);

CoverInput cover_input_from_json(const Json& j);
Json cover_input_to_json(const CoverInput& input);
Json cover_report_to_json(const CoverReport& report);

Json certificate_to_json(const Certificate& c, const Body& body);

}  // namespace hlmax
