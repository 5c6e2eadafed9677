#include "hlmax/json_io.hpp"

#include <charconv>
#include <cstdio>

#include "hlmax/error.hpp"
#include "hlmax/io.hpp"

namespace hlmax {
namespace {

[[noreturn]] void bad(const std::string& field, const std::string& msg) {
  fail(ErrorCode::Config, "body." + field + ": " + msg);
}

const Json& field(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(where.empty() ? key : where + "." + key, "missing");
  return *it;
}

Rational rational_of(const Json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const Error& e) {
      bad(where, e.what());
    }
  }
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number()) return rational_from_double(j.get<double>());
  bad(where, "expected a number or a numeric string");
}

std::vector<Rational> rational_list(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rational_of(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json exact_or_float(const Rational* exact, double value) {
  return exact ? Json(to_exact_string(*exact)) : Json(shortest(value));
}

Body parse_body(const Json& j, const std::string& where) {
  const std::string type = field(j, "type", where).is_string() ? j["type"].get<std::string>() : "";
  int dim = 0;
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer()) bad(where + ".dim", "expected an integer");
    dim = j["dim"].get<int>();
    if (dim < 1 || dim > kMaxDim) bad(where + ".dim", "must be 1, 2 or 3");
  }
  auto need_dim = [&] {
    if (dim == 0) bad(where + ".dim", "missing");
    return dim;
  };
  auto check_len = [&](std::size_t n, const std::string& f) {
    if (dim != 0 && static_cast<int>(n) != dim) bad(where + "." + f, "length does not match dim");
  };

  if (type == "ball") return Body::exact_ball(need_dim(), rational_of(field(j, "radius", where), where + ".radius"));
  if (type == "cross") return Body::exact_cross(need_dim(), rational_of(field(j, "scale", where), where + ".scale"));
  if (type == "box") {
    auto hw = rational_list(field(j, "half_widths", where), where + ".half_widths");
    check_len(hw.size(), "half_widths");
    return Body::exact_box(hw);
  }
  if (type == "vpolytope") {
    const Json& vs = field(j, "vertices", where);
    if (!vs.is_array() || vs.empty()) bad(where + ".vertices", "expected a nonempty array");
    std::vector<std::vector<Rational>> verts;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      verts.push_back(rational_list(vs[i], where + ".vertices[" + std::to_string(i) + "]"));
      check_len(verts.back().size(), "vertices[" + std::to_string(i) + "]");
    }
    return Body::exact_polytope(verts);
  }
  if (type == "linear_image") {
    const Body base = parse_body(field(j, "base", where), where + ".base");
    const int d = base.dim();
    if (dim != 0 && dim != d) bad(where + ".dim", "does not match the base body");
    const Json& m = field(j, "matrix", where);
    if (!m.is_array() || static_cast<int>(m.size()) != d) bad(where + ".matrix", "expected a dim x dim array");
    std::vector<Rational> A;
    for (int r = 0; r < d; ++r) {
      auto row = rational_list(m[r], where + ".matrix[" + std::to_string(r) + "]");
      if (static_cast<int>(row.size()) != d) bad(where + ".matrix", "expected a dim x dim array");
      A.insert(A.end(), row.begin(), row.end());
    }
    LinearMapOptions opt;
    if (j.contains("max_condition")) opt.max_condition = j["max_condition"].get<double>();
    return linear_map_exact(base, A, opt);
  }
  bad(where.empty() ? "type" : where + ".type",
      "unknown body type '" + type + "' (ball, box, cross, vpolytope, linear_image)");
}

}  // namespace

Body body_from_json(const Json& j) { return parse_body(j, ""); }

Json body_to_json(const Body& body) {
  const ExactForm* ex = body.exact();
  const bool plain = ex && ex->scale == 1.0;
  Json j;
  j["type"] = "";
  j["dim"] = body.dim();
  if (const auto* b = body.as<Ball>()) {
    j["type"] = "ball";
    const auto* e = plain ? std::get_if<ExactBall>(&ex->shape) : nullptr;
    j["radius"] = exact_or_float(e ? &e->radius : nullptr, b->radius);
  } else if (const auto* b = body.as<AxisBox>()) {
    j["type"] = "box";
    const auto* e = plain ? std::get_if<ExactBox>(&ex->shape) : nullptr;
    Json hw = Json::array();
    for (int i = 0; i < body.dim(); ++i) hw.push_back(exact_or_float(e ? &e->half_widths[i] : nullptr, b->half_widths(i)));
    j["half_widths"] = hw;
  } else if (const auto* b = body.as<CrossPolytope>()) {
    j["type"] = "cross";
    const auto* e = plain ? std::get_if<ExactCross>(&ex->shape) : nullptr;
    j["scale"] = exact_or_float(e ? &e->scale : nullptr, b->scale);
  } else if (const auto* p = body.as<VPolytope>()) {
    j["type"] = "vpolytope";
    const auto* e = plain ? std::get_if<ExactPolytope>(&ex->shape) : nullptr;
    Json vs = Json::array();
    if (e && e->vertices.size() == p->vertices.size()) {
      for (const auto& v : e->vertices) {
        Json row = Json::array();
        for (const auto& c : v) row.push_back(to_exact_string(c));
        vs.push_back(row);
      }
    } else {
      for (const auto& v : p->vertices) {
        Json row = Json::array();
        for (int i = 0; i < body.dim(); ++i) row.push_back(shortest(v(i)));
        vs.push_back(row);
      }
    }
    j["vertices"] = vs;
  } else if (const auto* li = body.as<LinearImage>()) {
    j["type"] = "linear_image";
    Json m = Json::array();
    for (int r = 0; r < body.dim(); ++r) {
      Json row = Json::array();
      for (int c = 0; c < body.dim(); ++c) row.push_back(shortest(li->matrix(r, c)));
      m.push_back(row);
    }
    j["matrix"] = m;
    j["base"] = body_to_json(*li->base);
  }
  return j;
}

Body load_body(const std::string& path) {
  const std::string text = read_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::Parse, path + ": " + e.what());
  }
  try {
    return body_from_json(j);
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

Vec vec_from_json(const Json& j, const std::string& what) {
  require(j.is_array() && !j.empty(), ErrorCode::Config, what + ": expected a nonempty array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = to_double(rational_of(j[i], what));
  return v;
}

Json vec_to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

CoverInput cover_input_from_json(const Json& j) {
  require(j.is_object(), ErrorCode::Config, "cover input: expected an object");
  require(j.contains("body"), ErrorCode::Config, "cover input: body missing");
  CoverInput in{body_from_json(j["body"]), 1.0, {}};
  if (j.contains("Lambda")) in.Lambda = j["Lambda"].get<double>();
  require(j.contains("items") && j["items"].is_array(), ErrorCode::Config, "cover input: items must be an array");
  for (std::size_t i = 0; i < j["items"].size(); ++i) {
    const Json& it = j["items"][i];
    const std::string where = "items[" + std::to_string(i) + "]";
    require(it.contains("center") && it.contains("lambda"), ErrorCode::Config, where + ": needs center and lambda");
    in.items.push_back({vec_from_json(it["center"], where + ".center"), it["lambda"].get<double>()});
  }
  in.validate();
  return in;
}

Json cover_input_to_json(const CoverInput& input) {
  Json j;
  j["body"] = body_to_json(input.body);
  j["Lambda"] = input.Lambda;
  Json items = Json::array();
  for (const auto& it : input.items) items.push_back({{"center", vec_to_json(it.center)}, {"lambda", it.lambda}});
  j["items"] = items;
  return j;
}

Json cover_report_to_json(const CoverReport& r) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(r.input_fingerprint));
  Json covered = Json::array();
  for (auto c : r.covered) covered.push_back(c != 0);
  Json j;
  j["selected"] = r.selected;
  j["covered"] = covered;
  j["all_covered"] = r.all_covered();
  j["overlap_max"] = r.overlap_max;
  j["overlap_histogram"] = r.overlap_histogram;
  j["probe_points"] = r.probe_points;
  j["input_fingerprint"] = hex;
  return j;
}

Json certificate_to_json(const Certificate& c, const Body& body) {
  Json j;
  j["body"] = body_to_json(body);
  j["order"] = c.order;
  j["point"] = vec_to_json(c.point);
  j["Q"] = c.Q;
  j["is_obstructed"] = c.is_obstructed;
  j["arithmetic"] = c.arithmetic;
  if (c.exact_coefficient) {
    j["exact_coefficient"] = to_exact_string(*c.exact_coefficient);
    j["factor"] = c.factor;
    j["factor_note"] = c.factor_note;
  }
  return j;
}

}  // namespace hlmax
