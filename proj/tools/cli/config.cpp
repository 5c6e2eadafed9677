#include "config.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "hlmax/error.hpp"

namespace hlmax::cli {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void config_error(const std::string& field, const std::string& msg) {
  fail(ErrorCode::Config, "config: " + field + ": " + msg);
}

std::string where(const toml::node& n) {
  const auto& src = n.source();
  return src.begin.line ? " (line " + std::to_string(src.begin.line) + ")" : "";
}

// A TOML table that remembers which keys were consumed, so that typos are
// reported instead of silently ignored.
class Section {
 public:
  Section(const toml::table* t, std::string path) : t_(t), path_(std::move(path)) {}

  bool present() const { return t_ != nullptr; }
  bool has(const std::string& key) const { return t_ && t_->contains(key); }

  const toml::node* node(const std::string& key) {
    known_.insert(key);
    return t_ ? t_->get(key) : nullptr;
  }

  double number(const std::string& key, double def) {
    const toml::node* n = node(key);
    if (!n) return def;
    auto v = n->value<double>();
    if (!v || !std::isfinite(*v)) config_error(name(key), "expected a finite number" + where(*n));
    return *v;
  }
  double positive(const std::string& key, double def) {
    const double v = number(key, def);
    if (!(v > 0.0)) config_error(name(key), "must be positive");
    return v;
  }
  std::int64_t integer(const std::string& key, std::int64_t def, std::int64_t lo, std::int64_t hi) {
    const toml::node* n = node(key);
    if (!n) return def;
    auto v = n->value_exact<std::int64_t>();
    if (!v) config_error(name(key), "expected an integer" + where(*n));
    if (*v < lo || *v > hi)
      config_error(name(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]" + where(*n));
    return *v;
  }
  bool boolean(const std::string& key, bool def) {
    const toml::node* n = node(key);
    if (!n) return def;
    auto v = n->value_exact<bool>();
    if (!v) config_error(name(key), "expected true or false" + where(*n));
    return *v;
  }
  std::string string(const std::string& key, const std::string& def) {
    const toml::node* n = node(key);
    if (!n) return def;
    auto v = n->value_exact<std::string>();
    if (!v) config_error(name(key), "expected a string" + where(*n));
    return *v;
  }
  std::vector<double> numbers(const std::string& key, const std::vector<double>& def) {
    const toml::node* n = node(key);
    if (!n) return def;
    const toml::array* a = n->as_array();
    if (!a) config_error(name(key), "expected an array of numbers" + where(*n));
    std::vector<double> out;
    for (const auto& e : *a) {
      auto v = e.value<double>();
      if (!v || !std::isfinite(*v)) config_error(name(key), "expected an array of numbers" + where(e));
      out.push_back(*v);
    }
    return out;
  }
  std::vector<int> integers(const std::string& key, const std::vector<int>& def) {
    const toml::node* n = node(key);
    if (!n) return def;
    const toml::array* a = n->as_array();
    if (!a) config_error(name(key), "expected an array of integers" + where(*n));
    std::vector<int> out;
    for (const auto& e : *a) {
      auto v = e.value_exact<std::int64_t>();
      if (!v) config_error(name(key), "expected an array of integers" + where(e));
      out.push_back(static_cast<int>(*v));
    }
    return out;
  }
  Section table(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return {nullptr, name(key)};
    if (!n->is_table()) config_error(name(key), "expected a table" + where(*n));
    return {n->as_table(), name(key)};
  }
  std::vector<Section> tables(const std::string& key) {
    const toml::node* n = node(key);
    std::vector<Section> out;
    if (!n) return out;
    const toml::array* a = n->as_array();
    if (!a) config_error(name(key), "expected an array of tables" + where(*n));
    for (std::size_t i = 0; i < a->size(); ++i) {
      const toml::node& e = *a->get(i);
      if (!e.is_table()) config_error(name(key), "expected an array of tables" + where(e));
      out.emplace_back(e.as_table(), name(key) + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  void finish() const {
    if (!t_) return;
    for (const auto& [k, v] : *t_)
      if (!known_.count(std::string(k.str()))) config_error(name(std::string(k.str())), "unknown key" + where(v));
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const toml::table* t_;
  std::string path_;
  std::set<std::string> known_;
};

Json record_vec(const Vec& v) { return vec_to_json(v); }

}  // namespace

ExperimentConfig load_config(const Invocation& inv) {
  ExperimentConfig c;
  c.subcommand = inv.subcommand;
  if (std::find(kSubcommands.begin(), kSubcommands.end(), c.subcommand) == kSubcommands.end())
    config_error("subcommand", "unknown subcommand '" + c.subcommand + "'");

  toml::table doc;
  fs::path base_dir = fs::current_path();
  if (!inv.config_path.empty()) {
    if (!fs::exists(inv.config_path)) config_error("--config", "file '" + inv.config_path + "' does not exist");
    try {
      doc = toml::parse_file(inv.config_path);
    } catch (const toml::parse_error& e) {
      fail(ErrorCode::Parse, "config: " + inv.config_path + ": " + std::string(e.description()) + " (line " +
                                 std::to_string(e.source().begin.line) + ")");
    }
    base_dir = fs::absolute(inv.config_path).parent_path();
  }
  Section root(&doc, "");
  auto resolve_path = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (base_dir / p).string(); };

  // Paths from flags are relative to the working directory, paths from the file to the file.
  c.body_path = inv.body_path;
  const std::string body_from_file = root.string("body", "");
  if (c.body_path.empty() && !body_from_file.empty()) c.body_path = resolve_path(body_from_file);
  c.out_dir = !inv.out_dir.empty() ? inv.out_dir : root.string("out", "out");
  if (inv.out_dir.empty() && root.has("out")) c.out_dir = resolve_path(c.out_dir);
  c.seed = inv.seed ? *inv.seed : static_cast<std::uint64_t>(root.integer("seed", 1, 0, INT64_MAX));
  c.threads = inv.threads ? *inv.threads : static_cast<int>(root.integer("threads", 0, 0, 4096));
  if (c.threads < 0) config_error("--threads", "must be nonnegative");
  c.method = parse_method(root.string("method", "auto"));
  const bool iso_default = c.subcommand == "certify" || c.subcommand == "rotate-scan" || c.subcommand == "quartic-probe";
  c.isotropize = root.boolean("isotropize", iso_default);

  const bool needs_body = c.subcommand != "cover";
  if (needs_body || !c.body_path.empty()) {
    if (c.body_path.empty()) config_error("body", "no body given (use --body or body = \"...\")");
    if (!fs::exists(c.body_path)) config_error("body", "file '" + c.body_path + "' does not exist");
    c.body = load_body(c.body_path);
  }
  const int d = c.body.dim();
  if ((c.subcommand == "certify" || c.subcommand == "rotate-scan" || c.subcommand == "quartic-probe") && d != 3)
    config_error("body", c.subcommand + " needs a body in dimension 3");

  Section grid = root.table("grid");
  if (grid.present()) {
    c.have_grid = true;
    if (grid.has("origin") || grid.has("shape")) {
      const auto origin = grid.numbers("origin", {});
      const auto shape = grid.integers("shape", {});
      if (static_cast<int>(origin.size()) != d) config_error("grid.origin", "needs one entry per body dimension");
      if (static_cast<int>(shape.size()) != d) config_error("grid.shape", "needs one entry per body dimension");
      c.grid.dim = d;
      c.grid.origin = Eigen::Map<const Vec>(origin.data(), d);
      c.grid.spacing = grid.positive("spacing", 0.0);
      c.grid.shape = shape;
    } else {
      const double lo = grid.number("lo", -4.0), hi = grid.number("hi", 4.0);
      if (!(hi > lo)) config_error("grid", "needs lo < hi");
      int n = 0;
      if (grid.has("spacing")) {
        if (grid.has("n")) config_error("grid", "give either n or spacing, not both");
        n = static_cast<int>(std::llround((hi - lo) / grid.positive("spacing", 1.0)));
      } else {
        n = static_cast<int>(grid.integer("n", 129, 2, 1 << 24));
      }
      c.grid = Grid{d, Vec::Constant(d, lo), (hi - lo) / n, std::vector<int>(d, n)};
    }
    try {
      c.grid.validate();
    } catch (const Error& e) {
      config_error("grid", e.what());
    }
  } else {
    c.grid = Grid::cube(d, -4.0, 4.0, d == 3 ? 65 : d == 2 ? 257 : 4097);
  }
  grid.finish();

  Section lad = root.table("ladder");
  c.ladder = DilationLadder::for_grid(c.grid, lad.number("ratio", 1.05));
  c.ladder.lambda_min = lad.number("lambda_min", c.ladder.lambda_min);
  c.ladder.lambda_max = lad.number("lambda_max", c.ladder.lambda_max);
  lad.finish();

  Section fld = root.table("field");
  c.field.kind = fld.string("kind", "indicator");
  if (c.field.kind != "indicator" && c.field.kind != "tent" && c.field.kind != "two_bump" && c.field.kind != "constant")
    config_error("field.kind", "must be indicator, tent, two_bump or constant");
  c.field.scale = fld.positive("scale", 1.0);
  c.field.offset = fld.number("offset", 2.0);
  c.field.second_height = fld.number("second_height", 0.5);
  c.field.value = fld.number("value", 1.0);
  if (c.field.value < 0.0 || c.field.second_height < 0.0) config_error("field", "values must be nonnegative");
  fld.finish();

  auto read_point = [&](Section& s) {
    std::vector<double> def(d, 0.0);
    if (d > 0) def[0] = 3.0;
    const auto p = s.numbers("point", def);
    if (static_cast<int>(p.size()) != d) config_error(s.name("point"), "needs one entry per body dimension");
    return Vec(Eigen::Map<const Vec>(p.data(), d));
  };
  c.point = Vec::Zero(d);
  if (d > 0) c.point(0) = 3.0;

  Section cert = root.table("certify");
  if (c.subcommand == "certify") {
    c.order = static_cast<int>(cert.integer("order", 4, 4, 6));
    if (c.order % 2) config_error("certify.order", "must be 4 or 6");
    c.point = read_point(cert);
  } else if (cert.present()) {
    cert.integer("order", 4, 4, 6);
    read_point(cert);
  }
  cert.finish();

  Section mom = root.table("moments");
  c.orders = mom.integers("orders", {2, 4});
  for (int o : c.orders)
    if (o != 2 && o != 4 && o != 6) config_error("moments.orders", "orders must be 2, 4 or 6");
  mom.finish();

  Section rot = root.table("rotate");
  c.rotations = static_cast<std::size_t>(rot.integer("count", 512, 1, 1 << 20));
  const int rot_order = static_cast<int>(rot.integer("order", 4, 4, 6));
  const Vec rot_point = read_point(rot);
  if (c.subcommand == "rotate-scan") {
    c.order = rot_order;
    c.point = rot_point;
  }
  rot.finish();

  Section gr = root.table("growth");
  c.p = gr.numbers("p", {2.0});
  for (double p : c.p)
    if (!(p > 1.0)) config_error("growth.p", "every p must exceed 1");
  if (c.p.empty()) config_error("growth.p", "needs at least one exponent");
  gr.finish();

  Section it = root.table("iterate");
  c.n_max = static_cast<int>(it.integer("n_max", 200, 0, 100000));
  c.stop_tol = it.number("stop_tol", 1e-4);
  if (c.stop_tol < 0.0) config_error("iterate.stop_tol", "must be nonnegative");
  for (auto& ps : it.tables("probes")) {
    ProbeSpec p;
    p.type = ps.string("type", "");
    if (p.type == "annulus") {
      p.inner = ps.number("inner", 0.0);
      p.outer = ps.positive("outer", 1.0);
      if (p.inner < 0.0 || p.inner >= p.outer) config_error(ps.name("inner"), "needs 0 <= inner < outer");
    } else if (p.type == "body") {
      p.scale = ps.positive("scale", 1.0);
    } else {
      config_error(ps.name("type"), "must be annulus or body");
    }
    ps.finish();
    c.probes.push_back(p);
  }
  Section env = it.table("envelope");
  if (env.present()) {
    EnvelopeSpec e;
    e.inner = env.positive("inner", e.inner);
    e.outer = env.positive("outer", e.outer);
    e.factor = env.positive("factor", e.factor);
    if (e.inner >= e.outer) config_error("iterate.envelope", "needs inner < outer");
    if (d < 3) config_error("iterate.envelope", "the |x|^(2-d) envelope needs d = 3");
    c.envelope = e;
  }
  env.finish();
  it.finish();

  Section ls = root.table("levelset");
  c.mu = ls.numbers("mu", {});
  for (double m : c.mu)
    if (!(m > 0.0)) config_error("levelset.mu", "every level must be positive");
  c.delta = ls.number("delta", 0.05);
  if (!(c.delta > 0.0 && c.delta < 1.0)) config_error("levelset.delta", "must lie in (0, 1)");
  c.levelset_n = static_cast<int>(ls.integer("n", 1, 0, 10000));
  c.B = ls.number("B", 0.0);
  if (c.B < 0.0) config_error("levelset.B", "must be nonnegative (0: empirical)");
  ls.finish();

  Section cov = root.table("cover");
  const std::string cover_in = cov.string("input", "");
  if (!cover_in.empty()) c.cover_input = resolve_path(cover_in);
  c.cover_Lambda = cov.positive("Lambda", 1.0);
  c.probe_resolution = static_cast<int>(cov.integer("probe_resolution", 0, 0, 1 << 16));
  Section rnd = cov.table("random");
  if (rnd.present()) {
    RandomFamilySpec r;
    r.count = static_cast<std::size_t>(rnd.integer("count", 200, 1, 1 << 22));
    r.lo = rnd.number("lo", 0.0);
    r.hi = rnd.number("hi", 1.0);
    r.lambda_min = rnd.positive("lambda_min", r.lambda_min);
    r.lambda_max = rnd.positive("lambda_max", r.lambda_max);
    if (r.lo >= r.hi) config_error("cover.random", "needs lo < hi");
    if (r.lambda_min > r.lambda_max) config_error("cover.random", "needs lambda_min <= lambda_max");
    if (r.lambda_max >= c.cover_Lambda) config_error("cover.random.lambda_max", "must be below cover.Lambda");
    c.cover_random = r;
  }
  rnd.finish();
  cov.finish();
  if (c.subcommand == "cover") {
    if (c.cover_input.empty() == !c.cover_random) config_error("cover", "give exactly one of input or [cover.random]");
    if (c.cover_random && c.body_path.empty()) config_error("body", "a random family needs a body");
    if (!c.cover_input.empty() && !fs::exists(c.cover_input))
      config_error("cover.input", "file '" + c.cover_input + "' does not exist");
  }

  Section qp = root.table("quartic");
  c.lambdas = qp.numbers("lambdas", {0.4, 0.2, 0.1});
  c.nodes = static_cast<int>(qp.integer("nodes", 48, 2, 400));
  const Vec qpoint = read_point(qp);
  if (c.subcommand == "quartic-probe") c.point = qpoint;
  qp.finish();

  Section out = root.table("output");
  c.write_field = out.boolean("field", false);
  c.write_slices = out.boolean("slices", true);
  out.finish();
  root.finish();

  const bool grid_command = c.subcommand == "transform" || c.subcommand == "iterate" || c.subcommand == "growth" ||
                            c.subcommand == "levelset";
  if (grid_command) {
    try {
      c.ladder.validate(c.grid);
    } catch (const Error& e) {
      config_error("ladder", e.what());
    }
  }

  Json r;
  r["subcommand"] = c.subcommand;
  r["seed"] = c.seed;
  r["body"] = needs_body || !c.body_path.empty() ? body_to_json(c.body) : Json();
  r["isotropize"] = c.isotropize;
  if (grid_command) {
    r["grid"] = Json::parse(grid_json(c.grid));
    r["ladder"] = {{"lambda_min", c.ladder.lambda_min}, {"lambda_max", c.ladder.lambda_max}, {"ratio", c.ladder.ratio}};
    r["method"] = to_string(c.method);
    r["field"] = {{"kind", c.field.kind},
                  {"scale", c.field.scale},
                  {"offset", c.field.offset},
                  {"second_height", c.field.second_height},
                  {"value", c.field.value}};
  }
  if (c.subcommand == "certify" || c.subcommand == "rotate-scan") {
    r["order"] = c.order;
    r["point"] = record_vec(c.point);
  }
  if (c.subcommand == "rotate-scan") r["rotations"] = c.rotations;
  if (c.subcommand == "moments") r["orders"] = c.orders;
  if (c.subcommand == "growth" || c.subcommand == "transform") r["p"] = c.p;
  if (c.subcommand == "iterate") {
    r["n_max"] = c.n_max;
    r["stop_tol"] = c.stop_tol;
    Json probes = Json::array();
    for (const auto& p : c.probes)
      probes.push_back({{"type", p.type}, {"inner", p.inner}, {"outer", p.outer}, {"scale", p.scale}});
    r["probes"] = probes;
    if (c.envelope)
      r["envelope"] = {{"inner", c.envelope->inner}, {"outer", c.envelope->outer}, {"factor", c.envelope->factor}};
  }
  if (c.subcommand == "levelset") {
    r["mu"] = c.mu;
    r["delta"] = c.delta;
    r["n"] = c.levelset_n;
    r["B"] = c.B;
  }
  if (c.subcommand == "cover") {
    r["input"] = c.cover_input.empty() ? Json() : Json(fs::path(c.cover_input).filename().string());
    r["Lambda"] = c.cover_Lambda;
    r["probe_resolution"] = c.probe_resolution;
    if (c.cover_random)
      r["random"] = {{"count", c.cover_random->count},
                     {"lo", c.cover_random->lo},
                     {"hi", c.cover_random->hi},
                     {"lambda_min", c.cover_random->lambda_min},
                     {"lambda_max", c.cover_random->lambda_max}};
  }
  if (c.subcommand == "quartic-probe") {
    r["lambdas"] = c.lambdas;
    r["point"] = record_vec(c.point);
    r["nodes"] = c.nodes;
  }
  r["output"] = {{"field", c.write_field}, {"slices", c.write_slices}};
  c.resolved = std::move(r);
  return c;
}

}  // namespace hlmax::cli
