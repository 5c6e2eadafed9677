#include <charconv>
#include <cmath>
#include <random>

#include "cli.hpp"
#include "hlmax/covering.hpp"
#include "hlmax/error.hpp"
#include "hlmax/experiments.hpp"
#include "hlmax/io.hpp"
#include "hlmax/moments.hpp"
#include "hlmax/obstruction.hpp"

namespace hlmax::cli {
namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string alpha_key(const Exponents& a) {
  std::string s = "[";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? " " : "") + std::to_string(a[i]);
  return s + "]";
}

Body prepared_body(const ExperimentConfig& c) { return c.isotropize ? isotropize(c.body).body : c.body; }

ScalarField initial_field(const ExperimentConfig& c) {
  const FieldSpec& f = c.field;
  if (f.kind == "tent") return tent(c.grid, c.body, f.scale);
  if (f.kind == "two_bump") return two_bump(c.grid, c.body, f.scale, f.offset, f.second_height);
  if (f.kind == "constant") return ScalarField(c.grid, f.value);
  return indicator(c.grid, c.body, f.scale);
}

MaxOptions max_options(const ExperimentConfig& c) {
  MaxOptions o;
  o.method = c.method;
  o.threads = c.threads;
  return o;
}

void transformer_rows(Artifacts& a, const std::string& e, const MaxTransformer& T, const ExperimentConfig& c) {
  a.row(e, "dilations", static_cast<double>(T.dilations().size()));
  a.row(e, "discretization_bound", T.discretization_bound());
  a.row(e, "sup_gap_bound", c.ladder.sup_gap_bound(c.grid.dim));
  std::size_t counts[4] = {0, 0, 0, 0};
  for (auto m : T.methods()) ++counts[static_cast<int>(m)];
  for (auto m : {ConvolutionMethod::Direct, ConvolutionMethod::Fft, ConvolutionMethod::Separable})
    a.row(e, std::string("method_") + to_string(m), static_cast<double>(counts[static_cast<int>(m)]));
}

void field_outputs(Artifacts& a, const ExperimentConfig& c, const std::string& stem, const ScalarField& f) {
  if (c.write_slices) a.files.emplace_back(stem + "_slice.csv", slice_csv(f));
  if (c.write_field) {
    a.files.emplace_back(stem + ".bin", field_bytes(f));
    a.files.emplace_back(stem + ".json", grid_json(f.grid) + "\n");
  }
}

void normalize_cmd(const ExperimentConfig& c, Artifacts& a) {
  const Isotropized iso = isotropize(c.body);
  const int d = c.body.dim();
  a.row("normalize", "volume_before", volume(c.body));
  a.row("normalize", "volume_after", volume(iso.body));
  a.row("normalize", "defect_before", isotropy_defect(c.body));
  a.row("normalize", "defect_after", isotropy_defect(iso.body));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      a.row("normalize", "A[" + std::to_string(i) + " " + std::to_string(j) + "]", iso.normalizer(i, j));
  a.files.emplace_back("body_isotropic.json", body_to_json(iso.body).dump(2) + "\n");
}

void moments_cmd(const ExperimentConfig& c, Artifacts& a) {
  const Body body = prepared_body(c);
  Json tensors = Json::array();
  for (int order : c.orders) {
    const MomentTensor m = moment_tensor(body, order);
    const auto exact = exact_moment_tensor(body, order);
    Json comps = Json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
      a.row("moments", "order=" + std::to_string(order) + ";x^" + alpha_key(m.exponents()[i]), m[i]);
      Json comp = {{"alpha", m.exponents()[i]}, {"value", m[i]}};
      if (exact) comp["exact_coefficient"] = to_exact_string(exact->coefficients[i]);
      comps.push_back(comp);
    }
    Json t = {{"order", order}, {"components", comps}};
    if (exact) {
      t["factor"] = exact->factor;
      t["factor_note"] = exact->factor_note;
    }
    tensors.push_back(t);
  }
  const Json out = {{"body", body_to_json(body)}, {"isotropized", c.isotropize}, {"tensors", tensors}};
  a.files.emplace_back("moments.json", out.dump(2) + "\n");
}

void certify_cmd(const ExperimentConfig& c, Artifacts& a) {
  const Body body = prepared_body(c);
  const Certificate cert = certify(body, c.order, c.point);
  a.row("certify", "order", c.order);
  a.row("certify", "Q", cert.Q);
  a.row("certify", "is_obstructed", cert.is_obstructed ? "true" : "false");
  a.row("certify", "arithmetic", cert.arithmetic);
  if (cert.exact_coefficient) a.row("certify", "exact_coefficient", to_exact_string(*cert.exact_coefficient));
  a.files.emplace_back("certificate.json", certificate_to_json(cert, body).dump(2) + "\n");
}

void rotate_cmd(const ExperimentConfig& c, Artifacts& a) {
  const Body body = prepared_body(c);
  const auto rots = quasi_random_rotations(body.dim(), c.rotations, c.seed);
  const RotationScan scan = rotation_scan(body, c.order, rots, c.point);
  for (std::size_t i = 0; i < scan.values.size(); ++i) a.row("rotate-scan", "Q[" + std::to_string(i) + "]", scan.values[i]);
  a.row("rotate-scan", "count", static_cast<double>(scan.values.size()));
  a.row("rotate-scan", "mean", scan.mean);
  a.row("rotate-scan", "abs_mean", std::abs(scan.mean));
}

void transform_cmd(const ExperimentConfig& c, Artifacts& a) {
  const MaxTransformer T(c.grid, c.body, c.ladder, max_options(c));
  const ScalarField f = initial_field(c);
  const ScalarField g = T.apply(f);
  transformer_rows(a, "transform", T, c);
  a.row("transform", "max_f", f.max());
  a.row("transform", "max_Mf", g.max());
  a.row("transform", "min_Mf", g.min());
  for (double p : c.p) {
    const std::string k = "p=" + num(p) + ";";
    a.row("transform", k + "norm_f", lp_norm(f, p));
    a.row("transform", k + "norm_Mf", lp_norm(g, p));
  }
  field_outputs(a, c, "Mf", g);
}

Region probe_region(const ExperimentConfig& c, const ProbeSpec& p) {
  return p.type == "annulus" ? annulus_region(c.grid, p.inner, p.outer) : body_region(c.grid, c.body, p.scale);
}

void iterate_cmd(const ExperimentConfig& c, Artifacts& a) {
  const MaxTransformer T(c.grid, c.body, c.ladder, max_options(c));
  IterateOptions opts;
  opts.n_max = c.n_max;
  opts.stop_tol = c.stop_tol;
  for (const auto& p : c.probes) {
    opts.probes.push_back(probe_region(c, p));
    require(region_count(opts.probes.back()) > 0, ErrorCode::Config, "config: iterate.probes: a probe window is empty");
  }
  const IterationResult res = iterate(initial_field(c), T, opts);
  transformer_rows(a, "iterate", T, c);
  for (const auto& s : res.trace) {
    const std::string k = "step=" + std::to_string(s.step) + ";";
    a.row("iterate", k + "sup_change", s.sup_change);
    a.row("iterate", k + "monotone", s.monotone ? "true" : "false");
    for (std::size_t j = 0; j < s.probe_min.size(); ++j) {
      a.row("iterate", k + "probe" + std::to_string(j) + "_min", s.probe_min[j]);
      a.row("iterate", k + "probe" + std::to_string(j) + "_max", s.probe_max[j]);
    }
  }
  a.row("iterate", "steps", static_cast<double>(res.trace.size()));
  a.row("iterate", "monotone", res.monotone ? "true" : "false");
  a.row("iterate", "status", res.status);
  if (c.envelope) {
    const int d = c.grid.dim;
    const Region ann = annulus_region(c.grid, c.envelope->inner, c.envelope->outer);
    require(region_count(ann) > 0, ErrorCode::Config, "config: iterate.envelope: annulus contains no cells");
    const double factor = c.envelope->factor;
    const ScalarField h = sample(c.grid, [&](const Vec& x) {
      const double r = x.norm();
      return r >= c.envelope->inner ? factor * std::pow(r, 2.0 - d) : 0.0;
    });
    const DominanceReport dom = dominates(res.field, h, 0.0, &ann);
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ann.size(); ++i)
      if (ann[i]) ratio = std::min(ratio, res.field[i] * std::pow(c.grid.center(i).norm(), d - 2.0));
    a.row("iterate", "envelope_holds", dom.holds ? "true" : "false");
    a.row("iterate", "envelope_worst_margin", dom.worst_margin);
    a.row("iterate", "envelope_min_ratio", ratio);
  }
  a.status = res.status;
  field_outputs(a, c, "iterate", res.field);
}

void growth_cmd(const ExperimentConfig& c, Artifacts& a) {
  const MaxTransformer T(c.grid, c.body, c.ladder, max_options(c));
  const ScalarField f = initial_field(c);
  const ScalarField g = T.apply(f);
  transformer_rows(a, "growth", T, c);
  for (double p : c.p) {
    const double nf = lp_norm(f, p);
    require(nf > 0.0, ErrorCode::Config, "config: field: growth ratio of the zero field is undefined");
    const std::string k = "p=" + num(p) + ";";
    a.row("growth", k + "norm_f", nf);
    a.row("growth", k + "norm_Mf", lp_norm(g, p));
    a.row("growth", k + "ratio", lp_norm(g, p) / nf);
  }
}

void levelset_cmd(const ExperimentConfig& c, Artifacts& a) {
  const MaxTransformer T(c.grid, c.body, c.ladder, max_options(c));
  const ScalarField f = initial_field(c);
  std::vector<double> mus = c.mu;
  if (mus.empty())
    for (int k = 0; k < 10; ++k) mus.push_back(std::max(f.max(), 1e-300) * (k + 0.5) / 10.0);
  const auto rows = levelset_sweep(f, c.body, T, mus, c.delta, c.levelset_n, c.B);
  bool all = true;
  for (const auto& r : rows) {
    const std::string k = "mu=" + num(r.report.mu) + ";";
    a.row("levelset", k + "threshold", r.report.threshold);
    a.row("levelset", k + "lhs", r.report.lhs);
    a.row("levelset", k + "rhs", r.report.rhs);
    a.row("levelset", k + "slack", r.report.slack);
    a.row("levelset", k + "B", r.report.B);
    a.row("levelset", k + "holds", r.report.holds ? "true" : "false");
    a.row("levelset", k + "family_size", static_cast<double>(r.family_size));
    a.row("levelset", k + "selected", static_cast<double>(r.selected));
    a.row("levelset", k + "family_overlap", r.family_overlap);
    a.row("levelset", k + "union_measure", r.union_measure);
    all = all && r.report.holds;
  }
  a.row("levelset", "all_hold", all ? "true" : "false");
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void cover_cmd(const ExperimentConfig& c, Artifacts& a) {
  CoverInput in{c.body, c.cover_Lambda, {}};
  if (!c.cover_input.empty()) {
    Json j;
    try {
      j = Json::parse(read_file(c.cover_input));
    } catch (const Json::parse_error& e) {
      fail(ErrorCode::Parse, "cover.input: " + std::string(e.what()));
    }
    in = cover_input_from_json(j);
  } else {
    const RandomFamilySpec& r = *c.cover_random;
    std::mt19937_64 rng(c.seed);
    const int d = c.body.dim();
    for (std::size_t i = 0; i < r.count; ++i) {
      Vec x(d);
      for (int k = 0; k < d; ++k) x(k) = r.lo + (r.hi - r.lo) * unit(rng);
      in.items.push_back({x, r.lambda_min + (r.lambda_max - r.lambda_min) * unit(rng)});
    }
    a.files.emplace_back("cover_input.json", cover_input_to_json(in).dump(2) + "\n");
  }
  require(!in.items.empty(), ErrorCode::Config, "config: cover: the family is empty");
  CoverOptions opts;
  opts.probe_resolution = c.probe_resolution;
  const CoverReport rep = greedy_cover(in, opts);
  a.row("cover", "items", static_cast<double>(in.items.size()));
  a.row("cover", "selected", static_cast<double>(rep.selected.size()));
  a.row("cover", "all_covered", rep.all_covered() ? "true" : "false");
  a.row("cover", "overlap_max", rep.overlap_max);
  a.row("cover", "probe_points", static_cast<double>(rep.probe_points));
  for (std::size_t k = 0; k < rep.overlap_histogram.size(); ++k)
    a.row("cover", "histogram[" + std::to_string(k) + "]", static_cast<double>(rep.overlap_histogram[k]));
  a.files.emplace_back("cover_report.json", cover_report_to_json(rep).dump(2) + "\n");
}

void quartic_cmd(const ExperimentConfig& c, Artifacts& a) {
  const Body body = prepared_body(c);
  QuarticProbeOptions opts;
  opts.nodes = c.nodes;
  const QuarticProbeReport rep = quartic_probe(body, c.lambdas, c.point, opts);
  for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
    const std::string k = "lambda=" + num(rep.lambdas[i]) + ";";
    a.row("quartic-probe", k + "value", rep.values[i]);
    a.row("quartic-probe", k + "coarse_value", rep.coarse_values[i]);
  }
  for (std::size_t j = 1; j < rep.richardson.size(); ++j)
    for (std::size_t i = 0; i < rep.richardson[j].size(); ++i)
      a.row("quartic-probe", "richardson[" + std::to_string(j) + " " + std::to_string(i) + "]", rep.richardson[j][i]);
  a.row("quartic-probe", "extrapolated", rep.extrapolated);
  a.row("quartic-probe", "target", rep.target);
  a.row("quartic-probe", "relative_error", rep.relative_error);
  a.row("quartic-probe", "points", static_cast<double>(rep.points));
}

}  // namespace

void Artifacts::row(const std::string& experiment, const std::string& parameter, double value) {
  rows.push_back(experiment + "," + parameter + "," + num(value));
}

void Artifacts::row(const std::string& experiment, const std::string& parameter, const std::string& value) {
  rows.push_back(experiment + "," + parameter + "," + value);
}

std::string Artifacts::csv() const {
  std::string s = "experiment,parameter,value\n";
  for (const auto& r : rows) s += r + "\n";
  return s;
}

Artifacts execute(const ExperimentConfig& c) {
  Artifacts a;
  const std::string& s = c.subcommand;
  if (s == "normalize") normalize_cmd(c, a);
  else if (s == "moments") moments_cmd(c, a);
  else if (s == "certify") certify_cmd(c, a);
  else if (s == "rotate-scan") rotate_cmd(c, a);
  else if (s == "transform") transform_cmd(c, a);
  else if (s == "iterate") iterate_cmd(c, a);
  else if (s == "growth") growth_cmd(c, a);
  else if (s == "levelset") levelset_cmd(c, a);
  else if (s == "cover") cover_cmd(c, a);
  else if (s == "quartic-probe") quartic_cmd(c, a);
  else fail(ErrorCode::Config, "unknown subcommand '" + s + "'");
  return a;
}

}  // namespace hlmax::cli
