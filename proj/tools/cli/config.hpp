#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hlmax/body.hpp"
#include "hlmax/field.hpp"
#include "hlmax/json_io.hpp"
#include "hlmax/kernel.hpp"
#include "hlmax/maxop.hpp"

namespace hlmax::cli {

inline const std::vector<std::string> kSubcommands = {"normalize", "moments", "certify", "rotate-scan", "transform",
                                                      "iterate",   "growth",  "levelset", "cover",      "quartic-probe"};

/// What the command line supplied; flags override the TOML file.
struct Invocation {
  std::string subcommand;
  std::string config_path;
  std::string body_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

struct FieldSpec {
  std::string kind = "indicator";  // indicator | tent | two_bump | constant
  double scale = 1.0;
  double offset = 2.0;
  double second_height = 0.5;
  double value = 1.0;
};

struct ProbeSpec {
  std::string type;  // annulus | body
  double inner = 0.0;
  double outer = 0.0;
  double scale = 1.0;
};

struct EnvelopeSpec {
  double inner = 1.2;
  double outer = 2.5;
  double factor = 0.95;
};

struct RandomFamilySpec {
  std::size_t count = 200;
  double lo = 0.0;
  double hi = 1.0;
  double lambda_min = 0.02;
  double lambda_max = 0.2;
};

struct ExperimentConfig {
  std::string subcommand;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 0;

  std::string body_path;
  Body body = Body::ball(1, 1.0);
  bool isotropize = false;

  Grid grid;
  bool have_grid = false;
  DilationLadder ladder;
  ConvolutionMethod method = ConvolutionMethod::Auto;
  FieldSpec field;

  int order = 4;
  std::vector<int> orders = {2, 4};
  Vec point;
  std::size_t rotations = 512;
  std::vector<double> p = {2.0};

  int n_max = 200;
  double stop_tol = 1e-4;
  std::vector<ProbeSpec> probes;
  std::optional<EnvelopeSpec> envelope;

  std::vector<double> mu;
  double delta = 0.05;
  int levelset_n = 1;
  double B = 0.0;

  std::string cover_input;
  std::optional<RandomFamilySpec> cover_random;
  double cover_Lambda = 1.0;
  int probe_resolution = 0;

  std::vector<double> lambdas = {0.4, 0.2, 0.1};
  int nodes = 48;

  bool write_field = false;
  bool write_slices = true;

  /// Canonical record of every resolved setting; hashed into the manifest.
  Json resolved;
};

/// Parses and validates everything a run needs before any output is written.
/// Throws hlmax::Error with code Config (or Parse) and a field-level message.
ExperimentConfig load_config(const Invocation& inv);

}  // namespace hlmax::cli
