#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace hlmax::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// CSV rows (experiment, parameter, value) plus side artifacts, all held in
/// memory until the run has finished.
struct Artifacts {
  std::vector<std::string> rows;
  std::vector<std::pair<std::string, std::string>> files;  // name relative to out_dir, content
  std::string status = "ok";

  void row(const std::string& experiment, const std::string& parameter, double value);
  void row(const std::string& experiment, const std::string& parameter, const std::string& value);
  std::string csv() const;
};

/// Runs one experiment; throws hlmax::Error on failure.
Artifacts execute(const ExperimentConfig& config);

/// Resolves the configuration, runs it and writes the results; returns the exit code.
int run(const Invocation& inv, std::ostream& log);

/// Command-line entry point.
int main(int argc, char** argv);

}  // namespace hlmax::cli
