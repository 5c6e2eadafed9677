#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>

#include "hlmax/error.hpp"
#include "hlmax/io.hpp"

#ifndef HLMAX_VERSION
#define HLMAX_VERSION "unknown"
#endif

namespace hlmax::cli {
namespace {

std::string fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool config_code(ErrorCode c) { return c == ErrorCode::Config || c == ErrorCode::Parse; }

}  // namespace

int run(const Invocation& inv, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  ExperimentConfig cfg;
  try {
    cfg = load_config(inv);
  } catch (const Error& e) {
    log << "hlmax: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "hlmax: config: " << e.what() << "\n";
    return kExitConfig;
  }

  Artifacts art;
  try {
    art = execute(cfg);
  } catch (const Error& e) {
    log << "hlmax: " << cfg.subcommand << ": " << e.what() << "\n";
    return config_code(e.code()) ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    log << "hlmax: " << cfg.subcommand << ": " << e.what() << "\n";
    return kExitNumerical;
  }

  const std::string csv_name = cfg.subcommand + ".csv";
  const std::string csv = art.csv();
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Json outputs = Json::array();
  outputs.push_back({{"file", csv_name}, {"fnv1a", fnv1a(csv)}});
  for (const auto& [name, content] : art.files) outputs.push_back({{"file", name}, {"fnv1a", fnv1a(content)}});
  Json manifest;
  manifest["tool"] = "hlmax";
  manifest["version"] = HLMAX_VERSION;
  manifest["subcommand"] = cfg.subcommand;
  manifest["config_hash"] = fnv1a(cfg.resolved.dump());
  manifest["seed"] = cfg.seed;
  manifest["threads"] = cfg.threads;
  manifest["status"] = art.status;
  manifest["outputs"] = outputs;
  manifest["config"] = cfg.resolved;
  manifest["started_utc"] = started;
  manifest["runtime_seconds"] = runtime;

  try {
    namespace fs = std::filesystem;
    for (const auto& [name, content] : art.files) write_file_atomic((fs::path(cfg.out_dir) / name).string(), content);
    write_file_atomic((fs::path(cfg.out_dir) / csv_name).string(), csv);
    write_file_atomic((fs::path(cfg.out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "hlmax: cannot write results to '" << cfg.out_dir << "': " << e.what() << "\n";
    return kExitConfig;
  }
  log << "hlmax " << cfg.subcommand << ": " << art.status << ", wrote " << cfg.out_dir << "/" << csv_name << "\n";
  return kExitOk;
}

int main(int argc, char** argv) {
  CLI::App app{"Centered maximal operators over convex bodies: certificates, transforms and covering experiments"};
  app.set_version_flag("--version", HLMAX_VERSION);
  Invocation inv;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string subs;
  for (const auto& s : kSubcommands) subs += (subs.empty() ? "" : ", ") + s;
  app.add_option("subcommand", inv.subcommand, "One of: " + subs)->required()->check(CLI::IsMember(kSubcommands));
  app.add_option("--config", inv.config_path, "Experiment TOML file");
  app.add_option("--body", inv.body_path, "Body JSON file (overrides the config)");
  app.add_option("--out", inv.out_dir, "Output directory (default: out)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized scans and families");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (*seed_opt) inv.seed = seed;
  if (*threads_opt) inv.threads = threads;
  return run(inv, std::cerr);
}

}  // namespace hlmax::cli
