// Command-line front end for the experiment harness.
//
//   sparsetrig <approx|rates|cubature|oracle> (--preset NAME | --config FILE)
//              [--seed S] [--out-dir DIR] [--threads K] [--quiet]
//   sparsetrig replay --config out/manifest.json [--out-dir DIR]
//   sparsetrig --list-presets
//   sparsetrig --export-presets DIR
//
// Exit codes: 0 all asserted checks passed, 2 a monitored metric breached its
// threshold, 1 failure (assertion, guard violation, bad input).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsetrig/experiment.hpp"

namespace fs = std::filesystem;
using sparsetrig::ExperimentConfig;
using sparsetrig::RunResult;

namespace {

nlohmann::json read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(is);
}

void report(const RunResult& res, const fs::path& dir, bool quiet) {
  if (!quiet) {
    for (const auto& c : res.checks) {
      const char* tag = c.passed ? "PASS" : (c.severity == sparsetrig::Severity::Assert ? "FAIL" : "WARN");
      std::cout << "[" << tag << "] " << c.name << ": " << c.detail << "\n";
    }
    for (const auto& w : res.warnings) std::cout << "warning: " << w << "\n";
  }
  std::cout << res.config.id << ": " << res.rows << " rows -> " << dir.string() << " (status "
            << sparsetrig::to_string(res.status()) << ", exit " << res.exit_code() << ")\n";
}

struct RunArgs {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<unsigned> threads;
  bool quiet = false;
};

int run_kind(const std::string& sub, const RunArgs& args) {
  ExperimentConfig cfg = args.preset.empty() ? ExperimentConfig::from_json(read_json(args.config))
                                             : sparsetrig::preset(args.preset);
  if (sparsetrig::to_string(cfg.kind) != sub)
    throw std::invalid_argument("config '" + cfg.id + "' has kind " + sparsetrig::to_string(cfg.kind) +
                                ", not " + sub);
  if (args.seed) {
    const std::size_t count = std::max<std::size_t>(cfg.seeds.size(), 1);
    cfg.seeds.clear();
    for (std::size_t i = 0; i < count; ++i) cfg.seeds.push_back(*args.seed + i);
  }
  if (args.threads) cfg.threads = *args.threads;
  const fs::path dir = !args.out_dir.empty() ? fs::path(args.out_dir)
                       : !cfg.out_dir.empty() ? fs::path(cfg.out_dir)
                                              : fs::path("results") / cfg.id;
  const RunResult res = sparsetrig::run(cfg);
  sparsetrig::write_bundle(res, dir, sub);
  report(res, dir, args.quiet);
  return res.exit_code();
}

int run_replay(const RunArgs& args) {
  const fs::path manifest_path(args.config);
  auto manifest = read_json(manifest_path);
  if (args.threads) manifest["config"]["threads"] = *args.threads;  // does not affect results.csv
  const fs::path dir = !args.out_dir.empty() ? fs::path(args.out_dir) : manifest_path.parent_path() / "replay";
  const RunResult res = sparsetrig::replay(manifest);
  sparsetrig::write_bundle(res, dir, manifest.value("subcommand", sparsetrig::to_string(res.config.kind)));
  report(res, dir, args.quiet);
  return res.exit_code();
}

int export_presets(const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& [name, cfg] : sparsetrig::presets()) {
    std::ofstream os(dir / (name + ".json"));
    os << cfg.to_json().dump(2) << "\n";
    if (!os) throw std::runtime_error("cannot write " + (dir / (name + ".json")).string());
  }
  std::cout << sparsetrig::presets().size() << " presets written to " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparsetrig: sparse trigonometric approximation experiments"};
  app.require_subcommand(0, 1);

  bool list = false;
  std::string export_dir;
  app.add_flag("--list-presets", list, "List the built-in presets");
  app.add_option("--export-presets", export_dir, "Write every preset as DIR/<name>.json");

  RunArgs args;
  const char* kinds[][2] = {{"approx", "Greedy m-term approximation rates (IA, G^p_m)"},
                            {"rates", "Layered constructive approximation of smoothness classes"},
                            {"cubature", "Sparse-grid cubature error decay and exactness"},
                            {"oracle", "Greedy residuals against the best m-term oracle"}};
  std::vector<CLI::App*> subs;
  for (auto& [name, help] : kinds) {
    auto* sub = app.add_subcommand(name, help);
    auto* cfg = sub->add_option("--config", args.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
    auto* pre = sub->add_option("--preset", args.preset, "Built-in preset name");
    cfg->excludes(pre);
    sub->add_option("--seed", args.seed, "First seed; the run uses as many consecutive seeds as the config lists");
    sub->add_option("--out-dir", args.out_dir, "Output directory for results.csv, summary.json, manifest.json");
    sub->add_option("--threads", args.threads, "Worker threads (0 = hardware concurrency)");
    sub->add_flag("--quiet", args.quiet, "Only print the final status line");
    subs.push_back(sub);
  }
  auto* rep = app.add_subcommand("replay", "Rerun a stored manifest and compare results.csv byte for byte");
  rep->add_option("--config", args.config, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);
  rep->add_option("--out-dir", args.out_dir, "Output directory (default: <manifest dir>/replay)");
  rep->add_option("--threads", args.threads, "Worker threads (0 = hardware concurrency)");
  rep->add_flag("--quiet", args.quiet, "Only print the final status line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (list) {
      for (const auto& [name, cfg] : sparsetrig::presets())
        std::cout << name << "\t" << sparsetrig::to_string(cfg.kind) << "\t" << cfg.claim << "\n";
      return 0;
    }
    if (!export_dir.empty()) return export_presets(export_dir);
    if (rep->parsed()) return run_replay(args);
    for (auto* sub : subs)
      if (sub->parsed()) {
        if (args.config.empty() && args.preset.empty())
          throw std::invalid_argument(sub->get_name() + ": need --config or --preset");
        return run_kind(sub->get_name(), args);
      }
    std::cout << app.help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
