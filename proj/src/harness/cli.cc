// xmts/src/harness/cli.cc

// Copyright 2026  The xmts Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <iostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "xmts/diff/errors.h"
#include "xmts/harness/run.h"

namespace xmts::harness {

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitMissing = 3;

void configure_logging() {
  auto logger = spdlog::get("xmts");
  if (!logger) logger = spdlog::stderr_color_mt("xmts");
  logger->set_pattern("[%H:%M:%S] [%^%l%$] %v");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("XMTS_LOG");
  const std::string level = env ? env : "info";
  if (level == "error") spdlog::set_level(spdlog::level::err);
  else if (level == "warn") spdlog::set_level(spdlog::level::warn);
  else if (level == "info") spdlog::set_level(spdlog::level::info);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else throw ConfigError("XMTS_LOG must be one of error, warn, info, debug (got '" + level + "')");
}

void add_run_options(CLI::App* cmd, RunOptions& opts, std::uint64_t& seed, bool out_required) {
  auto* out = cmd->add_option("--out", opts.out, "Run directory");
  if (out_required) out->required();
  cmd->add_option("--config", opts.config_path, "YAML config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", opts.overrides, "Override a config key (key=value)")
      ->take_all()
      ->allow_extra_args(false);
  cmd->add_option("--seed", seed, "Global seed");
  cmd->add_flag("--force", opts.force, "Rerun even if up to date");
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Cross-modal distillation experiment runner"};
  app.require_subcommand(1);
  RunOptions opts;
  std::uint64_t seed = 0;
  std::vector<CLI::App*> stage_cmds;
  for (const auto& s : stages()) stage_cmds.push_back(app.add_subcommand(s.name, "Run stage " + s.name));
  auto* all = app.add_subcommand("all", "Run every stage in order");
  auto* show = app.add_subcommand("show-config", "Print the resolved config and its fingerprint");
  for (auto* c : stage_cmds) add_run_options(c, opts, seed, true);
  add_run_options(all, opts, seed, true);
  add_run_options(show, opts, seed, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    configure_logging();
    CLI::App* cmd = app.get_subcommands().front();
    if (cmd->count("--seed")) opts.seed = seed;
    if (cmd == show) {
      const auto cfg = resolve_config(opts);
      std::cout << to_yaml(cfg) << "# fingerprint " << fingerprint(cfg) << '\n';
      return 0;
    }
    if (cmd == all) {
      for (const auto& s : stages()) run_stage(s.name, opts);
      return 0;
    }
    run_stage(cmd->get_name(), opts);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MissingArtifact& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMissing;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace xmts::harness
