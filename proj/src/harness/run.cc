// xmts/src/harness/run.cc

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

#include "xmts/harness/run.h"

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "xmts/diff/errors.h"

namespace xmts::harness {

using nlohmann::json;

namespace {

constexpr const char* kResolvedConfig = "config.resolved.yaml";
constexpr const char* kManifest = "manifest.json";

bool pid_alive(long pid) {
  if (pid <= 0) return false;
  return ::kill(static_cast<pid_t>(pid), 0) == 0 || errno == EPERM;
}

json to_json(const std::vector<ArtifactRecord>& v) {
  json a = json::array();
  for (const auto& r : v) a.push_back({{"path", r.path}, {"hash", r.hash}});
  return a;
}

std::vector<ArtifactRecord> artifacts_from(const json& a) {
  std::vector<ArtifactRecord> v;
  for (const auto& r : a) v.push_back({r.at("path").get<std::string>(), r.at("hash").get<std::string>()});
  return v;
}

std::vector<ArtifactRecord> hash_all(const fs::path& out, const std::vector<std::string>& rels) {
  std::vector<ArtifactRecord> v;
  for (const auto& rel : rels) v.push_back({rel, file_hash(out / rel)});
  return v;
}

bool intact(const fs::path& out, const std::vector<ArtifactRecord>& recorded) {
  for (const auto& r : recorded)
    if (!fs::exists(out / r.path) || file_hash(out / r.path) != r.hash) return false;
  return true;
}

}  // namespace

ExperimentConfig resolve_config(const RunOptions& opts) {
  ExperimentConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = load_config(opts.config_path);
  } else if (!opts.out.empty() && fs::exists(fs::path(opts.out) / kResolvedConfig)) {
    cfg = load_config((fs::path(opts.out) / kResolvedConfig).string());
  }
  for (const auto& o : opts.overrides) apply_override(cfg, o);
  if (opts.seed) cfg.seed = *opts.seed;
  validate(cfg);
  return cfg;
}

RunLock::RunLock(const fs::path& dir) : path_(dir / ".lock") {
  for (int attempt = 0; attempt < 2; ++attempt) {
    int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0644);
    if (fd >= 0) {
      const std::string pid = std::to_string(::getpid()) + "\n";
      const bool ok = ::write(fd, pid.data(), pid.size()) == static_cast<ssize_t>(pid.size());
      ::close(fd);
      if (!ok) throw LockError("cannot write lock file " + path_.string());
      return;
    }
    if (errno != EEXIST)
      throw LockError("cannot create lock file " + path_.string() + ": " + std::strerror(errno));
    long owner = 0;
    std::ifstream in(path_);
    in >> owner;
    if (pid_alive(owner))
      throw LockError("run directory " + dir.string() + " is locked by running process " +
                      std::to_string(owner));
    spdlog::warn("taking over stale lock {} (pid {})", path_.string(), owner);
    std::error_code ec;
    fs::remove(path_, ec);
    took_over_ = true;
  }
  throw LockError("could not acquire lock " + path_.string());
}

RunLock::~RunLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(LoadError::Kind::kIo, "cannot read " + path.string());
  std::uint64_t h = 14695981039346656037ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i)
      h = (h ^ static_cast<unsigned char>(buf[i])) * 1099511628211ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

Manifest Manifest::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(LoadError::Kind::kIo, "cannot read " + path.string());
  Manifest m;
  try {
    json j = json::parse(in);
    m.run_id = j.at("run_id").get<std::string>();
    m.fingerprint = j.at("fingerprint").get<std::string>();
    for (const auto& [name, s] : j.at("stages").items()) {
      StageRecord r;
      r.status = s.at("status").get<std::string>();
      r.fingerprint = s.at("fingerprint").get<std::string>();
      r.inputs = artifacts_from(s.at("inputs"));
      r.outputs = artifacts_from(s.at("outputs"));
      if (s.contains("error")) r.error = s.at("error").get<std::string>();
      m.stages[name] = r;
    }
  } catch (const json::exception& e) {
    throw LoadError(LoadError::Kind::kMalformed, path.string() + ": " + e.what());
  }
  return m;
}

void Manifest::save(const fs::path& path) const {
  json stages_json = json::object();
  for (const auto& [name, r] : stages) {
    json s{{"status", r.status},
           {"fingerprint", r.fingerprint},
           {"inputs", to_json(r.inputs)},
           {"outputs", to_json(r.outputs)}};
    if (!r.error.empty()) s["error"] = r.error;
    stages_json[name] = s;
  }
  json j{{"run_id", run_id}, {"fingerprint", fingerprint}, {"stages", stages_json}};
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw LoadError(LoadError::Kind::kIo, "cannot write " + tmp.string());
    out << j.dump(2) << '\n';
  }
  fs::rename(tmp, path);
}

const StageDef& find_stage(const std::string& name) {
  for (const auto& s : stages())
    if (s.name == name) return s;
  throw ConfigError("unknown stage '" + name + "'");
}

std::string producer_of(const std::string& rel) {
  for (const auto& s : stages())
    for (const auto& o : s.outputs)
      if (o == rel) return s.name;
  return "";
}

StageOutcome run_stage(const std::string& name, const RunOptions& opts) {
  if (opts.out.empty()) throw ConfigError("--out is required");
  const StageDef& stage = find_stage(name);
  const ExperimentConfig cfg = resolve_config(opts);
  const std::string fp = fingerprint(cfg);
  const fs::path out(opts.out);
  fs::create_directories(out);
  RunLock lock(out);

  const fs::path manifest_path = out / kManifest;
  Manifest manifest;
  if (fs::exists(manifest_path)) {
    manifest = Manifest::load(manifest_path);
  } else {
    manifest.run_id = "run-" + fp.substr(0, 12);
  }

  for (const auto& in : stage.inputs) {
    const std::string prod = producer_of(in);
    auto it = manifest.stages.find(prod);
    const bool done = it != manifest.stages.end() && it->second.status == "complete";
    if (!fs::exists(out / in) || !done)
      throw MissingArtifact("missing artifact " + (out / in).string() + " (produced by stage '" +
                            prod + "'; run it first)");
  }
  const auto inputs = hash_all(out, stage.inputs);

  StageRecord& rec = manifest.stages[name];
  if (!opts.force && rec.status == "complete" && rec.fingerprint == fp && rec.inputs == inputs &&
      intact(out, rec.outputs)) {
    spdlog::info("{}: up to date, skipping (use --force to rerun)", name);
    return StageOutcome::kSkipped;
  }

  {
    std::ofstream cfg_out(out / kResolvedConfig);
    cfg_out << to_yaml(cfg);
  }
  manifest.fingerprint = fp;
  rec = StageRecord{"running", fp, inputs, {}, ""};
  manifest.save(manifest_path);
  for (const auto& o : stage.outputs) fs::create_directories((out / o).parent_path());

  spdlog::info("{}: running (config {})", name, fp);
  try {
    stage.body(StageContext{cfg, out});
    rec.outputs = hash_all(out, stage.outputs);
  } catch (const std::exception& e) {
    rec.status = "failed";
    rec.error = e.what();
    manifest.save(manifest_path);
    throw;
  }
  rec.status = "complete";
  manifest.save(manifest_path);
  spdlog::info("{}: complete", name);
  return StageOutcome::kRan;
}

}  // namespace xmts::harness
