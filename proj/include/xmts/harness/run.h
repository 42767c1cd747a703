// xmts/include/xmts/harness/run.h

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

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xmts/harness/config.h"

namespace xmts::harness {

namespace fs = std::filesystem;

// A stage input is absent or its producing stage has not completed; maps to
// exit code 3.
class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Another live process holds the output directory.
class LockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::string out;
  std::string config_path;             // empty: reuse the run's resolved config, else defaults
  std::vector<std::string> overrides;  // key=value
  std::optional<std::uint64_t> seed;
  bool force = false;
};

// Base config, then --set overrides in order, then --seed; validated.
ExperimentConfig resolve_config(const RunOptions& opts);

// Exclusive lock file "<dir>/.lock" holding the owner pid. A lock whose pid
// is no longer alive is taken over.
class RunLock {
 public:
  explicit RunLock(const fs::path& dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;
  bool took_over() const { return took_over_; }

 private:
  fs::path path_;
  bool took_over_ = false;
};

// FNV-1a of the file bytes as 16 hex digits.
std::string file_hash(const fs::path& path);

struct ArtifactRecord {
  std::string path;  // relative to the run directory
  std::string hash;
  bool operator==(const ArtifactRecord&) const = default;
};

struct StageRecord {
  std::string status;  // running, complete, failed
  std::string fingerprint;
  std::vector<ArtifactRecord> inputs, outputs;
  std::string error;
};

struct Manifest {
  std::string run_id;
  std::string fingerprint;  // config of the most recent stage run
  std::map<std::string, StageRecord> stages;

  static Manifest load(const fs::path& path);
  void save(const fs::path& path) const;  // write-then-rename
};

struct StageContext {
  const ExperimentConfig& cfg;
  fs::path out;
  std::string path(const std::string& rel) const { return (out / rel).string(); }
};

struct StageDef {
  std::string name;
  std::vector<std::string> inputs, outputs;
  void (*body)(const StageContext&);
};

// Stages in pipeline order.
const std::vector<StageDef>& stages();
const StageDef& find_stage(const std::string& name);
// Stage whose outputs include `rel`; empty if none.
std::string producer_of(const std::string& rel);

enum class StageOutcome { kRan, kSkipped };

// Runs one stage in `opts.out`. A stage is skipped when it completed under
// the same config fingerprint, its inputs hash as recorded and its outputs
// are intact, unless `opts.force`.
StageOutcome run_stage(const std::string& name, const RunOptions& opts);

// CLI entry point; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace xmts::harness
