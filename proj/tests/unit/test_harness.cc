// xmts/tests/unit/test_harness.cc

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

#include <sys/wait.h>
#include <unistd.h>

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "common/test_util.h"
#include "doctest.h"
#include "json.hpp"
#include "xmts/diff/errors.h"
#include "xmts/harness/run.h"

using namespace xmts;
using namespace xmts::harness;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

// A chain small enough to run in a few seconds.
std::vector<std::string> tiny_overrides() {
  return {"data.train_size=16",         "data.valid_size=8",
          "data.test_size=8",           "data.asr_template_sentences=16",
          "data.asr_bigram_texts=8",    "data.asr_valid_size=8",
          "data.nlu_template_sentences=16", "data.nlu_bigram_texts=16",
          "asr.dim=8",                  "asr.ffn_dim=16",
          "asr.layers=2",               "asr.decoder_layers=1",
          "asr.epochs=1",               "asr.batch_size=4",
          "asr.average_best=1",         "nlu.dim=12",
          "nlu.ffn_dim=24",             "nlu.layers=2",
          "nlu.mlm_steps=4",            "nlu.mlm_batch_size=4",
          "nlu.nli_pairs=16",           "nlu.nli_steps=3",
          "nlu.sts_pairs=16",           "nlu.sts_steps=2",
          "nlu.heldout_pairs=8",        "nlu.pair_batch_size=4",
          "slu.epochs=1",               "slu.ablation_k=[0, 1]",
          "slu.ablation_m=[0]",         "eval.classifier_lrs=[0.01]",
          "eval.classifier_steps=[20]", "eval.fewshot_n=[0, 1]",
          "eval.fewshot_steps=2",       "eval.fewshot_encoder_layers=1"};
}

RunOptions tiny_run(const fs::path& dir) {
  RunOptions o;
  o.out = dir.string();
  o.overrides = tiny_overrides();
  return o;
}

void run_chain(const RunOptions& o) {
  for (const auto& s : stages()) run_stage(s.name, o);
}

}  // namespace

TEST_CASE("config: canonical yaml round-trips to the same fingerprint") {
  ExperimentConfig a;
  a.slu.ablation_k = {2, 0};
  a.eval.fewshot_lr = 0.0025;
  a.slu.objective = "cosine";
  ExperimentConfig b;
  apply_yaml(b, to_yaml(a), "roundtrip");
  CHECK(to_yaml(b) == to_yaml(a));
  CHECK(fingerprint(b) == fingerprint(a));
  CHECK(fingerprint(a) != fingerprint(ExperimentConfig{}));
  CHECK(fingerprint(a).size() == 16);
}

TEST_CASE("config: fingerprint ignores key order in the source file") {
  ExperimentConfig a, b;
  apply_yaml(a, "seed: 3\nslu:\n  k: 1\n  epochs: 5\ndata:\n  classes: 3\n", "a");
  apply_yaml(b, "data: {classes: 3}\nslu: {epochs: 5, k: 1}\nseed: 3\n", "b");
  CHECK(fingerprint(a) == fingerprint(b));
  CHECK(a.data.classes == 3);
  CHECK(a.slu.k == 1);
  CHECK(a.seed == 3);
}

TEST_CASE("config: every key appears once in the canonical yaml") {
  const auto keys = config_keys();
  CHECK(std::set<std::string>(keys.begin(), keys.end()).size() == keys.size());
  const std::string y = to_yaml(ExperimentConfig{});
  for (const auto& k : keys) {
    const auto leaf = k.substr(k.find('.') + 1);
    CHECK_MESSAGE(y.find(leaf + ":") != std::string::npos, k);
  }
}

TEST_CASE("config: unknown keys and type mismatches name the key") {
  ExperimentConfig c;
  CHECK(error_of([&] { apply_yaml(c, "data:\n  clases: 3\n", "f.yaml"); })
            .find("data.clases") != std::string::npos);
  CHECK(error_of([&] { apply_yaml(c, "bogus: 1\n", "f.yaml"); }).find("'bogus'") !=
        std::string::npos);
  CHECK(error_of([&] { apply_yaml(c, "asr:\n  epochs: many\n", "f.yaml"); })
            .find("asr.epochs") != std::string::npos);
  CHECK(error_of([&] { apply_yaml(c, "asr:\n  epochs: -1\n", "f.yaml"); })
            .find("asr.epochs") != std::string::npos);
  CHECK(error_of([&] { apply_yaml(c, "asr:\n  epochs: 1.5\n", "f.yaml"); })
            .find("asr.epochs") != std::string::npos);
  CHECK(error_of([&] { apply_yaml(c, "asr:\n  spec_augment: maybe\n", "f.yaml"); })
            .find("asr.spec_augment") != std::string::npos);
  CHECK(error_of([&] { apply_yaml(c, "slu:\n  ablation_k: 3\n", "f.yaml"); })
            .find("slu.ablation_k") != std::string::npos);
  CHECK(error_of([&] { apply_yaml(c, "slu:\n  ablation_k: [1, x]\n", "f.yaml"); })
            .find("slu.ablation_k[1]") != std::string::npos);
  CHECK(error_of([&] { apply_yaml(c, "data: 3\n", "f.yaml"); }).find("section") !=
        std::string::npos);
  CHECK(error_of([&] { apply_yaml(c, "seed: {a: 1}\n", "f.yaml"); }).find("seed") !=
        std::string::npos);
  CHECK(error_of([&] { apply_yaml(c, "[1, 2]\n", "f.yaml"); }).find("mapping") !=
        std::string::npos);
  CHECK(error_of([&] { apply_yaml(c, "a: [1\n", "f.yaml"); }).find("invalid YAML") !=
        std::string::npos);
  CHECK(error_of([&] { load_config("/nonexistent/x.yaml"); }).find("/nonexistent/x.yaml") !=
        std::string::npos);
  // Failed loads leave earlier values alone.
  CHECK(c.asr.epochs == ExperimentConfig{}.asr.epochs);
}

TEST_CASE("config: overrides parse values as yaml") {
  ExperimentConfig c;
  apply_override(c, "slu.ablation_k=[0, 3]");
  apply_override(c, "asr.spec_augment=false");
  apply_override(c, "slu.objective=cosine");
  apply_override(c, "eval.fewshot_lr=1e-4");
  apply_override(c, "seed=42");
  CHECK(c.slu.ablation_k == std::vector<std::size_t>{0, 3});
  CHECK_FALSE(c.asr.spec_augment);
  CHECK(c.slu.objective == "cosine");
  CHECK(c.eval.fewshot_lr == doctest::Approx(1e-4));
  CHECK(c.seed == 42);
  CHECK(error_of([&] { apply_override(c, "slu.k"); }).find("key=value") != std::string::npos);
  CHECK(error_of([&] { apply_override(c, "=3"); }).find("key=value") != std::string::npos);
  CHECK(error_of([&] { apply_override(c, "slu.k="); }).find("slu.k") != std::string::npos);
  CHECK(error_of([&] { apply_override(c, "slu=3"); }).find("section") != std::string::npos);
}

TEST_CASE("config: validation rejects inconsistent values") {
  auto rejects = [](const std::string& assignment, const std::string& key) {
    ExperimentConfig c;
    apply_override(c, assignment);
    const std::string msg = error_of([&] { validate(c); });
    CHECK_MESSAGE(msg.find(key) != std::string::npos, (assignment + " -> " + msg));
  };
  validate(ExperimentConfig{});
  rejects("data.classes=9", "data.classes");
  rejects("data.classes=1", "data.classes");
  rejects("data.frames_max=2", "data.frames_max");
  rejects("asr.heads=3", "asr.heads");
  rejects("nlu.mask_prob=1.0", "nlu.mask_prob");
  rejects("slu.k=5", "slu.k");
  rejects("slu.m=5", "slu.m");
  rejects("slu.objective=L3", "slu.objective");
  rejects("slu.ablation_k=[]", "slu.ablation_k");
  rejects("slu.ablation_k=[9]", "slu.ablation_k");
  rejects("eval.fewshot_n=[60]", "eval.fewshot_n");
  rejects("eval.bucket_width=0", "eval.bucket_width");
  rejects("eval.classifier_lrs=[-1.0]", "eval.classifier_lrs");
  rejects("asr.ctc_weight=2", "asr.ctc_weight");
}

TEST_CASE("config: derived component configs") {
  ExperimentConfig c;
  c.seed = 9;
  const auto at = asr_train_config(c);
  CHECK(at.schedule.dim == c.asr.dim);
  CHECK(at.schedule.warmup == c.asr.warmup);
  CHECK(at.augment.num_time_masks == c.asr.time_masks);
  const auto dc = distill_config(c);
  CHECK(dc.objective == slu::DistanceKind::kL1);
  CHECK(dc.asr_layers_to_tune == 2);
  CHECK(dc.schedule.dim == c.nlu.dim);
  const auto sc = student_config(c);
  CHECK(sc.encoder.layers == c.asr.layers);
  CHECK(sc.nlu.dim == c.nlu.dim);
  CHECK(stream_seed(c, "a") != stream_seed(c, "b"));
  ExperimentConfig d;
  d.seed = 10;
  CHECK(stream_seed(c, "a") != stream_seed(d, "a"));
  CHECK(pair_config(c, 7, "x").steps == 7);
}

TEST_CASE("resolve_config: base, overrides, then seed") {
  const auto dir = testing::scratch_dir("resolve");
  spit(dir / "c.yaml", "seed: 4\nslu:\n  k: 1\n");
  RunOptions o;
  o.config_path = (dir / "c.yaml").string();
  o.overrides = {"slu.k=3", "seed=5"};
  o.seed = 6;
  const auto c = resolve_config(o);
  CHECK(c.slu.k == 3);
  CHECK(c.seed == 6);
  // Without --config the run directory's resolved config is the base.
  spit(dir / "config.resolved.yaml", to_yaml(c));
  RunOptions o2;
  o2.out = dir.string();
  CHECK(fingerprint(resolve_config(o2)) == fingerprint(c));
  fs::remove_all(dir);
}

TEST_CASE("file_hash: FNV-1a of the bytes") {
  const auto dir = testing::scratch_dir("hash");
  spit(dir / "a", "a");
  spit(dir / "empty", "");
  CHECK(file_hash(dir / "a") == "af63dc4c8601ec8c");
  CHECK(file_hash(dir / "empty") == "cbf29ce484222325");
  CHECK_THROWS_AS(file_hash(dir / "missing"), LoadError);
  fs::remove_all(dir);
}

TEST_CASE("manifest: save and load round trip") {
  const auto dir = testing::scratch_dir("manifest");
  Manifest m;
  m.run_id = "run-x";
  m.fingerprint = "0123";
  m.stages["gen-data"] = {"complete", "0123", {}, {{"data/a", "ff"}}, ""};
  m.stages["distill"] = {"failed", "0123", {{"data/a", "ff"}}, {}, "boom"};
  m.save(dir / "manifest.json");
  const auto l = Manifest::load(dir / "manifest.json");
  CHECK(l.run_id == "run-x");
  CHECK(l.stages.at("gen-data").outputs == m.stages["gen-data"].outputs);
  CHECK(l.stages.at("distill").error == "boom");
  CHECK(l.stages.at("distill").inputs == m.stages["distill"].inputs);
  spit(dir / "bad.json", "{\"run_id\": 1}");
  CHECK_THROWS_AS(Manifest::load(dir / "bad.json"), LoadError);
  fs::remove_all(dir);
}

TEST_CASE("lock: held lock blocks, stale lock is taken over, release removes it") {
  const auto dir = testing::scratch_dir("lock");
  {
    RunLock first(dir);
    CHECK_FALSE(first.took_over());
    CHECK(fs::exists(dir / ".lock"));
    CHECK_THROWS_AS(RunLock{dir}, LockError);
  }
  CHECK_FALSE(fs::exists(dir / ".lock"));

  // pid of a child that has already exited.
  const pid_t child = ::fork();
  if (child == 0) ::_exit(0);
  ::waitpid(child, nullptr, 0);
  spit(dir / ".lock", std::to_string(child) + "\n");
  {
    RunLock taken(dir);
    CHECK(taken.took_over());
    CHECK(std::stol(slurp(dir / ".lock")) == ::getpid());
  }
  spit(dir / ".lock", "garbage");
  CHECK(RunLock(dir).took_over());
  fs::remove_all(dir);
}

TEST_CASE("stages: registry is consistent") {
  std::set<std::string> produced;
  for (const auto& s : stages()) {
    for (const auto& in : s.inputs) {
      CHECK_MESSAGE(produced.count(in) == 1, (s.name + " reads " + in + " before it is produced"));
      CHECK(!producer_of(in).empty());
    }
    for (const auto& o : s.outputs) CHECK(produced.insert(o).second);
  }
  CHECK_THROWS_AS(find_stage("nope"), ConfigError);
  CHECK(producer_of("asr/model.ckpt") == "pretrain-asr");
}

TEST_CASE("run_stage: missing inputs name the artifact") {
  const auto dir = testing::scratch_dir("missing");
  auto o = tiny_run(dir);
  try {
    run_stage("distill", o);
    FAIL("expected MissingArtifact");
  } catch (const MissingArtifact& e) {
    CHECK(std::string(e.what()).find("asr/model.ckpt") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(dir / ".lock"));
  RunOptions no_out;
  CHECK_THROWS_AS(run_stage("gen-data", no_out), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("run_stage: full tiny chain, skipping, forcing and reproducibility") {
  const auto a = testing::scratch_dir("chain_a");
  const auto b = testing::scratch_dir("chain_b");
  const auto oa = tiny_run(a);
  run_chain(oa);
  for (const auto& s : stages())
    for (const auto& out : s.outputs) CHECK_MESSAGE(fs::exists(a / out), out);
  const auto manifest = Manifest::load(a / "manifest.json");
  for (const auto& s : stages()) CHECK(manifest.stages.at(s.name).status == "complete");
  CHECK(fs::exists(a / "config.resolved.yaml"));
  CHECK_FALSE(fs::exists(a / ".lock"));

  // Completed stages are skipped; a resolved config in the directory is reused.
  RunOptions again;
  again.out = a.string();
  for (const auto& s : stages()) CHECK(run_stage(s.name, again) == StageOutcome::kSkipped);

  // Same config in a fresh directory: bitwise identical artifacts.
  run_chain(tiny_run(b));
  const auto mb = Manifest::load(b / "manifest.json");
  for (const auto& s : stages())
    CHECK_MESSAGE(mb.stages.at(s.name).outputs == manifest.stages.at(s.name).outputs, s.name);
  CHECK(mb.run_id == manifest.run_id);

  // --force reruns and reproduces the same bytes.
  auto forced = again;
  forced.force = true;
  CHECK(run_stage("distill", forced) == StageOutcome::kRan);
  CHECK(Manifest::load(a / "manifest.json").stages.at("distill").outputs ==
        manifest.stages.at("distill").outputs);

  // A damaged output triggers a rerun.
  spit(a / "eval/fewshot.jsonl", "tampered\n");
  CHECK(run_stage("fewshot", again) == StageOutcome::kRan);
  CHECK(slurp(a / "eval/fewshot.jsonl") == slurp(b / "eval/fewshot.jsonl"));

  // A changed config reruns the stage and records the new fingerprint.
  auto changed = again;
  changed.overrides = {"slu.epochs=2"};
  CHECK(run_stage("distill", changed) == StageOutcome::kRan);
  const auto mc = Manifest::load(a / "manifest.json");
  CHECK(mc.stages.at("distill").fingerprint != manifest.stages.at("distill").fingerprint);
  // Downstream inputs changed, so the next evaluation is not skipped.
  CHECK(run_stage("eval-zero-shot", again) == StageOutcome::kRan);

  // An incomplete producer blocks consumers.
  auto m = Manifest::load(a / "manifest.json");
  m.stages["pretrain-asr"].status = "running";
  m.save(a / "manifest.json");
  CHECK_THROWS_AS(run_stage("distill", again), MissingArtifact);

  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("run_stage: metrics and reports have the documented shape") {
  const auto dir = testing::scratch_dir("shape");
  run_chain(tiny_run(dir));
  std::ifstream in(dir / "slu/distill_metrics.jsonl");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"epoch", "train_distance", "valid_distance", "objective", "k", "m", "lr"})
      CHECK_MESSAGE(j.contains(key), key);
    CHECK(j.at("train_distance").is_null() == (j.at("epoch") == 0));
    CHECK(j.at("objective") == "L1");
    ++rows;
  }
  CHECK(rows == 2);  // epoch 0 plus one epoch

  // Bucket counts plus the excluded row add up to the test set.
  std::ifstream csv(dir / "eval/buckets.csv");
  std::getline(csv, line);
  CHECK(line.rfind("bucket_lo", 0) == 0);
  std::size_t total = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() >= 3);
    total += std::stoul(cells[2]);
  }
  CHECK(total == 8);

  const auto ablation = slurp(dir / "slu/ablation.csv");
  CHECK(ablation.rfind("k,m,valid_distance,trainable_scalars\n0,0,", 0) == 0);
  CHECK(ablation.find("\n1,0,") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("run_cli: exit codes") {
  auto cli = [](std::vector<std::string> args) {
    args.insert(args.begin(), "xmts");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
  };
  const auto dir = testing::scratch_dir("cli");
  CHECK(cli({}) == 2);
  CHECK(cli({"distill"}) == 2);  // --out missing
  CHECK(cli({"show-config", "--set", "nope=1"}) == 2);
  CHECK(cli({"show-config", "--set", "slu.k=x"}) == 2);
  CHECK(cli({"show-config", "--config", "/nonexistent.yaml"}) == 2);
  CHECK(cli({"distill", "--out", dir.string()}) == 3);
  CHECK(cli({"show-config", "--seed", "3"}) == 0);
  spit(dir / "manifest.json", "not json");
  CHECK(cli({"gen-data", "--out", dir.string()}) == 1);
  fs::remove_all(dir);
}
