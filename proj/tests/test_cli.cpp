// Copyright 2026 The fotag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "fotag/commands.hpp"
#include "fotag/dataset.hpp"
#include "fotag/report.hpp"
#include "test_support.hpp"

using namespace fotag;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

/// Writes a small planted dataset, its embeddings and a fast config.
std::filesystem::path small_run(const testing::TempDir& dir, const std::string& task = "basic",
                                const std::string& extra = "") {
  const Run synth = cli({"synth", "--out", (dir / "data").string(), "--task", task, "--n", "240", "--d", "16",
                         "--seed", "3"});
  REQUIRE(synth.status == 0);
  const auto cfg = dir / "run.ini";
  testing::write_file(cfg, "task = " + task + "\n" +
                               "dataset = data/synthetic." + task + ".tsv\n" +
                               "embeddings = data/synthetic." + task + ".foemb\n"
                               "out = out\n"
                               "n_probes = 3\n"
                               "hidden_max = 32\n"
                               "epochs = 4\n"
                               "seed = 2\n" + extra);
  return cfg;
}

}  // namespace

TEST_CASE("derive-binary command") {
  testing::TempDir dir("cli_derive");
  const std::string in = (testing::source_dir() / "data" / "fixture.tsv").string();
  REQUIRE(cli({"derive-binary", "--in", in, "--out", (dir / "a.tsv").string(), "--seed", "5"}).status == 0);
  REQUIRE(cli({"derive-binary", "--in", in, "--out", (dir / "b.tsv").string(), "--seed", "5"}).status == 0);
  CHECK(load_binary_dataset(dir / "a.tsv").size() == 24);
  CHECK(testing::read_file(dir / "a.tsv") == testing::read_file(dir / "b.tsv"));

  testing::write_file(dir / "bad.tsv", "word\tsentence\tlabel\ncar\tA car.\tCognitive-event\noops\n");
  const Run bad = cli({"derive-binary", "--in", (dir / "bad.tsv").string(), "--out", (dir / "c.tsv").string()});
  CHECK(bad.status == 1);
  CHECK(bad.err.find("line 3") != std::string::npos);

  CHECK(cli({"derive-binary", "--in", (dir / "absent.tsv").string(), "--out", (dir / "d.tsv").string()}).status == 2);
}

TEST_CASE("usage errors exit 1") {
  CHECK(cli({}).status == 1);
  CHECK(cli({"frobnicate"}).status == 1);
  CHECK(cli({"sweep"}).status == 1);
  CHECK(cli({"--help"}).status == 0);
}

TEST_CASE("sweep command writes three artifacts per family") {
  testing::TempDir dir("cli_sweep");
  const auto cfg = small_run(dir);
  const Run r = cli({"sweep", "--config", cfg.string()});
  REQUIRE(r.status == 0);
  CHECK(lines(r.out) == 2);
  for (const char* fam : {"linear", "mlp"}) {
    const std::string base = std::string("synthetic.basic.") + fam;
    CHECK(std::filesystem::exists(dir / ("out/" + base + ".sweep.jsonl")));
    CHECK(std::filesystem::exists(dir / ("out/" + base + ".plot.csv")));
    const ProbeSummary s = load_summary(dir / ("out/" + base + ".summary.json"));
    CHECK(s.task_id == "basic");
    CHECK(s.num_classes == 6);
  }
  const std::string summary = testing::read_file(dir / "out/synthetic.basic.mlp.summary.json");
  CHECK(summary.find("\"split_seed\"") != std::string::npos);
  CHECK(summary.find("\"train_seed\"") != std::string::npos);

  const std::string first = testing::read_file(dir / "out/synthetic.basic.linear.sweep.jsonl");
  REQUIRE(cli({"sweep", "--config", cfg.string(), "--jobs", "3", "--out", (dir / "again").string()}).status == 0);
  CHECK(testing::read_file(dir / "again/synthetic.basic.linear.sweep.jsonl") == first);
  REQUIRE(cli({"sweep", "--config", cfg.string(), "--seed", "77", "--out", (dir / "reseeded").string()}).status == 0);
  CHECK(testing::read_file(dir / "reseeded/synthetic.basic.linear.sweep.jsonl") != first);
}

TEST_CASE("sweep refuses a task/mode mismatch before training") {
  testing::TempDir dir("cli_mode");
  const auto cfg = small_run(dir);
  std::string text = testing::read_file(cfg);
  text.replace(text.find("task = basic"), 12, "task = singular");
  testing::write_file(cfg, text);
  const Run r = cli({"sweep", "--config", cfg.string()});
  CHECK(r.status == 1);
  CHECK(r.err.find("ModeMismatch") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir / "out"));
}

TEST_CASE("sweep IO failures exit 2") {
  testing::TempDir dir("cli_io");
  CHECK(cli({"sweep", "--config", (dir / "absent.ini").string()}).status == 2);
  testing::write_file(dir / "run.ini", "dataset = nothing.tsv\nembeddings = nothing.foemb\n");
  CHECK(cli({"sweep", "--config", (dir / "run.ini").string()}).status == 2);
}

TEST_CASE("binary sweep through the CLI") {
  testing::TempDir dir("cli_binary");
  const auto cfg = small_run(dir, "binary", "families = linear\n");
  const Run r = cli({"sweep", "--config", cfg.string()});
  REQUIRE(r.status == 0);
  CHECK(load_summary(dir / "out/synthetic.binary.linear.summary.json").num_classes == 2);
}

TEST_CASE("report command") {
  testing::TempDir dir("cli_report");
  const Run empty = cli({"report"});
  CHECK(empty.status == 0);
  CHECK(lines(empty.out) == 3);

  ProbeSummary a;
  a.model_id = "bert-base";
  a.task_id = "basic";
  a.num_classes = 6;
  a.family = ProbeFamily::Mlp;
  a.accuracy_at_max_selectivity = 0.54;
  a.max_selectivity = 0.27;
  ProbeSummary b = a;
  b.model_id = "roberta-large";
  save_summary(dir / "a.json", a);
  save_summary(dir / "b.json", b);
  const Run two = cli({"report", (dir / "a.json").string(), (dir / "b.json").string()});
  CHECK(two.status == 0);
  CHECK(lines(two.out) == 5);
  const Run csv = cli({"report", "--format", "csv", (dir / "a.json").string()});
  CHECK(csv.out.find("bert-base,0.54,0.27,-,-\n") != std::string::npos);

  ProbeSummary c = a;
  c.task_id = "binary";
  c.num_classes = 2;
  save_summary(dir / "c.json", c);
  CHECK(cli({"report", (dir / "a.json").string(), (dir / "c.json").string()}).status == 1);
  CHECK(cli({"report", (dir / "absent.json").string()}).status == 2);
}

TEST_CASE("train-tagger and tag commands") {
  testing::TempDir dir("cli_tag");
  const auto cfg = small_run(dir, "basic", "tagger_hidden = 16\nratios = 0.6,0.2,0.2\n");
  const Run trained = cli({"train-tagger", "--config", cfg.string()});
  REQUIRE(trained.status == 0);
  CHECK(trained.out.find("test accuracy") == 0);
  const std::string model = (dir / "out/synthetic.basic.tagger").string();
  const std::string emb = (dir / "data/synthetic.basic.foemb").string();

  const Run tagged = cli({"tag", "--model", model, "--embeddings", emb});
  REQUIRE(tagged.status == 0);
  CHECK(lines(tagged.out) == 240);
  CHECK(tagged.out.rfind("0\t", 0) == 0);
  CHECK(cli({"tag", "--model", model, "--embeddings", emb}).out == tagged.out);

  CHECK(cli({"tag", "--model", (dir / "absent").string(), "--embeddings", emb}).status == 2);
  CHECK(cli({"tag", "--model", model, "--embeddings", (dir / "absent").string()}).status == 2);

  // Embeddings of another dimension.
  REQUIRE(cli({"synth", "--out", (dir / "wide").string(), "--n", "12", "--d", "20"}).status == 0);
  CHECK(cli({"tag", "--model", model, "--embeddings", (dir / "wide/synthetic.basic.foemb").string()}).status == 1);
  // Embeddings from another extraction mode.
  REQUIRE(cli({"synth", "--out", (dir / "sing").string(), "--task", "singular", "--n", "12", "--d", "16"}).status == 0);
  CHECK(cli({"tag", "--model", model, "--embeddings", (dir / "sing/synthetic.singular.foemb").string()}).status == 1);

  REQUIRE(cli({"sweep", "--config", cfg.string()}).status == 0);
  const Run from = cli({"train-tagger", "--config", cfg.string(), "--from-summary",
                        (dir / "out/synthetic.basic.linear.summary.json").string(), "--out",
                        (dir / "from").string()});
  CHECK(from.status == 0);
  CHECK(std::filesystem::exists(dir / "from/synthetic.basic.tagger"));
}
