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

#include <cmath>

#include "fotag/report.hpp"
#include "fotag/sweep.hpp"
#include "fotag/synthetic.hpp"
#include "test_support.hpp"

using namespace fotag;
using testing::code_of;

TEST_CASE("linear schedule") {
  const auto s = make_linear_schedule(0.01, 1.0, 3);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == 0.01);
  CHECK(s[1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s[2] == 1.0);
  CHECK(make_linear_schedule(0.5, 0.5, 1) == std::vector<double>{0.5});

  const auto full = make_linear_schedule(1e-4, 10.0, 50);
  REQUIRE(full.size() == 50);
  CHECK(full.front() == 1e-4);
  CHECK(full.back() == 10.0);
  const double ratio = std::pow(10.0 / 1e-4, 1.0 / 49.0);
  for (std::size_t i = 1; i < full.size(); ++i) {
    CHECK(full[i] > full[i - 1]);
    CHECK(std::abs(full[i] / full[i - 1] - ratio) < 1e-9);
  }
  CHECK(code_of([] { make_linear_schedule(0.0, 1.0, 3); }) == ErrorCode::BadRange);
  CHECK(code_of([] { make_linear_schedule(2.0, 1.0, 3); }) == ErrorCode::BadRange);
  CHECK(code_of([] { make_linear_schedule(0.1, 1.0, 1); }) == ErrorCode::BadRange);
}

TEST_CASE("mlp schedule") {
  CHECK(make_mlp_schedule(2, 16, 4) == std::vector<int>{2, 4, 8, 16});
  CHECK(make_mlp_schedule(5, 5, 1) == std::vector<int>{5});
  const auto s = make_mlp_schedule(4, 1024, 50);
  REQUIRE(s.size() == 50);
  CHECK(s.front() == 4);
  CHECK(s.back() == 1024);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
  const auto tight = make_mlp_schedule(1, 3, 5);
  CHECK(tight.front() == 1);
  CHECK(tight.back() == 3);
  for (std::size_t i = 1; i < tight.size(); ++i) CHECK(tight[i] >= tight[i - 1]);
  CHECK(code_of([] { make_mlp_schedule(0, 4, 3); }) == ErrorCode::BadRange);
}

TEST_CASE("sweep config validation") {
  SweepConfig c = SweepConfig::defaults_for(ProbeFamily::Linear);
  CHECK(c.n_probes == 50);
  CHECK_NOTHROW(c.validate());
  c.lambda_min = 20.0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::BadRange);
  c = SweepConfig::defaults_for(ProbeFamily::Mlp);
  c.hidden_min = 0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::BadRange);
}

namespace {

struct Fixture {
  std::vector<int> labels;
  EmbeddingMatrix x;
  std::vector<int> control;
  SplitAssignment parts;
};

Fixture small_fixture(std::size_t n = 240) {
  Fixture f;
  f.labels = balanced_labels(n, 6, 1);
  f.x = planted_embeddings(f.labels, 16, 6, 6.0, 1.0, 2);
  f.control = make_control_labels(n, 6, 3).labels;
  f.parts = split(f.labels, {0.4, 0.2, 0.4}, 4);
  return f;
}

}  // namespace

TEST_CASE("small sweep produces one record per point") {
  const Fixture f = small_fixture();
  for (ProbeFamily family : {ProbeFamily::Linear, ProbeFamily::Mlp}) {
    SweepConfig c = SweepConfig::defaults_for(family);
    c.n_probes = 2;
    c.train.epochs = 5;
    c.task_id = "basic";
    c.model_id = "m";
    const SweepResult r = run_sweep(c, f.x, f.labels, f.control, f.parts);
    REQUIRE(r.records.size() == 2);
    CHECK(r.records[0].index == 0);
    CHECK(r.records[1].index == 1);
    for (const auto& rec : r.records) {
      CHECK_FALSE(rec.failed);
      CHECK(rec.selectivity == doctest::Approx(rec.aux_accuracy - rec.control_accuracy));
    }
    if (family == ProbeFamily::Mlp) {
      CHECK(r.records[0].schedule_value == 4.0);
      CHECK(r.records[1].realized_complexity == 1024.0);
    } else {
      CHECK(r.records[0].schedule_value == 1e-4);
      CHECK(r.records[1].schedule_value == 10.0);
    }
  }
}

TEST_CASE("zero-lambda point is prepended on request") {
  const Fixture f = small_fixture();
  SweepConfig c = SweepConfig::defaults_for(ProbeFamily::Linear);
  c.n_probes = 3;
  c.train.epochs = 2;
  c.include_zero_lambda = true;
  const SweepResult r = run_sweep(c, f.x, f.labels, f.control, f.parts);
  REQUIRE(r.records.size() == 4);
  CHECK(r.records[0].schedule_value == 0.0);
}

TEST_CASE("job count does not change results") {
  const Fixture f = small_fixture();
  SweepConfig c = SweepConfig::defaults_for(ProbeFamily::Mlp);
  c.n_probes = 6;
  c.hidden_max = 64;
  c.train.epochs = 3;
  const SweepResult one = run_sweep(c, f.x, f.labels, f.control, f.parts);
  c.jobs = 3;
  const SweepResult three = run_sweep(c, f.x, f.labels, f.control, f.parts);
  CHECK(format_sweep_jsonl(one) == format_sweep_jsonl(three));
}

TEST_CASE("control accuracy averages several control sets") {
  const Fixture f = small_fixture();
  SweepConfig c = SweepConfig::defaults_for(ProbeFamily::Linear);
  c.n_probes = 2;
  c.train.epochs = 2;
  const std::vector<int> other = make_control_labels(f.labels.size(), 6, 99).labels;
  const SweepResult a = run_sweep(c, f.x, f.labels, f.control, f.parts);
  const SweepResult b = run_sweep(c, f.x, f.labels, other, f.parts);
  const std::vector<std::vector<int>> both{f.control, other};
  const SweepResult avg = run_sweep(c, f.x, f.labels, std::span<const std::vector<int>>(both), f.parts);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(avg.records[i].control_accuracy ==
          doctest::Approx((a.records[i].control_accuracy + b.records[i].control_accuracy) / 2));
    CHECK(avg.records[i].aux_accuracy == a.records[i].aux_accuracy);
  }
}

TEST_CASE("divergent probes become failed records") {
  const Fixture f = small_fixture();
  SweepConfig c = SweepConfig::defaults_for(ProbeFamily::Mlp);
  c.n_probes = 2;
  c.train.epochs = 3;
  c.train.learning_rate = 1e200;
  const SweepResult r = run_sweep(c, f.x, f.labels, f.control, f.parts);
  CHECK(r.failed_count() == 2);
  CHECK(code_of([&] { max_selectivity_point(r); }) == ErrorCode::AllProbesFailed);
}

TEST_CASE("misaligned sweep inputs") {
  const Fixture f = small_fixture();
  SweepConfig c = SweepConfig::defaults_for(ProbeFamily::Linear);
  c.n_probes = 2;
  std::vector<int> short_control(f.control.begin(), f.control.end() - 1);
  CHECK(code_of([&] { run_sweep(c, f.x, f.labels, short_control, f.parts); }) == ErrorCode::AlignmentError);
  std::vector<int> bad = f.labels;
  bad[0] = 6;
  CHECK(code_of([&] { run_sweep(c, f.x, bad, f.control, f.parts); }) == ErrorCode::AlignmentError);
  SplitAssignment partial = f.parts;
  partial.test.pop_back();
  CHECK(code_of([&] { run_sweep(c, f.x, f.labels, f.control, partial); }) == ErrorCode::AlignmentError);
}

TEST_CASE("sweep JSONL round trip") {
  testing::TempDir dir("sweep");
  SweepResult r;
  r.records.push_back({0, 1e-4, 3.25, 0.5, 0.25, 0.25, 0.5, 0.125, false});
  r.records.push_back({1, 0.1, 1.0 / 3.0, 0.0, 0.0, 0.0, 0.0, 0.0, true});
  write_sweep_jsonl(dir / "s.jsonl", r);
  CHECK(read_sweep_jsonl(dir / "s.jsonl") == r.records);
  const std::string text = testing::read_file(dir / "s.jsonl");
  CHECK(text.rfind("{\"index\":0,\"lambda_or_hidden\":0.0001,", 0) == 0);
}
