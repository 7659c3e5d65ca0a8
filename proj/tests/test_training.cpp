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
#include <cmath>

#include "fotag/random.hpp"
#include "fotag/synthetic.hpp"
#include "fotag/training.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fotag;
using testing::code_of;

namespace {

Matrix<double> random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  Matrix<double> m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

struct Blobs {
  Matrix<double> x;
  std::vector<int> y;
};

Blobs blobs(std::size_t n, int classes, double separation, std::uint64_t seed, std::size_t d = 8) {
  Blobs b;
  b.y = balanced_labels(n, classes, seed);
  b.x = planted_embeddings(b.y, d, classes, separation, 1.0, derive_seed(seed, 9)).cast<double>();
  return b;
}

double relative_error(const Matrix<double>& a, const Matrix<double>& b) {
  return (a - b).norm() / std::max(1e-12, std::max(a.norm(), b.norm()));
}

}  // namespace

TEST_CASE("linear data-loss gradient matches finite differences") {
  Rng rng(31);
  LinearProbe<double> p(4, 6);
  p.weight = random_matrix(4, 6, rng);
  p.bias = random_matrix(4, 1, rng);
  const Matrix<double> x = random_matrix(9, 6, rng);
  std::vector<int> y;
  for (int i = 0; i < 9; ++i) y.push_back(static_cast<int>(rng.below(4)));
  const auto lg = data_loss_gradient(p, x, y);
  const Matrix<double> fd = oracle::finite_difference(
      [&](const Eigen::MatrixXd& w) { return oracle::linear_loss(w, p.bias, x, y); }, p.weight, 1e-6);
  CHECK(relative_error(lg.gradient.weight, fd) < 1e-4);
  const Matrix<double> fdb = oracle::finite_difference(
      [&](const Eigen::MatrixXd& b) { return oracle::linear_loss(p.weight, b, x, y); }, p.bias, 1e-6);
  CHECK(relative_error(lg.gradient.bias, fdb) < 1e-4);
}

TEST_CASE("mlp data-loss gradient matches finite differences") {
  Rng rng(32);
  MlpProbe<double> p(3, 5, 7);
  p.hidden_weight = random_matrix(7, 5, rng);
  p.hidden_bias = random_matrix(7, 1, rng, 0.5);
  p.output_weight = random_matrix(3, 7, rng);
  p.output_bias = random_matrix(3, 1, rng);
  const Matrix<double> x = random_matrix(8, 5, rng);
  std::vector<int> y;
  for (int i = 0; i < 8; ++i) y.push_back(static_cast<int>(rng.below(3)));
  const auto lg = data_loss_gradient(p, x, y);
  const auto loss = [&](const MlpProbe<double>& q) {
    return oracle::mlp_loss(q.hidden_weight, q.hidden_bias, q.output_weight, q.output_bias, x, y);
  };
  CHECK(std::abs(lg.loss - loss(p)) < 1e-10);
  MlpProbe<double> q = p;
  CHECK(relative_error(lg.gradient.hidden_weight,
                       oracle::finite_difference([&](const Eigen::MatrixXd& m) { q.hidden_weight = m; return loss(q); },
                                                 p.hidden_weight, 1e-6)) < 1e-4);
  q = p;
  CHECK(relative_error(lg.gradient.output_weight,
                       oracle::finite_difference([&](const Eigen::MatrixXd& m) { q.output_weight = m; return loss(q); },
                                                 p.output_weight, 1e-6)) < 1e-4);
  q = p;
  CHECK(relative_error(lg.gradient.hidden_bias,
                       oracle::finite_difference([&](const Eigen::MatrixXd& m) { q.hidden_bias = m; return loss(q); },
                                                 p.hidden_bias, 1e-6)) < 1e-4);
}

TEST_CASE("train config validation") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.epochs = 0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidConfig);
  c = TrainConfig{};
  c.batch_size = 0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidConfig);
  c = TrainConfig{};
  c.lambda = -1.0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidConfig);
  c = TrainConfig{};
  c.learning_rate = 0.0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidConfig);
  CHECK(TrainConfig::defaults_for(ProbeFamily::Mlp).epochs == 25);
  CHECK(TrainConfig::defaults_for(ProbeFamily::Linear).batch_size == 128);
}

TEST_CASE("initialisation stays inside the fan-in bound") {
  const AnyProbe p = initialize_probe({ProbeFamily::Mlp, 6, 16}, 25, 3);
  const auto& m = std::get<MlpProbe<double>>(p);
  CHECK(m.hidden_weight.cwiseAbs().maxCoeff() <= 1.0 / 5.0);
  CHECK(m.output_weight.cwiseAbs().maxCoeff() <= 1.0 / 4.0);
  CHECK(m.hidden_weight.cwiseAbs().maxCoeff() > 0.0);
  CHECK(code_of([] { initialize_probe({ProbeFamily::Linear, 1, 0}, 3, 1); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("separable two-class blobs are learned by both families") {
  const Blobs train = blobs(400, 2, 8.0, 1);
  const Blobs val = blobs(400, 2, 8.0, 2);
  for (ProbeFamily f : {ProbeFamily::Linear, ProbeFamily::Mlp}) {
    TrainConfig c = TrainConfig::defaults_for(f);
    c.seed = 4;
    const TrainedProbe t = train_probe({f, 2, 32}, {train.x, train.y}, {val.x, val.y}, c);
    CHECK(evaluate_accuracy(t.probe, {val.x, val.y}) >= 0.99);
    CHECK(t.train_losses.size() == 25);
    CHECK(t.validation_losses.size() == 25);
    CHECK(t.train_losses.back() < t.train_losses.front());
  }
}

TEST_CASE("shuffled labels stay at chance") {
  const Blobs train = blobs(552, 6, 6.0, 5, 64);
  Blobs val = blobs(552, 6, 6.0, 6, 64);
  Rng rng(77);
  std::vector<int> shuffled = val.y;
  rng.shuffle(std::span<int>(shuffled));
  std::vector<int> train_shuffled = train.y;
  rng.shuffle(std::span<int>(train_shuffled));
  TrainConfig c;
  c.seed = 2;
  const TrainedProbe t = train_probe({ProbeFamily::Linear, 6, 0}, {train.x, train_shuffled}, {val.x, shuffled}, c);
  const double acc = evaluate_accuracy(t.probe, {val.x, shuffled});
  CHECK(acc > 0.17 - 0.06);
  CHECK(acc < 0.17 + 0.06);
}

TEST_CASE("training is deterministic given the seed") {
  const Blobs train = blobs(300, 3, 3.0, 8);
  TrainConfig c;
  c.seed = 10;
  c.lambda = 0.01;
  const Blobs none{Matrix<double>(0, 8), {}};
  const TrainedProbe a = train_probe({ProbeFamily::Linear, 3, 0}, {train.x, train.y}, {none.x, none.y}, c);
  const TrainedProbe b = train_probe({ProbeFamily::Linear, 3, 0}, {train.x, train.y}, {none.x, none.y}, c);
  CHECK(flatten_parameters(a.probe) == flatten_parameters(b.probe));
  CHECK(a.train_losses == b.train_losses);
  CHECK(a.validation_losses.empty());
  c.seed = 11;
  const TrainedProbe d = train_probe({ProbeFamily::Linear, 3, 0}, {train.x, train.y}, {none.x, none.y}, c);
  CHECK(flatten_parameters(a.probe) != flatten_parameters(d.probe));
}

TEST_CASE("complexity is the nuclear norm or the hidden size") {
  const Blobs train = blobs(120, 3, 3.0, 12);
  TrainConfig c;
  c.epochs = 3;
  const TrainedProbe lin = train_probe({ProbeFamily::Linear, 3, 0}, {train.x, train.y}, {train.x, train.y}, c);
  CHECK(lin.complexity == doctest::Approx(oracle::nuclear_norm(std::get<LinearProbe<double>>(lin.probe).weight)));
  const TrainedProbe mlp = train_probe({ProbeFamily::Mlp, 3, 9}, {train.x, train.y}, {train.x, train.y}, c);
  CHECK(mlp.complexity == 9.0);
}

TEST_CASE("minimum-validation-loss checkpoint") {
  // Noisy labels with a large step size make validation loss rise after a
  // few epochs, so the selected epoch differs from the last one.
  const Blobs train = blobs(120, 3, 1.0, 13, 30);
  const Blobs val = blobs(300, 3, 1.0, 14, 30);
  TrainConfig c;
  c.learning_rate = 0.5;
  c.epochs = 40;
  c.batch_size = 16;
  c.checkpoint = CheckpointRule::MinValidationLoss;
  const TrainedProbe t = train_probe({ProbeFamily::Mlp, 3, 64}, {train.x, train.y}, {val.x, val.y}, c);
  const auto best = std::min_element(t.validation_losses.begin(), t.validation_losses.end());
  CHECK(t.selected_epoch == static_cast<int>(best - t.validation_losses.begin()) + 1);
  CHECK(validation_loss(t.probe, {val.x, val.y}) == doctest::Approx(*best).epsilon(1e-12));
  for (double l : t.validation_losses) CHECK(validation_loss(t.probe, {val.x, val.y}) <= l + 1e-12);
}

TEST_CASE("divergence is reported") {
  const Blobs train = blobs(60, 2, 3.0, 15);
  TrainConfig c;
  c.learning_rate = 1e200;
  c.epochs = 5;
  CHECK(code_of([&] { train_probe({ProbeFamily::Mlp, 2, 4}, {train.x, train.y}, {train.x, train.y}, c); }) ==
        ErrorCode::NonFiniteLoss);
}

TEST_CASE("misaligned inputs are rejected") {
  const Blobs train = blobs(60, 2, 3.0, 16);
  std::vector<int> short_labels(train.y.begin(), train.y.end() - 1);
  CHECK(code_of([&] {
          train_probe({ProbeFamily::Linear, 2, 0}, {train.x, short_labels}, {train.x, train.y}, TrainConfig{});
        }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("accuracy of fixed predictors") {
  LinearProbe<double> constant(6, 2);
  constant.bias(3) = 1.0;
  Matrix<double> x = Matrix<double>::Zero(60, 2);
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) y.push_back(i % 6);
  CHECK(evaluate_accuracy(AnyProbe{constant}, {x, y}) == doctest::Approx(1.0 / 6.0));
  std::vector<int> all_three(60, 3);
  CHECK(evaluate_accuracy(AnyProbe{constant}, {x, all_three}) == 1.0);
}

TEST_CASE("parameters flatten and persist") {
  testing::TempDir dir("probe");
  const Blobs train = blobs(90, 3, 3.0, 17);
  TrainConfig c;
  c.epochs = 2;
  for (ProbeFamily f : {ProbeFamily::Linear, ProbeFamily::Mlp}) {
    TrainedProbe t = train_probe({f, 3, 5}, {train.x, train.y}, {train.x, train.y}, c);
    const ProbeShape shape{f, 3, f == ProbeFamily::Mlp ? 5 : 0};
    const auto flat = flatten_parameters(t.probe);
    CHECK(flat.size() == parameter_count(shape, 8));
    round_to_float(t.probe);
    CHECK(flatten_parameters(unflatten_parameters(shape, 8, flat)) == flat);
    save_probe(dir / "p.bin", t);
    const TrainedProbe back = load_probe(dir / "p.bin");
    CHECK(flatten_parameters(back.probe) == flat);
    CHECK(back.train_losses == t.train_losses);
    CHECK(family_of(back.probe) == f);
  }
  testing::write_file(dir / "junk.bin", "FOPRB1\n{}\n");
  CHECK(code_of([&] { load_probe(dir / "junk.bin"); }) == ErrorCode::CorruptModel);
}
