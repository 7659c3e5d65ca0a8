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
#include <set>

#include "fotag/dataset.hpp"
#include "fotag/random.hpp"
#include "test_support.hpp"

using namespace fotag;
using testing::code_of;

namespace {

std::vector<Sample> fixture() { return load_dataset(testing::source_dir() / "data" / "fixture.tsv"); }

std::vector<int> balanced(std::size_t per_class, int classes) {
  std::vector<int> out;
  for (int c = 0; c < classes; ++c) out.insert(out.end(), per_class, c);
  return out;
}

}  // namespace

TEST_CASE("FO class names round trip and parse case-insensitively") {
  for (FoClass c : kAllFoClasses) {
    CHECK(parse_fo_class(canonical_name(c)) == c);
    CHECK(fo_class_from_index(index_of(c)) == c);
  }
  CHECK(parse_fo_class("socially-constructed-person") == FoClass::SociallyConstructedPerson);
  CHECK(parse_fo_class("GEOGRAPHICAL-OBJECT") == FoClass::GeographicalObject);
  CHECK_FALSE(parse_fo_class("Geographical").has_value());
  CHECK(code_of([] { fo_class_from_index(6); }) == ErrorCode::UnknownLabel);
}

TEST_CASE("table rows load with their labels") {
  const auto rows = parse_dataset(
      "word\tsentence\tlabel\n"
      "Baby\tThe baby began to cry again.\tSocially-constructed-person\n"
      "Ventricle\tInserted into the heart's left ventricle\tBiological-Object\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].label == FoClass::SociallyConstructedPerson);
  CHECK(rows[0].occurrence == 4);
  CHECK_FALSE(rows[0].exact_case);
  CHECK(rows[1].label == FoClass::BiologicalObject);
  CHECK(rows[1].sentence == "Inserted into the heart's left ventricle");
}

TEST_CASE("header-only file is an empty dataset") {
  CHECK(parse_dataset("word\tsentence\tlabel\n").empty());
}

TEST_CASE("dataset errors carry line numbers") {
  SUBCASE("unknown label") {
    try {
      parse_dataset("word\tsentence\tlabel\ncar\tA car.\tVehicle\n");
      FAIL("expected UnknownLabel");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownLabel);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("wrong field count") {
    try {
      parse_dataset("word\tsentence\tlabel\ncar\tA car.\tCognitive-event\nbad row\n");
      FAIL("expected MalformedRow");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MalformedRow);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("word absent from sentence") {
    CHECK(code_of([] { parse_dataset("word\tsentence\tlabel\nbus\tA car.\tCognitive-event\n"); }) ==
          ErrorCode::WordNotInSentence);
  }
  SUBCASE("missing header") { CHECK(code_of([] { parse_dataset(""); }) == ErrorCode::MalformedRow); }
  SUBCASE("missing file") {
    CHECK(code_of([] { load_dataset("/nonexistent/fotag.tsv"); }) == ErrorCode::IoError);
  }
}

TEST_CASE("occurrence resolution") {
  const Sample s = make_sample("the", "The cat saw the dog.", FoClass::CognitiveEvent);
  CHECK(s.occurrence == 0);
  CHECK_FALSE(s.exact_case);
  CHECK(s.ambiguous);
  const Sample t = make_sample("cat", "The cat saw the dog.", FoClass::CognitiveEvent);
  CHECK(t.occurrence == 4);
  CHECK(t.exact_case);
  CHECK_FALSE(t.ambiguous);
  CHECK(code_of([] { make_sample("", "x", FoClass::CognitiveEvent); }) == ErrorCode::MalformedRow);
}

TEST_CASE("escaped fields survive a save/load round trip") {
  testing::TempDir dir("dataset");
  std::vector<Sample> samples = fixture();
  samples.push_back(make_sample("tab", "a\ttab and a back\\slash\nnewline", FoClass::InformationObject));
  save_dataset(dir / "out.tsv", samples);
  CHECK(load_dataset(dir / "out.tsv") == samples);
  CHECK(unescape_field(escape_field("x\ty\\n\r")) == "x\ty\\n\r");
}

TEST_CASE("fixture holds two samples per class") {
  const auto samples = fixture();
  REQUIRE(samples.size() == 12);
  std::vector<int> counts(kNumFoClasses, 0);
  for (const auto& s : samples) ++counts[static_cast<std::size_t>(index_of(s.label))];
  for (int c : counts) CHECK(c == 2);
}

TEST_CASE("derive_binary duplicates each sample") {
  const auto samples = fixture();
  const auto binary = derive_binary(samples, 11);
  REQUIRE(binary.size() == 24);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const BinarySample& good = binary[2 * i];
    const BinarySample& bad = binary[2 * i + 1];
    CHECK(good.label == BinaryLabel::Correct);
    CHECK(good.candidate == samples[i].label);
    CHECK(bad.label == BinaryLabel::Incorrect);
    CHECK(bad.candidate != samples[i].label);
    CHECK(bad.truth == samples[i].label);
    CHECK(bad.word == samples[i].word);
  }
  CHECK(derive_binary(samples, 11) == binary);
  CHECK(derive_binary({}, 3).empty());

  const std::vector<Sample> one{make_sample("trusted", "he trusted her", FoClass::CognitiveEvent)};
  const auto pair = derive_binary(one, 5);
  REQUIRE(pair.size() == 2);
  CHECK(pair[1].candidate != FoClass::CognitiveEvent);
}

TEST_CASE("derive_binary draws every wrong class") {
  std::vector<Sample> many(3000, make_sample("car", "a car", FoClass::NonAgentiveFunctionalObject));
  const auto binary = derive_binary(many, 99);
  std::vector<int> counts(kNumFoClasses, 0);
  for (std::size_t i = 1; i < binary.size(); i += 2) ++counts[static_cast<std::size_t>(index_of(binary[i].candidate))];
  CHECK(counts[static_cast<std::size_t>(index_of(FoClass::NonAgentiveFunctionalObject))] == 0);
  // 600 expected per wrong class; 5 sd of Binomial(3000, 1/5) is about 110.
  for (FoClass c : kAllFoClasses) {
    if (c == FoClass::NonAgentiveFunctionalObject) continue;
    CHECK(std::abs(counts[static_cast<std::size_t>(index_of(c))] - 600) < 110);
  }
}

TEST_CASE("binary TSV round trip") {
  testing::TempDir dir("binary");
  const auto binary = derive_binary(fixture(), 4);
  save_binary_dataset(dir / "b.tsv", binary);
  CHECK(load_binary_dataset(dir / "b.tsv") == binary);
  const auto idx = binary_indices(binary);
  CHECK(std::count(idx.begin(), idx.end(), 0) == 12);
}

TEST_CASE("split sizes match the probing configuration") {
  const Ratios probing{0.2, 0.2, 0.6};
  const auto basic = split(balanced(460, 6), probing, 1);
  CHECK(basic.train.size() == 552);
  CHECK(basic.validation.size() == 552);
  CHECK(basic.test.size() == 1656);
  const auto binary = split(balanced(2760, 2), probing, 1);
  CHECK(binary.train.size() == 1104);
  CHECK(binary.validation.size() == 1104);
  CHECK(binary.test.size() == 3312);

  const auto all_train = split(balanced(5, 2), Ratios{1.0, 0.0, 0.0}, 3);
  CHECK(all_train.train.size() == 10);
  CHECK(all_train.validation.empty());
  CHECK(all_train.test.empty());
}

TEST_CASE("split is a seeded partition") {
  const auto labels = balanced(50, 6);
  const auto a = split(labels, {0.6, 0.2, 0.2}, 8);
  CHECK(a == split(labels, {0.6, 0.2, 0.2}, 8));
  CHECK_FALSE(a == split(labels, {0.6, 0.2, 0.2}, 9));
  std::set<std::size_t> seen;
  for (const auto* part : {&a.train, &a.validation, &a.test}) {
    CHECK(std::is_sorted(part->begin(), part->end()));
    seen.insert(part->begin(), part->end());
  }
  CHECK(seen.size() == labels.size());
  CHECK(*seen.rbegin() == labels.size() - 1);
}

TEST_CASE("stratified split keeps every class near its share") {
  // Unequal class sizes: 7, 13, 29, 41 rows.
  std::vector<int> labels;
  const std::vector<int> sizes{7, 13, 29, 41};
  for (int c = 0; c < 4; ++c) labels.insert(labels.end(), static_cast<std::size_t>(sizes[static_cast<std::size_t>(c)]), c);
  const Ratios r{0.2, 0.2, 0.6};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = split(labels, r, seed, true);
    const auto unstrat = split(labels, r, seed, false);
    CHECK(s.train.size() == unstrat.train.size());
    CHECK(s.validation.size() == unstrat.validation.size());
    const std::array<const std::vector<std::size_t>*, 3> parts{&s.train, &s.validation, &s.test};
    for (int c = 0; c < 4; ++c) {
      for (std::size_t p = 0; p < 3; ++p) {
        const auto count = std::count_if(parts[p]->begin(), parts[p]->end(),
                                         [&](std::size_t i) { return labels[i] == c; });
        const double share = r[p] * sizes[static_cast<std::size_t>(c)];
        CHECK(std::abs(static_cast<double>(count) - share) < 1.0);
      }
    }
  }
}

TEST_CASE("split rejects bad input") {
  CHECK(code_of([] { split(std::vector<int>{}, {0.2, 0.2, 0.6}, 1); }) == ErrorCode::EmptyDataset);
  CHECK(code_of([] { split(std::vector<int>{0, 1}, {0.5, 0.5, 0.5}, 1); }) == ErrorCode::BadRatios);
  CHECK(code_of([] { split(std::vector<int>{0, 1}, {-0.5, 1.0, 0.5}, 1); }) == ErrorCode::BadRatios);
}

TEST_CASE("apportion uses largest remainders") {
  const std::vector<double> w{0.2, 0.2, 0.6};
  CHECK(apportion(2760, w) == std::vector<std::size_t>{552, 552, 1656});
  CHECK(apportion(10, w) == std::vector<std::size_t>{2, 2, 6});
  const std::vector<double> thirds{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const auto parts = apportion(10, thirds);
  CHECK(parts[0] + parts[1] + parts[2] == 10);
}

TEST_CASE("split files round trip") {
  testing::TempDir dir("split");
  const auto s = split(balanced(10, 3), {0.2, 0.2, 0.6}, 5);
  save_split(dir / "split.json", s);
  CHECK(load_split(dir / "split.json") == s);
}

TEST_CASE("control labels") {
  CHECK(make_control_labels(0, 6, 1).labels.empty());
  const auto a = make_control_labels(6000, 6, 7);
  CHECK(a.labels == make_control_labels(6000, 6, 7).labels);
  CHECK(a.label_set_size == 6);
  // Binomial(6000, 1/6): mean 1000, 5 standard deviations either side.
  const double half_width = 5.0 * std::sqrt(6000.0 * (1.0 / 6.0) * (5.0 / 6.0));
  for (int c = 0; c < 6; ++c) {
    const auto count = static_cast<double>(std::count(a.labels.begin(), a.labels.end(), c));
    CHECK(count >= 1000.0 - half_width);
    CHECK(count <= 1000.0 + half_width);
  }
  CHECK(code_of([] { make_control_labels(10, 1, 1); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("rng is reproducible and bounded") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.below(7) < 7);
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / 20000.0) < 0.05);
  CHECK(std::abs(sq / 20000.0 - 1.0) < 0.05);
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(derive_seed(1, 1) == derive_seed(1, 1));
}
