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

#include "fotag/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fotag/error.hpp"
#include "fotag/random.hpp"

namespace fotag {
namespace {

constexpr double kIntegerSnap = 1e-9;

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

/// Rows of a TSV with a header, already unescaped, tagged with line numbers.
struct Table {
  std::vector<std::string> header;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;

  [[nodiscard]] std::size_t column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorCode::MalformedRow, "line 1: header is missing column '" +
                                               std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  }
};

Table parse_table(std::string_view text) {
  Table table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    for (auto& f : fields) f = unescape_field(f);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(ErrorCode::MalformedRow,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    table.rows.emplace_back(line_no, std::move(fields));
  }
  if (!have_header) throw Error(ErrorCode::MalformedRow, "line 1: missing header row");
  return table;
}

FoClass parse_class_or_throw(const std::string& text, std::size_t line_no) {
  if (auto c = parse_fo_class(text)) return *c;
  throw Error(ErrorCode::UnknownLabel,
              "line " + std::to_string(line_no) + ": unknown label '" + text + "'");
}

template <typename Fn>
auto with_line(std::size_t line_no, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), "line " + std::to_string(line_no) + ": " +
                              std::string(e.what()).substr(to_string(e.code()).size() + 2));
  }
}

void check_ratios(const Ratios& ratios) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0)) throw Error(ErrorCode::BadRatios, "ratios must be non-negative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::BadRatios, "ratios must sum to 1");
}

// Integer part of x, treating values within kIntegerSnap of an integer as exact.
std::pair<std::size_t, bool> floor_snapped(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= kIntegerSnap) return {static_cast<std::size_t>(nearest), false};
  return {static_cast<std::size_t>(std::floor(x)), true};
}

/// Controlled rounding of the class x part table: every cell is the floor or
/// ceiling of its quota, rows sum to class sizes and columns to part sizes.
/// Solved as a max-flow over the fractional cells.
std::vector<std::array<std::size_t, 3>> round_table(const std::vector<std::size_t>& class_sizes,
                                                    const Ratios& ratios,
                                                    const std::vector<std::size_t>& part_sizes) {
  const std::size_t rows = class_sizes.size();
  std::vector<std::array<std::size_t, 3>> cells(rows);
  std::vector<std::array<bool, 3>> fractional(rows);
  std::vector<std::size_t> row_need(rows);
  std::array<long long, 3> col_need{};
  for (std::size_t j = 0; j < 3; ++j) col_need[j] = static_cast<long long>(part_sizes[j]);
  for (std::size_t c = 0; c < rows; ++c) {
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      auto [fl, frac] = floor_snapped(static_cast<double>(class_sizes[c]) * ratios[j]);
      cells[c][j] = fl;
      fractional[c][j] = frac;
      assigned += fl;
      col_need[j] -= static_cast<long long>(fl);
    }
    row_need[c] = class_sizes[c] - assigned;
  }

  // Augmenting paths on source -> class -> part -> sink; unit capacity on the
  // middle edges, so each augmentation moves one unit.
  std::vector<std::array<int, 3>> flow(rows, std::array<int, 3>{});
  std::size_t pending = std::accumulate(row_need.begin(), row_need.end(), std::size_t{0});
  std::vector<std::size_t> row_left = row_need;
  while (pending > 0) {
    // BFS over class nodes [0, rows) and part nodes [rows, rows + 3).
    const std::size_t nodes = rows + 3;
    std::vector<long long> parent(nodes, -1);
    std::vector<std::size_t> queue;
    for (std::size_t c = 0; c < rows; ++c) {
      if (row_left[c] > 0) {
        parent[c] = static_cast<long long>(nodes);  // source marker
        queue.push_back(c);
      }
    }
    std::optional<std::size_t> sink_part;
    for (std::size_t qi = 0; qi < queue.size() && !sink_part; ++qi) {
      const std::size_t u = queue[qi];
      if (u < rows) {
        for (std::size_t j = 0; j < 3; ++j) {
          const std::size_t v = rows + j;
          if (parent[v] == -1 && fractional[u][j] && flow[u][j] == 0) {
            parent[v] = static_cast<long long>(u);
            if (col_need[j] > 0) {
              sink_part = j;
              break;
            }
            queue.push_back(v);
          }
        }
      } else {
        const std::size_t j = u - rows;
        for (std::size_t c = 0; c < rows; ++c) {
          if (parent[c] == -1 && flow[c][j] == 1) {
            parent[c] = static_cast<long long>(u);
            queue.push_back(c);
          }
        }
      }
    }
    if (!sink_part) throw std::logic_error("stratified split: rounding table infeasible");
    --col_need[*sink_part];
    std::size_t v = rows + *sink_part;
    while (true) {
      const auto u = static_cast<std::size_t>(parent[v]);
      if (v >= rows) {
        flow[u][v - rows] = 1;  // class u -> part
        v = u;
      } else if (u == nodes) {
        --row_left[v];
        break;
      } else {
        flow[v][u - rows] = 0;  // undo part u <- class v
        v = u;
      }
    }
    --pending;
  }
  for (std::size_t c = 0; c < rows; ++c) {
    for (std::size_t j = 0; j < 3; ++j) cells[c][j] += static_cast<std::size_t>(flow[c][j]);
  }
  return cells;
}

}  // namespace

Sample make_sample(std::string word, std::string sentence, FoClass label) {
  if (word.empty()) throw Error(ErrorCode::MalformedRow, "empty word");
  if (sentence.empty()) throw Error(ErrorCode::MalformedRow, "empty sentence");
  const std::string lw = ascii_lower(word);
  const std::string ls = ascii_lower(sentence);
  const std::size_t pos = ls.find(lw);
  if (pos == std::string::npos) {
    throw Error(ErrorCode::WordNotInSentence, "'" + word + "' not found in '" + sentence + "'");
  }
  Sample s;
  s.exact_case = sentence.compare(pos, word.size(), word) == 0;
  s.ambiguous = ls.find(lw, pos + 1) != std::string::npos;
  s.occurrence = pos;
  s.word = std::move(word);
  s.sentence = std::move(sentence);
  s.label = label;
  return s;
}

std::string_view canonical_name(BinaryLabel label) noexcept {
  return label == BinaryLabel::Correct ? "Correct" : "Incorrect";
}

std::string escape_field(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char ch : raw) {
    switch (ch) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string unescape_field(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    const char ch = escaped[i];
    if (ch != '\\' || i + 1 == escaped.size()) {
      out += ch;
      continue;
    }
    switch (escaped[++i]) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case '\\': out += '\\'; break;
      default:
        out += '\\';
        out += escaped[i];
    }
  }
  return out;
}

std::vector<Sample> parse_dataset(std::string_view text) {
  const Table table = parse_table(text);
  const std::size_t wc = table.column("word");
  const std::size_t sc = table.column("sentence");
  const std::size_t lc = table.column("label");
  std::vector<Sample> samples;
  samples.reserve(table.rows.size());
  for (const auto& [line_no, f] : table.rows) {
    const FoClass label = parse_class_or_throw(f[lc], line_no);
    samples.push_back(with_line(line_no, [&] { return make_sample(f[wc], f[sc], label); }));
  }
  return samples;
}

std::vector<Sample> load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_text(path));
}

std::string format_dataset(std::span<const Sample> samples) {
  std::string out = "word\tsentence\tlabel\n";
  for (const Sample& s : samples) {
    out += escape_field(s.word) + '\t' + escape_field(s.sentence) + '\t' +
           std::string(canonical_name(s.label)) + '\n';
  }
  return out;
}

void save_dataset(const std::filesystem::path& path, std::span<const Sample> samples) {
  write_text(path, format_dataset(samples));
}

std::vector<BinarySample> load_binary_dataset(const std::filesystem::path& path) {
  const Table table = parse_table(read_text(path));
  const std::size_t wc = table.column("word");
  const std::size_t sc = table.column("sentence");
  const std::size_t lc = table.column("label");
  const std::size_t cc = table.column("candidate");
  const std::size_t bc = table.column("binary_label");
  std::vector<BinarySample> out;
  out.reserve(table.rows.size());
  for (const auto& [line_no, f] : table.rows) {
    BinarySample b;
    const FoClass truth = parse_class_or_throw(f[lc], line_no);
    const Sample base = with_line(line_no, [&] { return make_sample(f[wc], f[sc], truth); });
    b.word = base.word;
    b.sentence = base.sentence;
    b.truth = base.label;
    b.candidate = parse_class_or_throw(f[cc], line_no);
    if (f[bc] == "Correct") {
      b.label = BinaryLabel::Correct;
    } else if (f[bc] == "Incorrect") {
      b.label = BinaryLabel::Incorrect;
    } else {
      throw Error(ErrorCode::UnknownLabel,
                  "line " + std::to_string(line_no) + ": unknown binary label '" + f[bc] + "'");
    }
    if ((b.label == BinaryLabel::Correct) != (b.candidate == b.truth)) {
      throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) +
                                               ": binary label disagrees with candidate/truth");
    }
    out.push_back(std::move(b));
  }
  return out;
}

void save_binary_dataset(const std::filesystem::path& path, std::span<const BinarySample> samples) {
  std::string out = "word\tsentence\tlabel\tcandidate\tbinary_label\n";
  for (const BinarySample& s : samples) {
    out += escape_field(s.word) + '\t' + escape_field(s.sentence) + '\t' +
           std::string(canonical_name(s.truth)) + '\t' + std::string(canonical_name(s.candidate)) +
           '\t' + std::string(canonical_name(s.label)) + '\n';
  }
  write_text(path, out);
}

std::vector<BinarySample> derive_binary(std::span<const Sample> samples, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<BinarySample> out;
  out.reserve(2 * samples.size());
  for (const Sample& s : samples) {
    out.push_back({s.word, s.sentence, s.label, s.label, BinaryLabel::Correct});
    // Draw among the five other classes: skip over the true index.
    auto pick = static_cast<int>(rng.below(kNumFoClasses - 1));
    if (pick >= index_of(s.label)) ++pick;
    out.push_back({s.word, s.sentence, static_cast<FoClass>(pick), s.label, BinaryLabel::Incorrect});
  }
  return out;
}

std::vector<int> class_indices(std::span<const Sample> samples) {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) out.push_back(index_of(s.label));
  return out;
}

std::vector<int> binary_indices(std::span<const BinarySample> samples) {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const BinarySample& s : samples) out.push_back(static_cast<int>(s.label));
  return out;
}

std::vector<std::size_t> apportion(std::size_t total, std::span<const double> weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> out(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const double quota = sum > 0.0 ? static_cast<double>(total) * weights[j] / sum : 0.0;
    auto [fl, frac] = floor_snapped(quota);
    out[j] = fl;
    assigned += fl;
    remainders.emplace_back(frac ? quota - static_cast<double>(fl) : 0.0, j);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) {
    ++out[remainders[k % remainders.size()].second];
  }
  return out;
}

SplitAssignment split(std::span<const int> labels, const Ratios& ratios, std::uint64_t seed,
                      bool stratified) {
  if (labels.empty()) throw Error(ErrorCode::EmptyDataset, "cannot split an empty dataset");
  check_ratios(ratios);
  const std::size_t n = labels.size();
  const std::vector<std::size_t> totals = apportion(n, ratios);

  SplitAssignment out;
  out.seed = seed;
  out.ratios = ratios;
  std::array<std::vector<std::size_t>*, 3> parts = {&out.train, &out.validation, &out.test};
  Rng rng(seed);

  if (!stratified) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span(order));
    std::size_t k = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      parts[j]->assign(order.begin() + static_cast<std::ptrdiff_t>(k),
                       order.begin() + static_cast<std::ptrdiff_t>(k + totals[j]));
      k += totals[j];
    }
  } else {
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[labels[i]].push_back(i);
    std::vector<std::size_t> sizes;
    for (const auto& [label, members] : groups) sizes.push_back(members.size());
    const auto table = round_table(sizes, ratios, totals);
    std::size_t c = 0;
    for (auto& [label, members] : groups) {
      rng.shuffle(std::span(members));
      std::size_t k = 0;
      for (std::size_t j = 0; j < 3; ++j) {
        parts[j]->insert(parts[j]->end(), members.begin() + static_cast<std::ptrdiff_t>(k),
                         members.begin() + static_cast<std::ptrdiff_t>(k + table[c][j]));
        k += table[c][j];
      }
      ++c;
    }
  }
  for (auto* part : parts) std::sort(part->begin(), part->end());
  return out;
}

ControlLabels make_control_labels(std::size_t n, int label_set_size, std::uint64_t seed) {
  if (label_set_size < 2) throw Error(ErrorCode::InvalidConfig, "label set needs at least 2 labels");
  ControlLabels out;
  out.seed = seed;
  out.label_set_size = label_set_size;
  out.labels.reserve(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    out.labels.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(label_set_size))));
  }
  return out;
}

void save_split(const std::filesystem::path& path, const SplitAssignment& split) {
  nlohmann::json j;
  j["seed"] = split.seed;
  j["ratios"] = split.ratios;
  j["train"] = split.train;
  j["validation"] = split.validation;
  j["test"] = split.test;
  write_text(path, j.dump() + "\n");
}

SplitAssignment load_split(const std::filesystem::path& path) {
  SplitAssignment s;
  try {
    const auto j = nlohmann::json::parse(read_text(path));
    s.seed = j.at("seed").get<std::uint64_t>();
    s.ratios = j.at("ratios").get<Ratios>();
    s.train = j.at("train").get<std::vector<std::size_t>>();
    s.validation = j.at("validation").get<std::vector<std::size_t>>();
    s.test = j.at("test").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRow, path.string() + ": " + e.what());
  }
  return s;
}

}  // namespace fotag
