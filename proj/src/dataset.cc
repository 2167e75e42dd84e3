// Copyright 2026 The HARM Authors.
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

#include "harm/dataset.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace harm {

Dataset::Dataset(std::vector<Sample> samples, Origin origin)
    : samples_(std::move(samples)), origin_(origin) {
  if (!samples_.empty()) dim_ = samples_.front().x.size();
  for (const Sample& s : samples_) {
    if (s.x.size() != dim_) {
      throw ValidationError("dataset: samples differ in dimension");
    }
    if (s.y != 0 && s.y != 1) {
      throw ValidationError("dataset: label must be 0 or 1");
    }
    if (s.group && *s.group < 0) {
      throw ValidationError("dataset: negative group id");
    }
    if (s.aux && *s.aux != 0 && *s.aux != 1) {
      throw ValidationError("dataset: aux must be 0 or 1");
    }
  }
}

bool Dataset::has_groups() const {
  if (samples_.empty()) return false;
  for (const Sample& s : samples_) {
    if (!s.group) return false;
  }
  return true;
}

bool Dataset::has_aux() const {
  if (samples_.empty()) return false;
  for (const Sample& s : samples_) {
    if (!s.aux) return false;
  }
  return true;
}

std::vector<Label> Dataset::labels() const {
  std::vector<Label> out;
  out.reserve(samples_.size());
  for (const Sample& s : samples_) out.push_back(s.y);
  return out;
}

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  std::vector<Sample> rows;
  rows.reserve(indices.size());
  for (std::size_t i : indices) rows.push_back(samples_.at(i));
  return Dataset(std::move(rows), origin_);
}

std::vector<Dataset> SplitDataset(const Dataset& data,
                                  std::span<const double> fractions, Rng& rng) {
  if (data.empty()) throw ValidationError("split_dataset: empty dataset");
  if (fractions.empty()) throw ValidationError("split_dataset: no fractions");
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw ValidationError("split_dataset: fraction <= 0");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("split_dataset: fractions must sum to 1");
  }
  const std::size_t n = data.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(std::span<std::size_t>(order));

  std::vector<std::size_t> sizes;
  std::size_t assigned = 0;
  for (double f : fractions) {
    sizes.push_back(static_cast<std::size_t>(std::floor(f * n + 1e-9)));
    assigned += sizes.back();
  }
  for (std::size_t k = 0; assigned < n; k = (k + 1) % sizes.size()) {
    ++sizes[k];
    ++assigned;
  }

  std::vector<Dataset> parts;
  std::size_t offset = 0;
  for (std::size_t len : sizes) {
    parts.push_back(data.Subset(
        std::span<const std::size_t>(order.data() + offset, len)));
    offset += len;
  }
  return parts;
}

Dataset Subsample(const Dataset& data, std::size_t n, Rng& rng) {
  if (n > data.size()) throw ValidationError("subsample: n exceeds size");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(std::span<std::size_t>(order));
  order.resize(n);
  return data.Subset(order);
}

std::string FormatReal(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw ValidationError("cannot format real");
  return std::string(buf, ptr);
}

double ParseReal(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ValidationError("not a real number: '" + text + "'");
  }
  return v;
}

namespace {

int ParseInt(const std::string& text) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("not an integer: '" + text + "'");
  }
  return v;
}

std::vector<std::string> SplitComma(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void WriteCsv(const Dataset& data, std::ostream& out) {
  const bool groups = data.has_groups();
  const bool aux = data.has_aux();
  for (std::size_t j = 0; j < data.dim(); ++j) out << 'f' << j << ',';
  out << 'y';
  if (groups) out << ",group";
  if (aux) out << ",aux";
  out << '\n';
  for (const Sample& s : data.samples()) {
    for (double v : s.x) out << FormatReal(v) << ',';
    out << s.y;
    if (groups) out << ',' << *s.group;
    if (aux) out << ',' << *s.aux;
    out << '\n';
  }
}

void WriteCsv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  WriteCsv(data, out);
  if (!out) throw IoError("write failed: " + path.string());
}

Dataset ReadCsv(std::istream& in, Origin origin) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("csv: missing header");
  const std::vector<std::string> header = SplitComma(line);
  std::size_t p = 0;
  while (p < header.size() && header[p] == "f" + std::to_string(p)) ++p;
  if (p >= header.size() || header[p] != "y") {
    throw ValidationError("csv: header must be f0,...,f{p-1},y[,group][,aux]");
  }
  std::size_t col = p + 1;
  const bool groups = col < header.size() && header[col] == "group";
  if (groups) ++col;
  const bool aux = col < header.size() && header[col] == "aux";
  if (aux) ++col;
  if (col != header.size()) throw ValidationError("csv: unexpected columns");

  std::vector<Sample> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = SplitComma(line);
    if (cells.size() != header.size()) {
      throw ValidationError("csv: wrong cell count on line " +
                            std::to_string(line_no));
    }
    Sample s;
    s.x.reserve(p);
    for (std::size_t j = 0; j < p; ++j) s.x.push_back(ParseReal(cells[j]));
    s.y = ParseInt(cells[p]);
    std::size_t c = p + 1;
    if (groups) s.group = ParseInt(cells[c++]);
    if (aux) s.aux = ParseInt(cells[c++]);
    rows.push_back(std::move(s));
  }
  return Dataset(std::move(rows), origin);
}

Dataset ReadCsv(const std::filesystem::path& path, Origin origin) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return ReadCsv(in, origin);
}

}  // namespace harm
