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

#ifndef HARM_DATASET_H_
#define HARM_DATASET_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "harm/core.h"
#include "harm/rng.h"

namespace harm {

struct Sample {
  FeatureVector x;
  Label y = 0;
  std::optional<int> group;  // partition id (GroupDRO)
  std::optional<int> aux;    // binary auxiliary annotation
};

enum class Origin { kSource, kTarget };

// Immutable list of samples sharing one dimension.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Sample> samples, Origin origin);

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::size_t dim() const { return dim_; }
  Origin origin() const { return origin_; }
  const std::vector<Sample>& samples() const { return samples_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }

  bool has_groups() const;
  bool has_aux() const;
  std::vector<Label> labels() const;

  // Copy with a different origin tag.
  Dataset WithOrigin(Origin origin) const { return Dataset(samples_, origin); }
  // Rows at the given positions, in that order.
  Dataset Subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<Sample> samples_;
  Origin origin_ = Origin::kSource;
  std::size_t dim_ = 0;
};

// Disjoint cover of `data` after a seeded shuffle. Part sizes are the floors
// of fraction * n with the remainder handed out to the earliest parts.
std::vector<Dataset> SplitDataset(const Dataset& data,
                                  std::span<const double> fractions, Rng& rng);

// Draws `n` rows without replacement (seeded). n must not exceed data.size().
Dataset Subsample(const Dataset& data, std::size_t n, Rng& rng);

// CSV: header `f0,...,f{p-1},y[,group][,aux]`, LF line endings. Reals are
// written in shortest round-trip form.
void WriteCsv(const Dataset& data, std::ostream& out);
void WriteCsv(const Dataset& data, const std::filesystem::path& path);
Dataset ReadCsv(std::istream& in, Origin origin);
Dataset ReadCsv(const std::filesystem::path& path, Origin origin);

// Shortest decimal string that parses back to exactly `v`.
std::string FormatReal(double v);
double ParseReal(const std::string& text);

}  // namespace harm

#endif  // HARM_DATASET_H_
