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


// Run configuration: flat `section.key = value` lines, `#` starts a
// comment, blank lines are ignored. Unknown keys and repeated keys are
// errors. A handful of keys have no section (`seeds`).

#ifndef HARM_CONFIG_H_
#define HARM_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "harm/attacks.h"
#include "harm/bounds.h"
#include "harm/datagen.h"
#include "harm/models.h"
#include "harm/train.h"

namespace harm {

enum class DataKind { kSynthetic, kWorld, kIdx };
enum class Estimator { kExact, kSearch, kDiscriminator };

std::string ToString(DataKind kind);
std::string ToString(Estimator kind);

struct RunConfig {
  // data
  DataKind data_kind = DataKind::kSynthetic;
  SyntheticConfig synthetic;
  ToyWorldConfig world;
  std::size_t worlds = 100;   // verify suite size
  std::size_t trials = 20;    // source draws per world
  std::size_t sample_n = 50;  // source / target sample size on worlds
  std::filesystem::path world_file;  // verify a stored world instead
  std::filesystem::path train_images, train_labels, test_images, test_labels;
  std::size_t train_limit = 0;  // 0 keeps every row
  std::size_t test_limit = 0;

  // model; input_dim is filled in from the data
  ArchKind arch_kind = ArchKind::kMlp;
  std::size_t hidden = 8;

  // train
  std::vector<Method> methods = {Method::kErm};
  TrainConfig train;
  std::size_t wt_draws = 10;  // randomized candidates per sample (synthetic)

  // attack; unset mask means the data mode's default
  AttackKind attack_kind = AttackKind::kFgsm;
  PerturbSpec attack;
  std::optional<std::vector<int>> attack_mask;  // empty optional = default
  bool attack_mask_all = false;
  std::optional<double> attack_lo, attack_hi;

  // bounds
  double delta = kDefaultDelta;
  Estimator estimator = Estimator::kSearch;
  std::size_t search_budget = 10;
  std::size_t class_size = 1;  // |Theta| inside phi for parametric models
  DiscriminatorConfig discriminator;
  std::size_t discriminator_hidden = 8;  // 0 = logistic

  // output
  std::filesystem::path out_dir = "out";
  bool emit_svg = true;

  std::vector<std::uint64_t> seeds = {0};

  // Sorted `key=value` lines of the explicitly set keys.
  std::map<std::string, std::string> entries;

  // Hex SHA-256 of the canonical text.
  std::string Hash() const;
  std::string Canonical() const;

  Architecture MakeArch(std::size_t input_dim) const;
  // Every coordinate when attack.mask = all or unset on idx data, the
  // spurious block when unset on synthetic data.
  PerturbSpec AttackSpec(std::size_t p) const;
};

RunConfig ParseConfig(std::istream& in);
RunConfig LoadConfig(const std::filesystem::path& path);
// Applies one `key = value` assignment on top of an existing config.
void SetConfigValue(RunConfig& cfg, const std::string& key,
                    const std::string& value);

// `a,b,c` with optional `lo..hi` ranges.
std::vector<std::uint64_t> ParseSeedList(const std::string& text);

}  // namespace harm

#endif  // HARM_CONFIG_H_
