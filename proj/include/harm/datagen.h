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

#ifndef HARM_DATAGEN_H_
#define HARM_DATAGEN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "harm/bounds.h"
#include "harm/dataset.h"
#include "harm/rng.h"
#include "harm/world.h"

namespace harm {

enum class Split { kTrain, kVal, kTest };

std::string ToString(Split split);
Split ParseSplit(const std::string& name);

// Coordinates [0, p/4) carry the label signal, [p/4, 3p/4) are noise and
// [3p/4, p) form the spurious block.
struct SyntheticConfig {
  std::size_t n = 2000;
  std::size_t p = 40;
  double rho = 0.9;
  std::uint64_t seed = 0;
  // When set, each spurious coordinate gets its own Bernoulli(rho) draw.
  bool per_coordinate = false;

  void Validate() const;
  std::size_t signal_dim() const { return p / 4; }
  std::size_t spurious_begin() const { return 3 * p / 4; }
  std::vector<int> SpuriousBlock() const;
};

struct EffectSizes {
  std::vector<double> beta1;
  std::vector<double> beta2;
};

// Both vectors drawn from N(0, 1) with a stream derived from cfg.seed.
EffectSizes DrawEffectSizes(const SyntheticConfig& cfg);

// Each split uses its own stream derived from cfg.seed. group = aux = 1 when
// the spurious branch fired for the sample.
Dataset GenSynthetic(const SyntheticConfig& cfg, const EffectSizes& effects,
                     Split split);

struct ToyWorldConfig {
  std::size_t aligned_bits = 3;
  std::size_t misaligned_bits = 3;
  // Draw f_h and f_m only among block functions whose active sets determine
  // the label at every point.
  bool require_sufficient = true;
  std::size_t regeneration_budget = 50;

  void Validate() const;
};

struct ToyWorld {
  World world;
  FiniteHypothesisClass cls;
};

// Non-constant functions of one block that pass the A3 check on the
// support, 1 - f_h included.
ToyWorld MakeToyWorld(const ToyWorldConfig& cfg, Rng& rng);
// The class MakeToyWorld pairs with `world`.
FiniteHypothesisClass ToyClass(const World& world);

// All non-constant functions of `block` over `domain` (binary alphabets).
std::vector<LabelingFn> BlockFunctions(const Domain& domain,
                                       const std::vector<int>& block);

// True when f's active set determines f at every point of its domain.
bool HasSufficientActiveSets(const LabelingFn& f);

// n points drawn uniformly from the source support, labelled by f_h.
Dataset SampleSource(const World& world, std::size_t n, Rng& rng);
// n points drawn uniformly from the points whose aligned-block pattern
// occurs in src, labelled by f_h.
Dataset SampleTargetCovered(const World& world, const Dataset& src,
                            std::size_t n, Rng& rng);

// Reads an IDX image/label pair and keeps digits 0 and 1 with pixels
// scaled to [0, 1].
Dataset LoadIdx(const std::filesystem::path& images_path,
                const std::filesystem::path& labels_path);

}  // namespace harm

#endif  // HARM_DATAGEN_H_
