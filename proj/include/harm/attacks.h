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

#ifndef HARM_ATTACKS_H_
#define HARM_ATTACKS_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "harm/core.h"
#include "harm/dataset.h"
#include "harm/models.h"
#include "harm/rng.h"

namespace harm {

// What an attack may touch. An empty box means unbounded coordinates.
struct PerturbSpec {
  std::vector<int> mask;
  std::vector<double> lo;
  std::vector<double> hi;
  double epsilon = 0.25;
  double rate = 0.1;
  std::size_t steps = 20;

  // Every coordinate masked, all sharing [lo, hi].
  static PerturbSpec All(std::size_t p, double lo, double hi);
  // Only `mask` may change; all coordinates share [lo, hi].
  static PerturbSpec Masked(std::size_t p, std::vector<int> mask, double lo,
                            double hi);

  void Validate(std::size_t p) const;
  bool has_box() const { return !lo.empty(); }
  double Clamp(std::size_t j, double v) const;
};

enum class AttackKind { kFgsm, kSaltPepper, kSinglePixel };

std::string ToString(AttackKind kind);
AttackKind ParseAttackKind(const std::string& name);

using PredictFn = std::function<double(std::span<const double>)>;

// Logistic loss of `model` at (x, y).
double ModelLoss(const Model& model, std::span<const double> x, Label y);

FeatureVector Fgsm(const Model& model, const FeatureVector& x, Label y,
                   const PerturbSpec& spec);
FeatureVector SaltPepper(const Model& model, const FeatureVector& x, Label y,
                         const PerturbSpec& spec, Rng& rng);
FeatureVector SinglePixel(const Model& model, const FeatureVector& x, Label y,
                          const PerturbSpec& spec);
FeatureVector RunAttack(AttackKind kind, const Model& model,
                        const FeatureVector& x, Label y,
                        const PerturbSpec& spec, Rng& rng);

// A proposal generator for FlipSearch. Returns nullopt when it has no
// further candidates.
using Proposer = std::function<std::optional<FeatureVector>(std::size_t step)>;

// Step k: FGSM with radius epsilon * (k + 1) / steps.
Proposer FgsmProposer(const Model& model, const FeatureVector& x, Label y,
                      const PerturbSpec& spec);
// Each step: one salt-and-pepper draw at the spec's rate.
Proposer SaltPepperProposer(const FeatureVector& x, const PerturbSpec& spec,
                            Rng rng);
// Step k: the k-th single-coordinate change (mask order, lo before hi).
Proposer SinglePixelProposer(const FeatureVector& x, const PerturbSpec& spec);
// Step k: the k-th element of an explicit candidate list.
Proposer ListProposer(std::vector<FeatureVector> candidates);
// Each step: masked coordinates redrawn i.i.d. from N(mean, stddev).
Proposer GaussianProposer(const FeatureVector& x, std::vector<int> mask,
                          double mean, double stddev, Rng rng);

struct FlipResult {
  bool flipped = false;
  std::optional<FeatureVector> witness;
  std::size_t proposals = 0;
};

// Runs up to `steps` proposals (after checking x itself) and stops at the
// first candidate whose hard label differs from y. A reported flip is
// re-verified with a fresh prediction.
FlipResult FlipSearch(const PredictFn& predict, const FeatureVector& x, Label y,
                      const Proposer& proposer, std::size_t steps);

// Attacks every sample of `clean` against `victim`; labels are kept and the
// result is tagged as target data. Sample i uses rng.Derive(i).
Dataset BuildAdversarialTestset(const Model& victim, const Dataset& clean,
                                AttackKind kind, const PerturbSpec& spec,
                                const Rng& rng);

}  // namespace harm

#endif  // HARM_ATTACKS_H_
