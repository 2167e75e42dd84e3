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

#include "harm/attacks.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace harm {

PerturbSpec PerturbSpec::All(std::size_t p, double lo, double hi) {
  std::vector<int> mask(p);
  for (std::size_t j = 0; j < p; ++j) mask[j] = static_cast<int>(j);
  return Masked(p, std::move(mask), lo, hi);
}

PerturbSpec PerturbSpec::Masked(std::size_t p, std::vector<int> mask, double lo,
                                double hi) {
  PerturbSpec s;
  s.mask = std::move(mask);
  s.lo.assign(p, lo);
  s.hi.assign(p, hi);
  return s;
}

void PerturbSpec::Validate(std::size_t p) const {
  for (int c : mask) {
    if (c < 0 || static_cast<std::size_t>(c) >= p) {
      throw ValidationError("perturb spec: mask index out of range");
    }
  }
  if (!(epsilon >= 0.0)) throw ValidationError("perturb spec: epsilon < 0");
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw ValidationError("perturb spec: rate outside [0,1]");
  }
  if (lo.size() != hi.size()) throw ValidationError("perturb spec: bad box");
  if (has_box()) {
    if (lo.size() != p) throw ValidationError("perturb spec: box dimension");
    for (std::size_t j = 0; j < p; ++j) {
      if (!(lo[j] <= hi[j])) throw ValidationError("perturb spec: lo > hi");
    }
  }
}

double PerturbSpec::Clamp(std::size_t j, double v) const {
  if (!has_box()) return v;
  return std::clamp(v, lo[j], hi[j]);
}

std::string ToString(AttackKind kind) {
  switch (kind) {
    case AttackKind::kFgsm:
      return "fgsm";
    case AttackKind::kSaltPepper:
      return "salt_pepper";
    case AttackKind::kSinglePixel:
      return "single_pixel";
  }
  return "";
}

AttackKind ParseAttackKind(const std::string& name) {
  if (name == "fgsm") return AttackKind::kFgsm;
  if (name == "salt_pepper") return AttackKind::kSaltPepper;
  if (name == "single_pixel") return AttackKind::kSinglePixel;
  throw ValidationError("unknown attack kind: " + name);
}

double ModelLoss(const Model& model, std::span<const double> x, Label y) {
  return Loss(LossKind::kLogistic, model.Predict(x), y);
}

namespace {

FeatureVector FgsmWithRadius(const Model& model, const FeatureVector& x,
                             Label y, const PerturbSpec& spec, double radius) {
  FeatureVector out = x;
  if (radius == 0.0 || spec.mask.empty()) return out;
  const std::vector<double> g = InputGradient(model.arch, model.params, x, y);
  for (int c : spec.mask) {
    const double s = (g[c] > 0.0) - (g[c] < 0.0);
    out[c] = spec.Clamp(c, x[c] + radius * s);
  }
  return out;
}

FeatureVector SaltPepperDraw(const FeatureVector& x, const PerturbSpec& spec,
                             Rng& rng) {
  FeatureVector z = x;
  for (int c : spec.mask) {
    if (rng.Uniform() < spec.rate) {
      const bool high = rng.Bernoulli(0.5);
      if (spec.has_box()) {
        z[c] = high ? spec.hi[c] : spec.lo[c];
      } else {
        throw ValidationError("salt_pepper: box required");
      }
    }
  }
  return z;
}

}  // namespace

FeatureVector Fgsm(const Model& model, const FeatureVector& x, Label y,
                   const PerturbSpec& spec) {
  spec.Validate(x.size());
  return FgsmWithRadius(model, x, y, spec, spec.epsilon);
}

FeatureVector SaltPepper(const Model& model, const FeatureVector& x, Label y,
                         const PerturbSpec& spec, Rng& rng) {
  spec.Validate(x.size());
  if (!spec.has_box()) throw ValidationError("salt_pepper: box required");
  FeatureVector best = x;
  double best_loss = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < spec.steps; ++s) {
    FeatureVector z = SaltPepperDraw(x, spec, rng);
    const double l = ModelLoss(model, z, y);
    if (l > best_loss) {
      best_loss = l;
      best = std::move(z);
    }
  }
  return best;
}

FeatureVector SinglePixel(const Model& model, const FeatureVector& x, Label y,
                          const PerturbSpec& spec) {
  spec.Validate(x.size());
  if (!spec.has_box()) throw ValidationError("single_pixel: box required");
  FeatureVector best = x;
  double best_loss = ModelLoss(model, x, y);
  FeatureVector z = x;
  for (int c : spec.mask) {
    for (double v : {spec.lo[c], spec.hi[c]}) {
      if (v == x[c]) continue;
      z[c] = v;
      const double l = ModelLoss(model, z, y);
      if (l > best_loss) {
        best_loss = l;
        best = z;
      }
    }
    z[c] = x[c];
  }
  return best;
}

FeatureVector RunAttack(AttackKind kind, const Model& model,
                        const FeatureVector& x, Label y,
                        const PerturbSpec& spec, Rng& rng) {
  switch (kind) {
    case AttackKind::kFgsm:
      return Fgsm(model, x, y, spec);
    case AttackKind::kSaltPepper:
      return SaltPepper(model, x, y, spec, rng);
    case AttackKind::kSinglePixel:
      return SinglePixel(model, x, y, spec);
  }
  return x;
}

Proposer FgsmProposer(const Model& model, const FeatureVector& x, Label y,
                      const PerturbSpec& spec) {
  spec.Validate(x.size());
  const std::size_t steps = std::max<std::size_t>(spec.steps, 1);
  return [model, x, y, spec, steps](std::size_t k) -> std::optional<FeatureVector> {
    if (k >= steps) return std::nullopt;
    const double radius =
        spec.epsilon * static_cast<double>(k + 1) / static_cast<double>(steps);
    return FgsmWithRadius(model, x, y, spec, radius);
  };
}

Proposer SaltPepperProposer(const FeatureVector& x, const PerturbSpec& spec,
                            Rng rng) {
  spec.Validate(x.size());
  if (!spec.has_box()) throw ValidationError("salt_pepper: box required");
  auto state = std::make_shared<Rng>(rng);
  return [x, spec, state](std::size_t) -> std::optional<FeatureVector> {
    return SaltPepperDraw(x, spec, *state);
  };
}

Proposer SinglePixelProposer(const FeatureVector& x, const PerturbSpec& spec) {
  spec.Validate(x.size());
  if (!spec.has_box()) throw ValidationError("single_pixel: box required");
  return [x, spec](std::size_t k) -> std::optional<FeatureVector> {
    if (k >= 2 * spec.mask.size()) return std::nullopt;
    const int c = spec.mask[k / 2];
    FeatureVector z = x;
    z[c] = (k % 2 == 0) ? spec.lo[c] : spec.hi[c];
    return z;
  };
}

Proposer ListProposer(std::vector<FeatureVector> candidates) {
  auto list = std::make_shared<std::vector<FeatureVector>>(std::move(candidates));
  return [list](std::size_t k) -> std::optional<FeatureVector> {
    if (k >= list->size()) return std::nullopt;
    return (*list)[k];
  };
}

Proposer GaussianProposer(const FeatureVector& x, std::vector<int> mask,
                          double mean, double stddev, Rng rng) {
  auto state = std::make_shared<Rng>(rng);
  return [x, mask = std::move(mask), mean, stddev,
          state](std::size_t) -> std::optional<FeatureVector> {
    FeatureVector z = x;
    for (int c : mask) z[c] = state->Normal(mean, stddev);
    return z;
  };
}

FlipResult FlipSearch(const PredictFn& predict, const FeatureVector& x, Label y,
                      const Proposer& proposer, std::size_t steps) {
  FlipResult result;
  if (steps == 0) return result;
  // x belongs to every candidate region.
  if (HardLabel(predict(x)) != y) {
    result.flipped = true;
    result.witness = x;
    return result;
  }
  for (std::size_t k = 0; k < steps; ++k) {
    std::optional<FeatureVector> z = proposer(k);
    if (!z) break;
    ++result.proposals;
    if (HardLabel(predict(*z)) != y) {
      // A flip is only reported with a witness that survives re-evaluation.
      if (HardLabel(predict(*z)) == y) {
        throw NumericalError("flip_search: prediction is not deterministic");
      }
      result.flipped = true;
      result.witness = std::move(z);
      return result;
    }
  }
  return result;
}

Dataset BuildAdversarialTestset(const Model& victim, const Dataset& clean,
                                AttackKind kind, const PerturbSpec& spec,
                                const Rng& rng) {
  spec.Validate(clean.dim());
  std::vector<Sample> rows;
  rows.reserve(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    Rng local = rng.Derive(i);
    Sample s = clean[i];
    s.x = RunAttack(kind, victim, s.x, s.y, spec, local);
    rows.push_back(std::move(s));
  }
  return Dataset(std::move(rows), Origin::kTarget);
}

}  // namespace harm
