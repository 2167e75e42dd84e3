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

#include "harm/core.h"

#include <algorithm>
#include <cmath>

namespace harm {

double Loss(LossKind kind, double prediction, Label y) {
  if (std::isnan(prediction) || prediction < 0.0 || prediction > 1.0) {
    throw ValidationError("loss: prediction outside [0,1]: " +
                          std::to_string(prediction));
  }
  if (y != 0 && y != 1) {
    throw ValidationError("loss: label must be 0 or 1");
  }
  switch (kind) {
    case LossKind::kZeroOne:
      return HardLabel(prediction) == y ? 0.0 : 1.0;
    case LossKind::kLogistic: {
      const double p = std::clamp(prediction, kLogClamp, 1.0 - kLogClamp);
      return y == 1 ? -std::log(p) : -std::log(1.0 - p);
    }
  }
  return 0.0;
}

double EmpiricalRisk(std::span<const double> predictions,
                     std::span<const Label> labels, LossKind kind) {
  if (predictions.size() != labels.size()) {
    throw ValidationError("empirical_risk: length mismatch");
  }
  if (predictions.empty()) {
    throw ValidationError("empirical_risk: empty input");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    total += Loss(kind, predictions[i], labels[i]);
  }
  return total / static_cast<double>(predictions.size());
}

double Sigmoid(double t) {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

std::string ToString(LossKind kind) {
  return kind == LossKind::kZeroOne ? "zero_one" : "logistic";
}

LossKind ParseLossKind(const std::string& name) {
  if (name == "zero_one") return LossKind::kZeroOne;
  if (name == "logistic") return LossKind::kLogistic;
  throw ValidationError("unknown loss kind: " + name);
}

}  // namespace harm
