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

#ifndef HARM_CORE_H_
#define HARM_CORE_H_

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace harm {

// Error taxonomy. The CLI maps these onto exit codes 1 / 2 / 3.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using FeatureVector = std::vector<double>;

// Binary label in {0, 1}.
using Label = int;

enum class LossKind { kZeroOne, kLogistic };

// Predictions are clamped to [kLogClamp, 1 - kLogClamp] before the logistic
// loss takes logarithms.
inline constexpr double kLogClamp = 1e-12;

// Hard label of a probability; 0.5 rounds to 1.
inline Label HardLabel(double prediction) { return prediction >= 0.5 ? 1 : 0; }

double Loss(LossKind kind, double prediction, Label y);

// Mean per-sample loss.
double EmpiricalRisk(std::span<const double> predictions,
                     std::span<const Label> labels, LossKind kind);

double Sigmoid(double t);

std::string ToString(LossKind kind);
LossKind ParseLossKind(const std::string& name);

}  // namespace harm

#endif  // HARM_CORE_H_
