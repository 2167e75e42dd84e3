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

#ifndef HARM_MODELS_H_
#define HARM_MODELS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "harm/core.h"
#include "harm/rng.h"

namespace harm {

enum class ArchKind : std::uint8_t { kLogistic = 0, kMlp = 1 };

// Logistic regression: encoder = identity, decoder = sigmoid(w.x + b).
// MLP: encoder = tanh(W1 x + b1), decoder = sigmoid(w2.h + b2).
//
// Parameter layout (weights then biases, layer by layer):
//   logistic  [w_0 .. w_{p-1}, b]
//   mlp       [W1 row-major (hidden x p), b1 (hidden), w2 (hidden), b2]
struct Architecture {
  ArchKind kind = ArchKind::kLogistic;
  std::size_t input_dim = 1;
  std::size_t hidden_dim = 0;  // mlp only

  static Architecture Logistic(std::size_t p) { return {ArchKind::kLogistic, p, 0}; }
  static Architecture Mlp(std::size_t p, std::size_t hidden) {
    return {ArchKind::kMlp, p, hidden};
  }

  void Validate() const;
  std::size_t ParamCount() const;
  std::size_t RepresentationDim() const;
  // Offset of the decoder parameters in the flat vector.
  std::size_t DecoderOffset() const;

  bool operator==(const Architecture&) const = default;
};

using ModelParams = std::vector<double>;

struct ForwardResult {
  double prediction = 0.5;
  double logit = 0.0;
  std::vector<double> representation;
};

ModelParams InitParams(const Architecture& arch, Rng& rng);

ForwardResult Forward(const Architecture& arch, const ModelParams& params,
                      std::span<const double> x);

// d_theta applied to a representation.
double Decode(const Architecture& arch, const ModelParams& params,
              std::span<const double> representation);

// Gradient with respect to params of upstream * logit(x).
std::vector<double> LogitBackward(const Architecture& arch,
                                  const ModelParams& params,
                                  std::span<const double> x, double upstream);

// Gradient of the logistic loss at (x, y) with respect to params.
std::vector<double> Backward(const Architecture& arch, const ModelParams& params,
                             std::span<const double> x, Label y,
                             LossKind kind = LossKind::kLogistic);

// Gradient of the logistic loss at (x, y) with respect to x.
std::vector<double> InputGradient(const Architecture& arch,
                                  const ModelParams& params,
                                  std::span<const double> x, Label y);

// Gradient with respect to params of <upstream, e_theta(x)>. Zero for
// logistic models, whose encoder has no parameters.
std::vector<double> EncoderBackward(const Architecture& arch,
                                    const ModelParams& params,
                                    std::span<const double> x,
                                    std::span<const double> upstream);

// Convenience value type bundling an architecture with its parameters.
struct Model {
  Architecture arch;
  ModelParams params;

  double Predict(std::span<const double> x) const {
    return Forward(arch, params, x).prediction;
  }
};

// Checkpoint binary (all integers little-endian):
//   "HARM" | u32 version (=1) | u8 kind | u32 p | u32 hidden | u64 count |
//   count x f64
inline constexpr std::uint32_t kCheckpointVersion = 1;

void SaveCheckpoint(const Model& model, std::ostream& out);
void SaveCheckpoint(const Model& model, const std::filesystem::path& path);
Model LoadCheckpoint(std::istream& in);
Model LoadCheckpoint(const std::filesystem::path& path);

std::string ToString(ArchKind kind);
ArchKind ParseArchKind(const std::string& name);

}  // namespace harm

#endif  // HARM_MODELS_H_
