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

// Central finite-difference checks shared by the unit and acceptance tests.

#ifndef HARM_TESTS_GRADCHECK_H_
#define HARM_TESTS_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "harm/core.h"
#include "harm/models.h"
#include "harm/rng.h"

namespace harm::gradcheck {

inline constexpr double kStep = 1e-5;
inline constexpr double kTolerance = 1e-4;

inline std::vector<double> CentralDifference(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> at) {
  std::vector<double> g(at.size());
  for (std::size_t j = 0; j < at.size(); ++j) {
    const double keep = at[j];
    at[j] = keep + kStep;
    const double up = f(at);
    at[j] = keep - kStep;
    const double down = f(at);
    at[j] = keep;
    g[j] = (up - down) / (2.0 * kStep);
  }
  return g;
}

// ||a - b|| / max(||a||, ||b||), 0 when both vanish.
inline double RelativeError(const std::vector<double>& a,
                            const std::vector<double>& b) {
  double diff = 0, na = 0, nb = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    diff += (a[j] - b[j]) * (a[j] - b[j]);
    na += a[j] * a[j];
    nb += b[j] * b[j];
  }
  const double denom = std::sqrt(std::max(na, nb));
  return denom < 1e-12 ? std::sqrt(diff) : std::sqrt(diff) / denom;
}

struct Draw {
  Architecture arch;
  ModelParams params;
  std::vector<double> x;
  Label y = 0;
};

inline Draw RandomDraw(ArchKind kind, Rng& rng) {
  Draw d;
  const std::size_t p = 1 + rng.UniformInt(6);
  d.arch = kind == ArchKind::kMlp ? Architecture::Mlp(p, 1 + rng.UniformInt(5))
                                  : Architecture::Logistic(p);
  d.params.resize(d.arch.ParamCount());
  for (double& v : d.params) v = rng.Normal();
  d.x.resize(p);
  for (double& v : d.x) v = rng.Normal();
  d.y = static_cast<Label>(rng.UniformInt(2));
  return d;
}

inline double LossAt(const Architecture& arch, const ModelParams& params,
                     const std::vector<double>& x, Label y) {
  return Loss(LossKind::kLogistic, Forward(arch, params, x).prediction, y);
}

inline double ParamError(const Draw& d) {
  const auto fd = CentralDifference(
      [&](const std::vector<double>& w) { return LossAt(d.arch, w, d.x, d.y); },
      d.params);
  return RelativeError(Backward(d.arch, d.params, d.x, d.y), fd);
}

inline double InputError(const Draw& d) {
  const auto fd = CentralDifference(
      [&](const std::vector<double>& x) { return LossAt(d.arch, d.params, x, d.y); },
      d.x);
  return RelativeError(InputGradient(d.arch, d.params, d.x, d.y), fd);
}

// Largest error over `draws` seeded draws.
inline double MaxError(ArchKind kind, bool params, std::size_t draws,
                       std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    const Draw d = RandomDraw(kind, rng);
    worst = std::max(worst, params ? ParamError(d) : InputError(d));
  }
  return worst;
}

}  // namespace harm::gradcheck

#endif  // HARM_TESTS_GRADCHECK_H_
