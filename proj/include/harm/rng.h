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

#ifndef HARM_RNG_H_
#define HARM_RNG_H_

#include <cstdint>
#include <span>

namespace harm {

// Portable counter-based generator. Draw k (0-based) is
//
//   SplitMix64(seed + (k + 1) * 0x9E3779B97F4A7C15)
//
// using the SplitMix64 finalizer of Steele, Lea & Flood (2014). Derived
// quantities:
//   Uniform()       (u64 >> 11) * 2^-53, in [0, 1)
//   UniformInt(n)   rejection sampling on the top bits, unbiased
//   Normal()        Box-Muller, cos branch only: sqrt(-2 ln(1-u1)) cos(2 pi u2)
//   Derive(k)       Rng(SplitMix64(seed ^ SplitMix64(k + 1)))
//
// Instances are single-owner; use Derive() to hand independent streams to
// other workers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t NextU64();
  double Uniform();
  std::uint64_t UniformInt(std::uint64_t n);
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }
  bool Bernoulli(double p) { return Uniform() < p; }

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(UniformInt(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  Rng Derive(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::uint64_t SplitMix64(std::uint64_t z);

}  // namespace harm

#endif  // HARM_RNG_H_
