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

#ifndef HARM_BOUNDS_H_
#define HARM_BOUNDS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "harm/activeset.h"
#include "harm/attacks.h"
#include "harm/dataset.h"
#include "harm/models.h"
#include "harm/rng.h"
#include "harm/world.h"

namespace harm {

inline constexpr double kDefaultDelta = 0.1;
inline constexpr std::size_t kMaxClassSize = std::size_t{1} << 16;

struct BoundReport {
  double train_err = 0.0;
  double test_err = 0.0;
  double c = 0.0;
  double q = 0.0;
  double d_theta = 0.0;
  double phi = 0.0;
  double delta = kDefaultDelta;
  double bound_c = 0.0;
  double bound_d = 0.0;

  // Fills the two bound columns from the components and checks ranges.
  static BoundReport Assemble(double train_err, double test_err, double c,
                              double q, double d_theta, double phi,
                              double delta);
};

// Hard-label predictors tabulated over one domain.
struct FiniteHypothesisClass {
  std::vector<LabelingFn> members;

  std::size_t size() const { return members.size(); }
  bool Contains(const LabelingFn& f) const;
  void Validate() const;
};

// Memoized active sets of one labeling function, keyed by domain index.
class ActiveSetCache {
 public:
  explicit ActiveSetCache(const LabelingFn& f) : f_(f) {}
  const ActiveSet& Get(std::uint64_t index);

 private:
  const LabelingFn& f_;
  std::unordered_map<std::uint64_t, ActiveSet> cache_;
};

// Zero-one error of a tabulated predictor on a dataset of domain points.
double TableError(const LabelingFn& theta, const Dataset& data);

// Fraction of samples predicted correctly whose prediction can be moved off
// the label by varying the active coordinates of f_m.
double ComputeC(const LabelingFn& theta, const Dataset& data, const World& world,
                ActiveSetCache* f_m_cache = nullptr);
// Same quantity over target data.
double ComputeQ(const LabelingFn& theta, const Dataset& target_data,
                const World& world, ActiveSetCache* f_m_cache = nullptr);
// Mean over samples of max_{z in Q(x)} |theta(z) - y|, an upper bound on c.
double WorstCaseUpperBound(const LabelingFn& theta, const Dataset& data,
                           const World& world);

// Builds the proposer used for sample i.
using ProposerFactory = std::function<Proposer(std::size_t i, const Sample& s)>;

// Counts correctly predicted samples that the searcher flips within
// `budget` proposals, divided by n.
double EstimateCBySearch(const PredictFn& predict, const Dataset& data,
                         const ProposerFactory& searcher, std::size_t budget);

// 1 - min over g in the symmetric-difference class of
// (#src with g = 0 + #tgt with g = 1) / n.
double HDivergenceExhaustive(const FiniteHypothesisClass& cls, const Dataset& src,
                             const Dataset& tgt);

struct DiscriminatorConfig {
  std::size_t epochs = 100;
  double learning_rate = 2.0;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
};

// Trains a discriminator g on the smooth version of the bracketed sum
// (1 - g on src, g on tgt) and reports 1 - (hard bracketed sum), clamped to
// [0, 1]. The larger dataset is subsampled to equal size.
double HDivergenceDiscriminator(const Dataset& src, const Dataset& tgt,
                                const Architecture& arch,
                                const DiscriminatorConfig& cfg);

// sqrt((ln |class| + ln(1/delta)) / 2n).
double PhiFinite(std::size_t class_size, std::size_t n, double delta);

// True when theta is constant, misclassifies x, or has d(theta, f_h, x) *
// d(theta, f_m, x) = 0. x must lie in the source support.
bool SatisfiesA3(const LabelingFn& theta, const World& world, std::uint64_t x);

// Exact target risk of theta under the uniform distribution over the domain,
// labels given by f_h.
double UniformTargetRisk(const LabelingFn& theta, const World& world);

struct Violation {
  std::size_t theta = 0;  // index into the class
  std::size_t trial = 0;
  std::uint64_t point = 0;  // domain index (lemma sweep only)
  double lhs = 0.0;
  double rhs = 0.0;
};

struct TheoremReport {
  std::size_t checks = 0;
  std::size_t violations = 0;
  double allowance = 0.0;  // tolerated violations (probabilistic bounds)
  std::vector<Violation> details;

  bool passed() const { return static_cast<double>(violations) <= allowance; }
};

struct Theorem31Options {
  std::size_t trials = 20;
  std::size_t n = 50;
  double delta = kDefaultDelta;
};

// Samples `trials` source datasets and checks
// eps_t <= train_err + c + phi for every member.
TheoremReport VerifyTheorem31(const World& world, const FiniteHypothesisClass& cls,
                              const Theorem31Options& options, Rng& rng);

// Checks c <= D + q for every member. Requires 1 - f_h in the class.
TheoremReport VerifyTheorem32(const World& world, const FiniteHypothesisClass& cls,
                              const Dataset& src, const Dataset& tgt);

// For every member theta, support point x with theta(x) = y, theta
// non-constant and A3 holding at x, and both orders of (f_h, f_m):
// d(theta, f1, x) = 1 implies r(theta, A(f2, x)) = 1.
TheoremReport LemmaA1Sweep(const World& world, const FiniteHypothesisClass& cls);

}  // namespace harm

#endif  // HARM_BOUNDS_H_
