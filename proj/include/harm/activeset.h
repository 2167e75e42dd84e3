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

// Exact, enumeration-based feature dependence quantities on small discrete
// domains: the active set of a labeling function at a point, the function
// difference d(theta, f, x), the dependence term r(theta, A, x, y) and the
// perturbation set Q(x).
//
// Points of a domain are addressed by a mixed-radix index with coordinate 0
// varying fastest. Every quantity here is a hard-label quantity in {0, 1}.

#ifndef HARM_ACTIVESET_H_
#define HARM_ACTIVESET_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "harm/core.h"

namespace harm {

// Exhaustive operations refuse domains larger than this.
inline constexpr std::uint64_t kMaxEnumerable = std::uint64_t{1} << 20;

using Point = std::vector<int>;

class Domain {
 public:
  Domain() = default;
  explicit Domain(std::vector<int> alphabet_sizes);

  std::size_t dim() const { return alphabet_sizes_.size(); }
  std::uint64_t size() const { return size_; }
  const std::vector<int>& alphabet_sizes() const { return alphabet_sizes_; }
  bool enumerable() const { return size_ <= kMaxEnumerable; }

  std::uint64_t Index(std::span<const int> point) const;
  // Accepts integer-valued feature vectors whose codes lie in the alphabets.
  std::uint64_t Index(const FeatureVector& x) const;
  Point PointAt(std::uint64_t index) const;
  FeatureVector VectorAt(std::uint64_t index) const;
  bool Contains(const FeatureVector& x) const;

  // Throws ValidationError when the domain exceeds kMaxEnumerable.
  void RequireEnumerable(const char* what) const;

  bool operator==(const Domain& other) const = default;

 private:
  std::vector<int> alphabet_sizes_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t size_ = 0;
};

// Total map from a domain to {0, 1}, stored as a truth table in index order.
class LabelingFn {
 public:
  LabelingFn() = default;
  LabelingFn(Domain domain, std::vector<std::uint8_t> table);

  // Evaluates `fn` on every point and rounds to hard labels.
  static LabelingFn Tabulate(const Domain& domain,
                             const std::function<double(const FeatureVector&)>& fn);
  static LabelingFn Constant(const Domain& domain, Label value);

  const Domain& domain() const { return domain_; }
  const std::vector<std::uint8_t>& table() const { return table_; }

  Label operator()(std::uint64_t index) const { return table_[index]; }
  Label operator()(std::span<const int> point) const {
    return table_[domain_.Index(point)];
  }
  Label operator()(const FeatureVector& x) const {
    return table_[domain_.Index(x)];
  }

  LabelingFn Complement() const;
  bool IsConstant() const;
  // True when the output never changes as coordinates outside `coords` vary.
  bool DependsOnlyOn(std::span<const int> coords) const;
  std::string Bitstring() const;

  bool operator==(const LabelingFn& other) const = default;

 private:
  Domain domain_;
  std::vector<std::uint8_t> table_;
};

struct ActiveSet {
  std::vector<int> indices;  // sorted coordinates where the witness equals x
  Point witness;             // minimizing z
};

// A(f, x): among all z with f(z) = f(x), the one sharing the fewest
// coordinates with x; ties go to the lexicographically smallest symbol-code
// tuple (coordinate 0 compared first).
ActiveSet ComputeActiveSet(const LabelingFn& f, const Point& x);
ActiveSet ComputeActiveSet(const LabelingFn& f, const FeatureVector& x);

// d(theta, f, x): max |theta(z) - f(z)| over z agreeing with x on A(f, x).
int FnDifference(const LabelingFn& theta, const LabelingFn& f, const Point& x);
int FnDifference(const LabelingFn& theta, const LabelingFn& f,
                 const Point& x, const ActiveSet& f_active);

// r(theta, A, x, y): max |theta(z) - y| over z that take every symbol
// combination on A and equal x elsewhere.
int DependenceR(const LabelingFn& theta, const ActiveSet& a, const Point& x,
                Label y);

// True when f is constant on {z : z_A = x_A}, i.e. the active set alone
// determines the label.
bool ActiveSetIsSufficient(const LabelingFn& f, const Point& x,
                           const ActiveSet& a);

// Visits every point equal to `base` off `free_coords`, with the free
// coordinates running over all symbol combinations (coordinate order of
// `free_coords`, first fastest). `base` itself is visited. Stops early when
// the visitor returns false.
void ForEachVariation(const Domain& domain, const Point& base,
                      std::span<const int> free_coords,
                      const std::function<bool(const Point&)>& visit);

std::vector<int> Complement(std::span<const int> coords, std::size_t dim);

}  // namespace harm

#endif  // HARM_ACTIVESET_H_
