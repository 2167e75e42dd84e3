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

#ifndef HARM_WORLD_H_
#define HARM_WORLD_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <iterator>
#include <vector>

#include "harm/activeset.h"

namespace harm {

// Enumerable discrete feature space with a human-aligned labeling function
// f_h reading only the aligned block and a misaligned one f_m reading only
// the misaligned block. The source support is {x : f_h(x) = f_m(x)}.
class World {
 public:
  World(Domain domain, LabelingFn f_h, LabelingFn f_m, std::vector<int> aligned,
        std::vector<int> misaligned);

  const Domain& domain() const { return domain_; }
  const LabelingFn& f_h() const { return f_h_; }
  const LabelingFn& f_m() const { return f_m_; }
  const std::vector<int>& aligned_block() const { return aligned_; }
  const std::vector<int>& misaligned_block() const { return misaligned_; }
  // Domain indices of the source support, ascending.
  const std::vector<std::uint64_t>& support() const { return support_; }
  bool InSupport(std::uint64_t index) const { return in_support_[index]; }

  // Points (anywhere in the domain) at which the active set of f_h or f_m
  // does not determine the label. Non-empty means the world is flagged.
  std::vector<std::uint64_t> InsufficientActiveSetPoints() const;

 private:
  Domain domain_;
  LabelingFn f_h_;
  LabelingFn f_m_;
  std::vector<int> aligned_;
  std::vector<int> misaligned_;
  std::vector<std::uint64_t> support_;
  std::vector<bool> in_support_;
};

// Q(x): every z equal to x off A(f_m, x) whose A(f_m, x) coordinates range
// over all symbol combinations. x itself is the first element.
class PerturbationSet {
 public:
  PerturbationSet(const World& world, const FeatureVector& x);

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = FeatureVector;
    using difference_type = std::ptrdiff_t;
    using pointer = const FeatureVector*;
    using reference = const FeatureVector&;

    iterator() = default;
    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }
    iterator& operator++();
    iterator operator++(int) {
      iterator tmp = *this;
      ++*this;
      return tmp;
    }
    bool operator==(const iterator& other) const {
      return done_ == other.done_ && (done_ || step_ == other.step_);
    }

   private:
    friend class PerturbationSet;
    iterator(const PerturbationSet* owner, bool done);
    void Sync();

    const PerturbationSet* owner_ = nullptr;
    Point point_;
    FeatureVector current_;
    std::uint64_t step_ = 0;
    bool done_ = true;
  };

  iterator begin() const { return iterator(this, false); }
  iterator end() const { return iterator(this, true); }
  std::uint64_t size() const;
  const std::vector<int>& free_coords() const { return free_; }

 private:
  Domain domain_;
  Point base_;
  std::vector<int> free_;
};

std::vector<FeatureVector> Materialize(const PerturbationSet& q);

// Text format:
//   harm-world 1
//   p <dim>
//   alphabets <a_0> ... <a_{p-1}>
//   aligned <coords...>
//   misaligned <coords...>
//   f_h <bitstring over domain order, coordinate 0 fastest>
//   f_m <bitstring>
void WriteWorld(const World& world, std::ostream& out);
void WriteWorld(const World& world, const std::filesystem::path& path);
World ReadWorld(std::istream& in);
World ReadWorld(const std::filesystem::path& path);

}  // namespace harm

#endif  // HARM_WORLD_H_
