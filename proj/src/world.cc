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

#include "harm/world.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace harm {

namespace {

void CheckBlock(const std::vector<int>& block, std::size_t dim,
                std::vector<bool>& used) {
  for (int c : block) {
    if (c < 0 || static_cast<std::size_t>(c) >= dim) {
      throw ValidationError("world: block coordinate out of range");
    }
    if (used[c]) throw ValidationError("world: blocks overlap");
    used[c] = true;
  }
}

}  // namespace

World::World(Domain domain, LabelingFn f_h, LabelingFn f_m,
             std::vector<int> aligned, std::vector<int> misaligned)
    : domain_(std::move(domain)),
      f_h_(std::move(f_h)),
      f_m_(std::move(f_m)),
      aligned_(std::move(aligned)),
      misaligned_(std::move(misaligned)) {
  domain_.RequireEnumerable("world");
  if (!(f_h_.domain() == domain_) || !(f_m_.domain() == domain_)) {
    throw ValidationError("world: labeling function domain mismatch");
  }
  std::sort(aligned_.begin(), aligned_.end());
  std::sort(misaligned_.begin(), misaligned_.end());
  std::vector<bool> used(domain_.dim(), false);
  CheckBlock(aligned_, domain_.dim(), used);
  CheckBlock(misaligned_, domain_.dim(), used);
  if (!f_h_.DependsOnlyOn(aligned_)) {
    throw ValidationError("world: f_h reads coordinates outside the aligned block");
  }
  if (!f_m_.DependsOnlyOn(misaligned_)) {
    throw ValidationError(
        "world: f_m reads coordinates outside the misaligned block");
  }
  if (f_h_ == f_m_) throw ValidationError("world: f_m must differ from f_h");
  in_support_.assign(domain_.size(), false);
  for (std::uint64_t i = 0; i < domain_.size(); ++i) {
    if (f_h_(i) == f_m_(i)) {
      support_.push_back(i);
      in_support_[i] = true;
    }
  }
  if (support_.empty()) throw ValidationError("world: empty source support");
}

std::vector<std::uint64_t> World::InsufficientActiveSetPoints() const {
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 0; i < domain_.size(); ++i) {
    const Point x = domain_.PointAt(i);
    if (!ActiveSetIsSufficient(f_h_, x, ComputeActiveSet(f_h_, x)) ||
        !ActiveSetIsSufficient(f_m_, x, ComputeActiveSet(f_m_, x))) {
      out.push_back(i);
    }
  }
  return out;
}

PerturbationSet::PerturbationSet(const World& world, const FeatureVector& x)
    : domain_(world.domain()) {
  base_ = domain_.PointAt(domain_.Index(x));
  free_ = ComputeActiveSet(world.f_m(), base_).indices;
  if (size() > kMaxEnumerable) {
    throw ValidationError("perturbation_set: block too large to enumerate");
  }
}

std::uint64_t PerturbationSet::size() const {
  std::uint64_t n = 1;
  for (int c : free_) {
    n *= static_cast<std::uint64_t>(domain_.alphabet_sizes()[c]);
    if (n > kMaxEnumerable) return kMaxEnumerable + 1;
  }
  return n;
}

PerturbationSet::iterator::iterator(const PerturbationSet* owner, bool done)
    : owner_(owner), done_(done) {
  if (!done_) {
    point_ = owner_->base_;
    Sync();
  }
}

void PerturbationSet::iterator::Sync() {
  current_.assign(point_.begin(), point_.end());
}

PerturbationSet::iterator& PerturbationSet::iterator::operator++() {
  // Odometer over the free coordinates, starting from x's own symbols so
  // that x is the first element.
  const auto& sizes = owner_->domain_.alphabet_sizes();
  const auto& free = owner_->free_;
  std::size_t k = 0;
  for (; k < free.size(); ++k) {
    const int c = free[k];
    point_[c] = (point_[c] + 1) % sizes[c];
    if (point_[c] != owner_->base_[c]) break;
  }
  if (k == free.size()) {
    done_ = true;
    return *this;
  }
  ++step_;
  Sync();
  return *this;
}

std::vector<FeatureVector> Materialize(const PerturbationSet& q) {
  std::vector<FeatureVector> out;
  for (const FeatureVector& z : q) out.push_back(z);
  return out;
}

void WriteWorld(const World& world, std::ostream& out) {
  const Domain& d = world.domain();
  out << "harm-world 1\n";
  out << "p " << d.dim() << '\n';
  out << "alphabets";
  for (int a : d.alphabet_sizes()) out << ' ' << a;
  out << "\naligned";
  for (int c : world.aligned_block()) out << ' ' << c;
  out << "\nmisaligned";
  for (int c : world.misaligned_block()) out << ' ' << c;
  out << "\nf_h " << world.f_h().Bitstring() << '\n';
  out << "f_m " << world.f_m().Bitstring() << '\n';
}

void WriteWorld(const World& world, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  WriteWorld(world, out);
}

namespace {

std::vector<int> ReadInts(std::istringstream& ss) {
  std::vector<int> v;
  int x = 0;
  while (ss >> x) v.push_back(x);
  return v;
}

LabelingFn FromBitstring(const Domain& d, const std::string& bits) {
  std::vector<std::uint8_t> t;
  t.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') throw ValidationError("world: bad truth table");
    t.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return LabelingFn(d, std::move(t));
}

}  // namespace

World ReadWorld(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "harm-world 1") {
    throw ValidationError("world: missing 'harm-world 1' header");
  }
  std::size_t p = 0;
  std::vector<int> alphabets, aligned, misaligned;
  std::string fh_bits, fm_bits;
  bool seen_p = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "p") {
      ss >> p;
      seen_p = true;
    } else if (key == "alphabets") {
      alphabets = ReadInts(ss);
    } else if (key == "aligned") {
      aligned = ReadInts(ss);
    } else if (key == "misaligned") {
      misaligned = ReadInts(ss);
    } else if (key == "f_h") {
      ss >> fh_bits;
    } else if (key == "f_m") {
      ss >> fm_bits;
    } else {
      throw ValidationError("world: unknown key '" + key + "'");
    }
  }
  if (!seen_p || alphabets.size() != p) {
    throw ValidationError("world: alphabet count does not match p");
  }
  Domain d(alphabets);
  d.RequireEnumerable("world");
  return World(d, FromBitstring(d, fh_bits), FromBitstring(d, fm_bits), aligned,
               misaligned);
}

World ReadWorld(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return ReadWorld(in);
}

}  // namespace harm
