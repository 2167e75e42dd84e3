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

#include "harm/activeset.h"

#include <algorithm>
#include <cmath>

namespace harm {

Domain::Domain(std::vector<int> alphabet_sizes)
    : alphabet_sizes_(std::move(alphabet_sizes)) {
  if (alphabet_sizes_.empty()) throw ValidationError("domain: dimension 0");
  size_ = 1;
  for (int a : alphabet_sizes_) {
    if (a < 1) throw ValidationError("domain: alphabet size must be >= 1");
    strides_.push_back(size_);
    // Saturate instead of overflowing; such domains are never enumerated.
    if (size_ > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(a)) {
      size_ = std::uint64_t{1} << 62;
    } else {
      size_ *= static_cast<std::uint64_t>(a);
    }
  }
}

std::uint64_t Domain::Index(std::span<const int> point) const {
  if (point.size() != dim()) throw ValidationError("domain: dimension mismatch");
  std::uint64_t idx = 0;
  for (std::size_t j = 0; j < point.size(); ++j) {
    if (point[j] < 0 || point[j] >= alphabet_sizes_[j]) {
      throw ValidationError("domain: symbol outside alphabet at coordinate " +
                            std::to_string(j));
    }
    idx += static_cast<std::uint64_t>(point[j]) * strides_[j];
  }
  return idx;
}

std::uint64_t Domain::Index(const FeatureVector& x) const {
  if (x.size() != dim()) throw ValidationError("domain: dimension mismatch");
  Point p(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double r = std::round(x[j]);
    if (r != x[j]) throw ValidationError("domain: non-integer symbol code");
    p[j] = static_cast<int>(r);
  }
  return Index(p);
}

Point Domain::PointAt(std::uint64_t index) const {
  Point p(dim());
  for (std::size_t j = 0; j < dim(); ++j) {
    p[j] = static_cast<int>(index % static_cast<std::uint64_t>(alphabet_sizes_[j]));
    index /= static_cast<std::uint64_t>(alphabet_sizes_[j]);
  }
  return p;
}

FeatureVector Domain::VectorAt(std::uint64_t index) const {
  const Point p = PointAt(index);
  return FeatureVector(p.begin(), p.end());
}

bool Domain::Contains(const FeatureVector& x) const {
  if (x.size() != dim()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] != std::round(x[j]) || x[j] < 0 || x[j] >= alphabet_sizes_[j]) {
      return false;
    }
  }
  return true;
}

void Domain::RequireEnumerable(const char* what) const {
  if (!enumerable()) {
    throw ValidationError(std::string(what) + ": domain too large to enumerate");
  }
}

LabelingFn::LabelingFn(Domain domain, std::vector<std::uint8_t> table)
    : domain_(std::move(domain)), table_(std::move(table)) {
  domain_.RequireEnumerable("labeling function");
  if (table_.size() != domain_.size()) {
    throw ValidationError("labeling function is not total on its domain");
  }
  for (std::uint8_t v : table_) {
    if (v > 1) throw ValidationError("labeling function value outside {0,1}");
  }
}

LabelingFn LabelingFn::Tabulate(
    const Domain& domain, const std::function<double(const FeatureVector&)>& fn) {
  domain.RequireEnumerable("tabulate");
  std::vector<std::uint8_t> table(domain.size());
  for (std::uint64_t i = 0; i < domain.size(); ++i) {
    const double p = fn(domain.VectorAt(i));
    if (std::isnan(p)) throw NumericalError("tabulate: NaN prediction");
    table[i] = static_cast<std::uint8_t>(HardLabel(p));
  }
  return LabelingFn(domain, std::move(table));
}

LabelingFn LabelingFn::Constant(const Domain& domain, Label value) {
  domain.RequireEnumerable("constant");
  return LabelingFn(domain,
                    std::vector<std::uint8_t>(domain.size(),
                                              static_cast<std::uint8_t>(value)));
}

LabelingFn LabelingFn::Complement() const {
  std::vector<std::uint8_t> t(table_.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 1 - table_[i];
  return LabelingFn(domain_, std::move(t));
}

bool LabelingFn::IsConstant() const {
  return std::adjacent_find(table_.begin(), table_.end(),
                            std::not_equal_to<>()) == table_.end();
}

bool LabelingFn::DependsOnlyOn(std::span<const int> coords) const {
  // Equivalent: every point agrees with its projection that zeroes the
  // coordinates outside `coords`.
  const std::vector<int> others = harm::Complement(coords, domain_.dim());
  for (std::uint64_t i = 0; i < domain_.size(); ++i) {
    Point z = domain_.PointAt(i);
    for (int c : others) z[c] = 0;
    if (table_[i] != (*this)(std::span<const int>(z))) return false;
  }
  return true;
}

std::string LabelingFn::Bitstring() const {
  std::string s(table_.size(), '0');
  for (std::size_t i = 0; i < table_.size(); ++i) {
    if (table_[i]) s[i] = '1';
  }
  return s;
}

std::vector<int> Complement(std::span<const int> coords, std::size_t dim) {
  std::vector<bool> in(dim, false);
  for (int c : coords) {
    if (c < 0 || static_cast<std::size_t>(c) >= dim) {
      throw ValidationError("coordinate index out of range");
    }
    in[c] = true;
  }
  std::vector<int> out;
  for (std::size_t j = 0; j < dim; ++j) {
    if (!in[j]) out.push_back(static_cast<int>(j));
  }
  return out;
}

void ForEachVariation(const Domain& domain, const Point& base,
                      std::span<const int> free_coords,
                      const std::function<bool(const Point&)>& visit) {
  Point z = base;
  for (int c : free_coords) z[c] = 0;
  const auto& sizes = domain.alphabet_sizes();
  while (true) {
    if (!visit(z)) return;
    std::size_t k = 0;
    for (; k < free_coords.size(); ++k) {
      const int c = free_coords[k];
      if (++z[c] < sizes[c]) break;
      z[c] = 0;
    }
    if (k == free_coords.size()) return;
  }
}

namespace {

Point ToPoint(const Domain& domain, const FeatureVector& x) {
  return domain.PointAt(domain.Index(x));
}

}  // namespace

ActiveSet ComputeActiveSet(const LabelingFn& f, const Point& x) {
  const Domain& domain = f.domain();
  domain.RequireEnumerable("active_set");
  const Label fx = f(std::span<const int>(x));
  const std::size_t p = domain.dim();

  Point best;
  std::size_t best_matches = p + 1;
  Point z(p, 0);
  const auto& sizes = domain.alphabet_sizes();
  for (std::uint64_t idx = 0; idx < domain.size(); ++idx) {
    if (f(idx) == fx) {
      std::size_t matches = 0;
      for (std::size_t j = 0; j < p; ++j) matches += (z[j] == x[j]);
      if (matches < best_matches ||
          (matches == best_matches && std::lexicographical_compare(
                                          z.begin(), z.end(), best.begin(),
                                          best.end()))) {
        best_matches = matches;
        best = z;
      }
    }
    for (std::size_t j = 0; j < p; ++j) {
      if (++z[j] < sizes[j]) break;
      z[j] = 0;
    }
  }

  ActiveSet a;
  a.witness = best;
  for (std::size_t j = 0; j < p; ++j) {
    if (best[j] == x[j]) a.indices.push_back(static_cast<int>(j));
  }
  return a;
}

ActiveSet ComputeActiveSet(const LabelingFn& f, const FeatureVector& x) {
  return ComputeActiveSet(f, ToPoint(f.domain(), x));
}

int FnDifference(const LabelingFn& theta, const LabelingFn& f, const Point& x,
                 const ActiveSet& f_active) {
  if (!(theta.domain() == f.domain())) {
    throw ValidationError("fn_difference: domain mismatch");
  }
  const std::vector<int> free = Complement(f_active.indices, x.size());
  int worst = 0;
  ForEachVariation(f.domain(), x, free, [&](const Point& z) {
    const std::span<const int> zs(z);
    if (theta(zs) != f(zs)) worst = 1;
    return worst == 0;
  });
  return worst;
}

int FnDifference(const LabelingFn& theta, const LabelingFn& f, const Point& x) {
  return FnDifference(theta, f, x, ComputeActiveSet(f, x));
}

int DependenceR(const LabelingFn& theta, const ActiveSet& a, const Point& x,
                Label y) {
  theta.domain().RequireEnumerable("dependence_r");
  int worst = 0;
  ForEachVariation(theta.domain(), x, a.indices, [&](const Point& z) {
    if (theta(std::span<const int>(z)) != y) worst = 1;
    return worst == 0;
  });
  return worst;
}

bool ActiveSetIsSufficient(const LabelingFn& f, const Point& x,
                           const ActiveSet& a) {
  const Label fx = f(std::span<const int>(x));
  const std::vector<int> free = Complement(a.indices, x.size());
  bool constant = true;
  ForEachVariation(f.domain(), x, free, [&](const Point& z) {
    if (f(std::span<const int>(z)) != fx) constant = false;
    return constant;
  });
  return constant;
}

}  // namespace harm
