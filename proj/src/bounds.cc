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

#include "harm/bounds.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "harm/datagen.h"

namespace harm {

namespace {

constexpr double kSlack = 1e-12;

void CheckUnit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(std::string("bound report: ") + name +
                          " outside [0,1]");
  }
}

std::vector<std::uint64_t> Indices(const Domain& domain, const Dataset& data) {
  std::vector<std::uint64_t> out;
  out.reserve(data.size());
  for (const Sample& s : data.samples()) out.push_back(domain.Index(s.x));
  return out;
}

double CoincidenceRate(const LabelingFn& theta, const Dataset& data,
                       const World& world, ActiveSetCache* cache) {
  if (data.empty()) throw ValidationError("c: empty dataset");
  if (!(theta.domain() == world.domain())) {
    throw ValidationError("c: predictor domain differs from world");
  }
  ActiveSetCache local(world.f_m());
  ActiveSetCache& sets = cache ? *cache : local;
  std::size_t count = 0;
  for (const Sample& s : data.samples()) {
    const std::uint64_t idx = world.domain().Index(s.x);
    if (theta(idx) != s.y) continue;
    count += DependenceR(theta, sets.Get(idx), world.domain().PointAt(idx), s.y);
  }
  return static_cast<double>(count) / static_cast<double>(data.size());
}

}  // namespace

BoundReport BoundReport::Assemble(double train_err, double test_err, double c,
                                  double q, double d_theta, double phi,
                                  double delta) {
  CheckUnit(train_err, "train_err");
  CheckUnit(test_err, "test_err");
  CheckUnit(c, "c");
  CheckUnit(q, "q");
  CheckUnit(d_theta, "d_theta");
  if (!(phi >= 0.0)) throw ValidationError("bound report: phi < 0");
  BoundReport r;
  r.train_err = train_err;
  r.test_err = test_err;
  r.c = c;
  r.q = q;
  r.d_theta = d_theta;
  r.phi = phi;
  r.delta = delta;
  r.bound_c = train_err + c + phi;
  r.bound_d = train_err + d_theta;
  return r;
}

bool FiniteHypothesisClass::Contains(const LabelingFn& f) const {
  return std::find(members.begin(), members.end(), f) != members.end();
}

void FiniteHypothesisClass::Validate() const {
  if (members.empty()) throw ValidationError("hypothesis class: empty");
  if (members.size() > kMaxClassSize) {
    throw ValidationError("hypothesis class: too large");
  }
  for (const LabelingFn& m : members) {
    if (!(m.domain() == members.front().domain())) {
      throw ValidationError("hypothesis class: members over different domains");
    }
  }
}

const ActiveSet& ActiveSetCache::Get(std::uint64_t index) {
  auto it = cache_.find(index);
  if (it == cache_.end()) {
    it = cache_.emplace(index, ComputeActiveSet(f_, f_.domain().PointAt(index)))
             .first;
  }
  return it->second;
}

double TableError(const LabelingFn& theta, const Dataset& data) {
  if (data.empty()) throw ValidationError("error: empty dataset");
  std::size_t wrong = 0;
  for (const Sample& s : data.samples()) wrong += theta(s.x) != s.y;
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

double ComputeC(const LabelingFn& theta, const Dataset& data, const World& world,
                ActiveSetCache* f_m_cache) {
  return CoincidenceRate(theta, data, world, f_m_cache);
}

double ComputeQ(const LabelingFn& theta, const Dataset& target_data,
                const World& world, ActiveSetCache* f_m_cache) {
  return CoincidenceRate(theta, target_data, world, f_m_cache);
}

double WorstCaseUpperBound(const LabelingFn& theta, const Dataset& data,
                           const World& world) {
  if (data.empty()) throw ValidationError("worst-case bound: empty dataset");
  std::size_t count = 0;
  for (const Sample& s : data.samples()) {
    for (const FeatureVector& z : PerturbationSet(world, s.x)) {
      if (theta(z) != s.y) {
        ++count;
        break;
      }
    }
  }
  return static_cast<double>(count) / static_cast<double>(data.size());
}

double EstimateCBySearch(const PredictFn& predict, const Dataset& data,
                         const ProposerFactory& searcher, std::size_t budget) {
  if (budget == 0) throw ValidationError("c search: budget must be >= 1");
  if (data.empty()) throw ValidationError("c search: empty dataset");
  std::size_t count = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Sample& s = data[i];
    if (HardLabel(predict(s.x)) != s.y) continue;
    count += FlipSearch(predict, s.x, s.y, searcher(i, s), budget).flipped;
  }
  return static_cast<double>(count) / static_cast<double>(data.size());
}

double HDivergenceExhaustive(const FiniteHypothesisClass& cls, const Dataset& src,
                             const Dataset& tgt) {
  cls.Validate();
  if (src.size() != tgt.size()) {
    throw ValidationError("h-divergence: src and tgt sizes differ");
  }
  if (src.empty()) throw ValidationError("h-divergence: empty dataset");
  const std::size_t m = cls.size();
  if (m * (m + 1) / 2 > kMaxEnumerable) {
    throw ValidationError("h-divergence: class too large");
  }
  const Domain& domain = cls.members.front().domain();
  const auto src_idx = Indices(domain, src);
  const auto tgt_idx = Indices(domain, tgt);
  // Member outputs at the data points; g = a xor b is evaluated from these.
  std::vector<std::vector<std::uint8_t>> out_src(m), out_tgt(m);
  for (std::size_t k = 0; k < m; ++k) {
    for (auto i : src_idx) out_src[k].push_back(cls.members[k](i));
    for (auto i : tgt_idx) out_tgt[k].push_back(cls.members[k](i));
  }
  const std::size_t n = src.size();
  std::size_t best = 2 * n;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a; b < m; ++b) {
      std::size_t sum = 0;
      for (std::size_t i = 0; i < n; ++i) {
        sum += (out_src[a][i] ^ out_src[b][i]) == 0;
        sum += (out_tgt[a][i] ^ out_tgt[b][i]) == 1;
      }
      best = std::min(best, sum);
    }
  }
  const double d = 1.0 - static_cast<double>(best) / static_cast<double>(n);
  return std::clamp(d, 0.0, 1.0);
}

double HDivergenceDiscriminator(const Dataset& src, const Dataset& tgt,
                                const Architecture& arch,
                                const DiscriminatorConfig& cfg) {
  arch.Validate();
  if (src.empty() || tgt.empty()) {
    throw ValidationError("h-divergence: empty dataset");
  }
  if (src.dim() != arch.input_dim || tgt.dim() != arch.input_dim) {
    throw ValidationError("h-divergence: dimension mismatch");
  }
  if (cfg.epochs == 0 || cfg.batch_size == 0 || !(cfg.learning_rate > 0.0)) {
    throw ValidationError("h-divergence: bad discriminator config");
  }
  Rng rng(cfg.seed);
  Rng sub_rng = rng.Derive(4);
  const std::size_t n = std::min(src.size(), tgt.size());
  const Dataset s = src.size() > n ? Subsample(src, n, sub_rng) : src;
  const Dataset t = tgt.size() > n ? Subsample(tgt, n, sub_rng) : tgt;

  // Row i < n is a source point, row i >= n a target point. Inputs are
  // standardized over the pooled rows; the first layer is affine, so the
  // class is unchanged, but saturation at init is avoided.
  const std::size_t p = arch.input_dim;
  std::vector<double> mean(p, 0.0), scale(p, 0.0);
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const FeatureVector& x = i < n ? s[i].x : t[i - n].x;
    for (std::size_t j = 0; j < p; ++j) mean[j] += x[j];
  }
  for (double& m : mean) m /= static_cast<double>(2 * n);
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const FeatureVector& x = i < n ? s[i].x : t[i - n].x;
    for (std::size_t j = 0; j < p; ++j) {
      scale[j] += (x[j] - mean[j]) * (x[j] - mean[j]);
    }
  }
  for (double& v : scale) {
    v = std::sqrt(v / static_cast<double>(2 * n));
    v = v > 1e-12 ? 1.0 / v : 1.0;
  }
  std::vector<FeatureVector> rows(2 * n, FeatureVector(p));
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const FeatureVector& x = i < n ? s[i].x : t[i - n].x;
    for (std::size_t j = 0; j < p; ++j) rows[i][j] = (x[j] - mean[j]) * scale[j];
  }
  auto row = [&](std::size_t i) -> const FeatureVector& { return rows[i]; };
  // g = a xor b for two networks a, b of the given architecture, so that g
  // lies in the symmetric-difference class. Smooth form: pa + pb - 2 pa pb.
  Rng init_a = rng.Derive(0);
  Rng init_b = rng.Derive(5);
  Rng shuffle_rng = rng.Derive(1);
  ModelParams pa = InitParams(arch, init_a);
  ModelParams pb = InitParams(arch, init_b);
  std::vector<std::size_t> order(2 * n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.Shuffle(std::span<std::size_t>(order));
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      std::vector<double> ga(pa.size(), 0.0), gb(pb.size(), 0.0);
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t i = order[k];
        const double a = Forward(arch, pa, row(i)).prediction;
        const double b = Forward(arch, pb, row(i)).prediction;
        // Surrogate terms: (1 - g) on src, g on tgt.
        const double sign = i < n ? -1.0 : 1.0;
        const auto da = LogitBackward(arch, pa, row(i),
                                      sign * (1.0 - 2.0 * b) * a * (1.0 - a));
        const auto db = LogitBackward(arch, pb, row(i),
                                      sign * (1.0 - 2.0 * a) * b * (1.0 - b));
        for (std::size_t j = 0; j < ga.size(); ++j) ga[j] += da[j];
        for (std::size_t j = 0; j < gb.size(); ++j) gb[j] += db[j];
      }
      const double scale = cfg.learning_rate / static_cast<double>(end - begin);
      for (std::size_t j = 0; j < pa.size(); ++j) {
        pa[j] -= scale * ga[j];
        pb[j] -= scale * gb[j];
        if (!std::isfinite(pa[j]) || !std::isfinite(pb[j])) {
          throw NumericalError("h-divergence: discriminator diverged");
        }
      }
    }
  }
  std::size_t sum = 0;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const Label g = HardLabel(Forward(arch, pa, row(i)).prediction) ^
                    HardLabel(Forward(arch, pb, row(i)).prediction);
    sum += i < n ? (g == 0) : (g == 1);
  }
  const double d = 1.0 - static_cast<double>(sum) / static_cast<double>(n);
  return std::clamp(d, 0.0, 1.0);
}

double PhiFinite(std::size_t class_size, std::size_t n, double delta) {
  if (class_size < 1) throw ValidationError("phi: class size must be >= 1");
  if (n < 1) throw ValidationError("phi: n must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw ValidationError("phi: delta outside (0,1]");
  }
  const double num =
      std::log(static_cast<double>(class_size)) + std::log(1.0 / delta);
  return std::sqrt(num / (2.0 * static_cast<double>(n)));
}

bool SatisfiesA3(const LabelingFn& theta, const World& world, std::uint64_t x) {
  if (theta.IsConstant()) return true;
  const Label y = world.f_h()(x);
  if (theta(x) != y) return true;
  const Point pt = world.domain().PointAt(x);
  return FnDifference(theta, world.f_h(), pt) *
             FnDifference(theta, world.f_m(), pt) ==
         0;
}

double UniformTargetRisk(const LabelingFn& theta, const World& world) {
  std::size_t wrong = 0;
  for (std::uint64_t i = 0; i < world.domain().size(); ++i) {
    wrong += theta(i) != world.f_h()(i);
  }
  return static_cast<double>(wrong) / static_cast<double>(world.domain().size());
}

TheoremReport VerifyTheorem31(const World& world, const FiniteHypothesisClass& cls,
                              const Theorem31Options& options, Rng& rng) {
  cls.Validate();
  if (options.trials == 0 || options.n == 0) {
    throw ValidationError("verify c-bound: trials and n must be >= 1");
  }
  const double phi = PhiFinite(cls.size(), options.n, options.delta);
  std::vector<double> eps_t;
  for (const LabelingFn& theta : cls.members) {
    eps_t.push_back(UniformTargetRisk(theta, world));
  }
  ActiveSetCache cache(world.f_m());
  TheoremReport report;
  report.allowance = options.delta * static_cast<double>(options.trials) *
                     static_cast<double>(cls.size());
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    const Dataset src = SampleSource(world, options.n, rng);
    for (std::size_t k = 0; k < cls.size(); ++k) {
      const LabelingFn& theta = cls.members[k];
      const double rhs =
          TableError(theta, src) + ComputeC(theta, src, world, &cache) + phi;
      ++report.checks;
      if (eps_t[k] > rhs + kSlack) {
        ++report.violations;
        report.details.push_back({k, trial, 0, eps_t[k], rhs});
      }
    }
  }
  return report;
}

TheoremReport VerifyTheorem32(const World& world, const FiniteHypothesisClass& cls,
                              const Dataset& src, const Dataset& tgt) {
  cls.Validate();
  if (!cls.Contains(world.f_h().Complement())) {
    throw ValidationError("verify d-bound: 1 - f_h must belong to the class");
  }
  const double d = HDivergenceExhaustive(cls, src, tgt);
  ActiveSetCache cache(world.f_m());
  TheoremReport report;
  for (std::size_t k = 0; k < cls.size(); ++k) {
    const LabelingFn& theta = cls.members[k];
    const double c = ComputeC(theta, src, world, &cache);
    const double rhs = d + ComputeQ(theta, tgt, world, &cache);
    ++report.checks;
    if (c > rhs + kSlack) {
      ++report.violations;
      report.details.push_back({k, 0, 0, c, rhs});
    }
  }
  return report;
}

TheoremReport LemmaA1Sweep(const World& world, const FiniteHypothesisClass& cls) {
  cls.Validate();
  ActiveSetCache h_sets(world.f_h());
  ActiveSetCache m_sets(world.f_m());
  TheoremReport report;
  for (std::size_t k = 0; k < cls.size(); ++k) {
    const LabelingFn& theta = cls.members[k];
    if (theta.IsConstant()) continue;
    for (std::uint64_t x : world.support()) {
      const Label y = world.f_h()(x);
      if (theta(x) != y || !SatisfiesA3(theta, world, x)) continue;
      const Point pt = world.domain().PointAt(x);
      const ActiveSet& ah = h_sets.Get(x);
      const ActiveSet& am = m_sets.Get(x);
      const struct {
        const LabelingFn& f1;
        const ActiveSet& a1;
        const ActiveSet& a2;
      } orders[] = {{world.f_h(), ah, am}, {world.f_m(), am, ah}};
      for (const auto& o : orders) {
        ++report.checks;
        if (FnDifference(theta, o.f1, pt, o.a1) == 1 &&
            DependenceR(theta, o.a2, pt, y) == 0) {
          ++report.violations;
          report.details.push_back({k, 0, x, 1.0, 0.0});
        }
      }
    }
  }
  return report;
}

}  // namespace harm
