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

#include "harm/datagen.h"

#include <array>
#include <fstream>
#include <set>

namespace harm {

std::string ToString(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "";
}

Split ParseSplit(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw ValidationError("unknown split: " + name);
}

void SyntheticConfig::Validate() const {
  if (n < 1) throw ValidationError("synthetic: n must be >= 1");
  if (p < 4 || p % 4 != 0) {
    throw ValidationError("synthetic: p must be a positive multiple of 4");
  }
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw ValidationError("synthetic: rho outside [0,1]");
  }
}

std::vector<int> SyntheticConfig::SpuriousBlock() const {
  std::vector<int> block;
  for (std::size_t j = spurious_begin(); j < p; ++j) {
    block.push_back(static_cast<int>(j));
  }
  return block;
}

EffectSizes DrawEffectSizes(const SyntheticConfig& cfg) {
  cfg.Validate();
  Rng rng = Rng(cfg.seed).Derive(100);
  EffectSizes e;
  e.beta1.resize(cfg.signal_dim());
  e.beta2.resize(cfg.signal_dim());
  for (double& b : e.beta1) b = rng.Normal();
  for (double& b : e.beta2) b = rng.Normal();
  return e;
}

Dataset GenSynthetic(const SyntheticConfig& cfg, const EffectSizes& effects,
                     Split split) {
  cfg.Validate();
  const std::size_t q = cfg.signal_dim();
  if (effects.beta1.size() != q || effects.beta2.size() != q) {
    throw ValidationError("synthetic: effect sizes must have length p/4");
  }
  Rng rng = Rng(cfg.seed).Derive(10 + static_cast<std::uint64_t>(split));
  const bool shifted = split != Split::kTest;
  std::vector<Sample> rows;
  rows.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    Sample s;
    s.x.resize(cfg.p);
    for (std::size_t j = 0; j < cfg.spurious_begin(); ++j) s.x[j] = rng.Normal();
    double c1 = 0.0, c2 = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
      c1 += s.x[j] * effects.beta1[j];
      c2 += s.x[j] * effects.beta2[j];
    }
    const bool r1 = rng.Bernoulli(Sigmoid(c1));
    const bool r2 = rng.Bernoulli(Sigmoid(c2));
    s.y = r1 == r2 ? 1 : 0;
    const double mean = s.y == 1 ? 1.0 : -1.0;
    bool fired = false;
    if (shifted && !cfg.per_coordinate) fired = rng.Bernoulli(cfg.rho);
    for (std::size_t j = cfg.spurious_begin(); j < cfg.p; ++j) {
      bool on = fired;
      if (shifted && cfg.per_coordinate) {
        on = rng.Bernoulli(cfg.rho);
        fired = fired || on;
      }
      s.x[j] = rng.Normal(on ? mean : 0.0, 1.0);
    }
    s.group = fired ? 1 : 0;
    s.aux = s.group;
    rows.push_back(std::move(s));
  }
  return Dataset(std::move(rows),
                 shifted ? Origin::kSource : Origin::kTarget);
}

void ToyWorldConfig::Validate() const {
  if (aligned_bits < 1 || misaligned_bits < 1) {
    throw ValidationError("toy world: blocks must be non-empty");
  }
  if (aligned_bits > 3 || misaligned_bits > 3) {
    throw ValidationError("toy world: block size must be <= 3");
  }
  if (regeneration_budget < 1) {
    throw ValidationError("toy world: regeneration budget must be >= 1");
  }
}

namespace {

std::vector<int> Range(std::size_t begin, std::size_t end) {
  std::vector<int> v;
  for (std::size_t j = begin; j < end; ++j) v.push_back(static_cast<int>(j));
  return v;
}

// Index of x's restriction to `block` (first block coordinate fastest).
std::uint64_t BlockCode(const Point& x, const Domain& domain,
                        const std::vector<int>& block) {
  std::uint64_t code = 0;
  for (auto it = block.rbegin(); it != block.rend(); ++it) {
    code = code * static_cast<std::uint64_t>(domain.alphabet_sizes()[*it]) +
           static_cast<std::uint64_t>(x[*it]);
  }
  return code;
}

LabelingFn Lift(const Domain& domain, const std::vector<int>& block,
                std::uint64_t block_table) {
  std::vector<std::uint8_t> table(domain.size());
  for (std::uint64_t i = 0; i < domain.size(); ++i) {
    const std::uint64_t code = BlockCode(domain.PointAt(i), domain, block);
    table[i] = static_cast<std::uint8_t>((block_table >> code) & 1U);
  }
  return LabelingFn(domain, std::move(table));
}

}  // namespace

std::vector<LabelingFn> BlockFunctions(const Domain& domain,
                                       const std::vector<int>& block) {
  for (int c : block) {
    if (domain.alphabet_sizes()[c] != 2) {
      throw ValidationError("block functions: binary alphabets required");
    }
  }
  if (block.size() > 5) throw ValidationError("block functions: block too large");
  const std::uint64_t points = std::uint64_t{1} << block.size();
  const std::uint64_t count = std::uint64_t{1} << points;
  std::vector<LabelingFn> out;
  for (std::uint64_t t = 1; t + 1 < count; ++t) out.push_back(Lift(domain, block, t));
  return out;
}

bool HasSufficientActiveSets(const LabelingFn& f) {
  const Domain& d = f.domain();
  for (std::uint64_t i = 0; i < d.size(); ++i) {
    const Point x = d.PointAt(i);
    if (!ActiveSetIsSufficient(f, x, ComputeActiveSet(f, x))) return false;
  }
  return true;
}

FiniteHypothesisClass ToyClass(const World& world) {
  FiniteHypothesisClass cls;
  for (const auto* block : {&world.aligned_block(), &world.misaligned_block()}) {
    for (const LabelingFn& theta : BlockFunctions(world.domain(), *block)) {
      bool ok = true;
      for (std::uint64_t x : world.support()) {
        if (!SatisfiesA3(theta, world, x)) {
          ok = false;
          break;
        }
      }
      if (ok) cls.members.push_back(theta);
    }
  }
  const LabelingFn not_h = world.f_h().Complement();
  if (!cls.Contains(not_h)) cls.members.push_back(not_h);
  return cls;
}

ToyWorld MakeToyWorld(const ToyWorldConfig& cfg, Rng& rng) {
  cfg.Validate();
  const std::size_t a = cfg.aligned_bits;
  const std::size_t m = cfg.misaligned_bits;
  const Domain domain(std::vector<int>(a + m, 2));
  const std::vector<int> aligned = Range(0, a);
  const std::vector<int> misaligned = Range(a, a + m);
  const std::vector<LabelingFn> h_all = BlockFunctions(domain, aligned);
  const std::vector<LabelingFn> m_all = BlockFunctions(domain, misaligned);

  // Sufficiency is decided on the block alone: a block function's active
  // set never contains coordinates outside its block.
  auto admissible = [&](std::size_t bits) {
    const Domain block_domain(std::vector<int>(bits, 2));
    std::vector<std::size_t> keep;
    const auto fns = BlockFunctions(block_domain, Range(0, bits));
    for (std::size_t k = 0; k < fns.size(); ++k) {
      if (!cfg.require_sufficient || HasSufficientActiveSets(fns[k])) {
        keep.push_back(k);
      }
    }
    return keep;
  };
  const std::vector<std::size_t> h_ok = admissible(a);
  const std::vector<std::size_t> m_ok = admissible(m);

  for (std::size_t attempt = 0; attempt < cfg.regeneration_budget; ++attempt) {
    const LabelingFn& f_h = h_all[h_ok[rng.UniformInt(h_ok.size())]];
    const LabelingFn& f_m = m_all[m_ok[rng.UniformInt(m_ok.size())]];
    bool agree = false;
    for (std::uint64_t i = 0; i < domain.size() && !agree; ++i) {
      agree = f_h(i) == f_m(i);
    }
    if (!agree) continue;
    World world(domain, f_h, f_m, aligned, misaligned);
    FiniteHypothesisClass cls = ToyClass(world);
    return ToyWorld{std::move(world), std::move(cls)};
  }
  throw ValidationError("toy world: regeneration budget exhausted");
}

Dataset SampleSource(const World& world, std::size_t n, Rng& rng) {
  if (n < 1) throw ValidationError("sample source: n must be >= 1");
  const auto& support = world.support();
  std::vector<Sample> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t idx = support[rng.UniformInt(support.size())];
    rows.push_back({world.domain().VectorAt(idx), world.f_h()(idx), {}, {}});
  }
  return Dataset(std::move(rows), Origin::kSource);
}

Dataset SampleTargetCovered(const World& world, const Dataset& src, std::size_t n,
                            Rng& rng) {
  if (n < 1) throw ValidationError("sample target: n must be >= 1");
  const Domain& d = world.domain();
  std::set<std::uint64_t> seen;
  for (const Sample& s : src.samples()) {
    seen.insert(BlockCode(d.PointAt(d.Index(s.x)), d, world.aligned_block()));
  }
  std::vector<std::uint64_t> pool;
  for (std::uint64_t i = 0; i < d.size(); ++i) {
    if (seen.count(BlockCode(d.PointAt(i), d, world.aligned_block()))) {
      pool.push_back(i);
    }
  }
  if (pool.empty()) throw ValidationError("sample target: empty source");
  std::vector<Sample> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t idx = pool[rng.UniformInt(pool.size())];
    rows.push_back({d.VectorAt(idx), world.f_h()(idx), {}, {}});
  }
  return Dataset(std::move(rows), Origin::kTarget);
}

namespace {

std::uint32_t ReadBe32(std::istream& in, const std::string& what) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (in.gcount() != 4) throw ValidationError(what + ": truncated header");
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

}  // namespace

Dataset LoadIdx(const std::filesystem::path& images_path,
                const std::filesystem::path& labels_path) {
  std::ifstream images(images_path, std::ios::binary);
  if (!images) throw IoError("cannot open: " + images_path.string());
  std::ifstream labels(labels_path, std::ios::binary);
  if (!labels) throw IoError("cannot open: " + labels_path.string());

  if (ReadBe32(images, "idx images") != 0x00000803) {
    throw ValidationError("idx images: bad magic");
  }
  const std::uint32_t count = ReadBe32(images, "idx images");
  const std::uint32_t rows = ReadBe32(images, "idx images");
  const std::uint32_t cols = ReadBe32(images, "idx images");
  if (ReadBe32(labels, "idx labels") != 0x00000801) {
    throw ValidationError("idx labels: bad magic");
  }
  const std::uint32_t label_count = ReadBe32(labels, "idx labels");
  if (label_count != count) {
    throw ValidationError("idx: image and label counts differ");
  }
  const std::size_t p = static_cast<std::size_t>(rows) * cols;
  if (p == 0) throw ValidationError("idx images: zero-sized images");

  std::vector<Sample> out;
  std::vector<unsigned char> pixels(p);
  for (std::uint32_t i = 0; i < count; ++i) {
    images.read(reinterpret_cast<char*>(pixels.data()),
                static_cast<std::streamsize>(p));
    if (images.gcount() != static_cast<std::streamsize>(p)) {
      throw ValidationError("idx images: truncated data");
    }
    char digit = 0;
    labels.read(&digit, 1);
    if (labels.gcount() != 1) throw ValidationError("idx labels: truncated data");
    const auto label = static_cast<unsigned char>(digit);
    if (label > 1) continue;
    Sample s;
    s.x.resize(p);
    for (std::size_t j = 0; j < p; ++j) s.x[j] = pixels[j] / 255.0;
    s.y = label;
    out.push_back(std::move(s));
  }
  if (out.empty()) throw ValidationError("idx: no digit 0 or 1 samples");
  return Dataset(std::move(out), Origin::kSource);
}

}  // namespace harm
