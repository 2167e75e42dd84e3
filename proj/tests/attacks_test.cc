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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <vector>

#include <gtest/gtest.h>

#include "harm/activeset.h"
#include "harm/attacks.h"
#include "harm/datagen.h"
#include "harm/models.h"
#include "harm/rng.h"
#include "harm/train.h"
#include "harm/world.h"
#include "oracles.h"

namespace harm {
namespace {

Model RandomModel(const Architecture& arch, std::uint64_t seed) {
  Rng rng(seed);
  ModelParams w(arch.ParamCount());
  for (double& v : w) v = rng.Normal();
  return {arch, w};
}

FeatureVector RandomPoint(std::size_t p, Rng& rng) {
  FeatureVector x(p);
  for (double& v : x) v = rng.Uniform();
  return x;
}

TEST(FgsmTest, ZeroEpsilonIsIdentity) {
  const Model m = RandomModel(Architecture::Mlp(5, 3), 1);
  Rng rng(2);
  const FeatureVector x = RandomPoint(5, rng);
  PerturbSpec spec = PerturbSpec::All(5, 0.0, 1.0);
  spec.epsilon = 0.0;
  EXPECT_EQ(Fgsm(m, x, 1, spec), x);
}

TEST(FgsmTest, EmptyMaskIsIdentity) {
  const Model m = RandomModel(Architecture::Logistic(4), 3);
  Rng rng(4);
  const FeatureVector x = RandomPoint(4, rng);
  EXPECT_EQ(Fgsm(m, x, 0, PerturbSpec::Masked(4, {}, 0.0, 1.0)), x);
}

TEST(FgsmTest, StaysInBallBoxAndMask) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Model m = RandomModel(Architecture::Mlp(6, 4), 100 + i);
    const FeatureVector x = RandomPoint(6, rng);
    PerturbSpec spec = PerturbSpec::Masked(6, {1, 3, 4}, 0.0, 1.0);
    spec.epsilon = 0.3;
    const FeatureVector z = Fgsm(m, x, static_cast<Label>(i % 2), spec);
    for (std::size_t j = 0; j < 6; ++j) {
      EXPECT_LE(std::abs(z[j] - x[j]), 0.3 + 1e-15);
      EXPECT_GE(z[j], 0.0);
      EXPECT_LE(z[j], 1.0);
      if (j != 1 && j != 3 && j != 4) {
        EXPECT_EQ(z[j], x[j]);
      }
    }
  }
}

TEST(FgsmTest, RaisesLossOnLogisticModels) {
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    const Model m = RandomModel(Architecture::Logistic(5), 200 + i);
    const FeatureVector x = RandomPoint(5, rng);
    const Label y = static_cast<Label>(i % 2);
    PerturbSpec spec = PerturbSpec::All(5, -10.0, 10.0);
    spec.epsilon = 0.5;
    EXPECT_GE(ModelLoss(m, Fgsm(m, x, y, spec), y), ModelLoss(m, x, y));
  }
}

TEST(SaltPepperTest, RateZeroKeepsX) {
  const Model m = RandomModel(Architecture::Mlp(5, 2), 7);
  Rng rng(8);
  const FeatureVector x = RandomPoint(5, rng);
  PerturbSpec spec = PerturbSpec::All(5, 0.0, 1.0);
  spec.rate = 0.0;
  EXPECT_EQ(SaltPepper(m, x, 1, spec, rng), x);
}

TEST(SaltPepperTest, RateOneHitsExtremes) {
  const Model m = RandomModel(Architecture::Mlp(5, 2), 9);
  Rng rng(10);
  const FeatureVector x = RandomPoint(5, rng);
  PerturbSpec spec = PerturbSpec::Masked(5, {0, 2}, 0.0, 1.0);
  spec.rate = 1.0;
  const FeatureVector z = SaltPepper(m, x, 0, spec, rng);
  for (int j : {0, 2}) EXPECT_TRUE(z[j] == 0.0 || z[j] == 1.0);
  for (int j : {1, 3, 4}) EXPECT_EQ(z[j], x[j]);
}

TEST(SaltPepperTest, BestDrawBeatsFirstDraw) {
  const Model m = RandomModel(Architecture::Mlp(8, 3), 11);
  Rng pt(12);
  for (int i = 0; i < 30; ++i) {
    const FeatureVector x = RandomPoint(8, pt);
    PerturbSpec one = PerturbSpec::All(8, 0.0, 1.0);
    one.rate = 0.3;
    one.steps = 1;
    PerturbSpec many = one;
    many.steps = 20;
    Rng a(50 + i), b(50 + i);
    EXPECT_GE(ModelLoss(m, SaltPepper(m, x, 1, many, a), 1),
              ModelLoss(m, SaltPepper(m, x, 1, one, b), 1));
  }
}

TEST(SaltPepperTest, NeedsBox) {
  const Model m = RandomModel(Architecture::Logistic(2), 1);
  PerturbSpec spec;
  spec.mask = {0};
  Rng rng(1);
  EXPECT_THROW(SaltPepper(m, {0.5, 0.5}, 1, spec, rng), ValidationError);
}

TEST(SinglePixelTest, HammingDistanceAtMostOne) {
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const Model m = RandomModel(Architecture::Mlp(6, 3), 300 + i);
    const FeatureVector x = RandomPoint(6, rng);
    const FeatureVector z = SinglePixel(m, x, i % 2, PerturbSpec::All(6, 0.0, 1.0));
    int changed = 0;
    for (std::size_t j = 0; j < 6; ++j) changed += z[j] != x[j];
    EXPECT_LE(changed, 1);
    EXPECT_GE(ModelLoss(m, z, i % 2), ModelLoss(m, x, i % 2));
  }
}

TEST(SinglePixelTest, ModelReadingOneCoordinateChangesThatCoordinate) {
  // logit = 4 x_2 - 2; with y = 1 the loss grows as x_2 falls.
  const Model m{Architecture::Logistic(4), {0, 0, 4, 0, -2}};
  const FeatureVector x = {0.5, 0.5, 0.5, 0.5};
  const FeatureVector z = SinglePixel(m, x, 1, PerturbSpec::All(4, 0.0, 1.0));
  EXPECT_EQ(z, (FeatureVector{0.5, 0.5, 0.0, 0.5}));
}

TEST(SinglePixelTest, EmptyMaskIsIdentity) {
  const Model m = RandomModel(Architecture::Logistic(3), 14);
  const FeatureVector x = {0.1, 0.2, 0.3};
  EXPECT_EQ(SinglePixel(m, x, 1, PerturbSpec::Masked(3, {}, 0.0, 1.0)), x);
}

TEST(FlipSearchTest, ConstantModelNeverFlips) {
  const PredictFn one = [](std::span<const double>) { return 0.9; };
  Rng rng(15);
  const FeatureVector x = {0.5, 0.5};
  const auto r = FlipSearch(one, x, 1,
                            GaussianProposer(x, {0, 1}, 0.0, 100.0, rng), 100);
  EXPECT_FALSE(r.flipped);
  EXPECT_FALSE(r.witness.has_value());
  EXPECT_EQ(r.proposals, 100u);
}

TEST(FlipSearchTest, ZeroStepsNeverFlips) {
  const PredictFn zero = [](std::span<const double>) { return 0.1; };
  const auto r = FlipSearch(zero, {0.0}, 1, ListProposer({{1.0}}), 0);
  EXPECT_FALSE(r.flipped);
}

TEST(FlipSearchTest, WitnessFlipsPrediction) {
  const PredictFn sign = [](std::span<const double> x) { return x[0] > 0 ? 0.8 : 0.2; };
  const auto r = FlipSearch(sign, {1.0}, 1, ListProposer({{2.0}, {-1.0}, {-3.0}}), 5);
  ASSERT_TRUE(r.flipped);
  EXPECT_EQ(*r.witness, FeatureVector{-1.0});
  EXPECT_EQ(r.proposals, 2u);
}

TEST(FlipSearchTest, ExhaustiveProposalsMatchDependenceR) {
  Rng rng(16);
  std::size_t checked = 0;
  for (int k = 0; k < 30; ++k) {
    const ToyWorld toy = MakeToyWorld(ToyWorldConfig{}, rng);
    const World& w = toy.world;
    for (int t = 0; t < 3; ++t) {
      const LabelingFn theta = oracle::RandomFn(w.domain(), rng);
      const PredictFn predict = [&theta](std::span<const double> x) {
        return static_cast<double>(theta(FeatureVector(x.begin(), x.end())));
      };
      for (std::uint64_t i : w.support()) {
        const Point p = w.domain().PointAt(i);
        const FeatureVector x = w.domain().VectorAt(i);
        const Label y = w.f_h()(i);
        const auto q = Materialize(PerturbationSet(w, x));
        const auto r = FlipSearch(predict, x, y, ListProposer(q), q.size());
        EXPECT_EQ(r.flipped ? 1 : 0,
                  DependenceR(theta, ComputeActiveSet(w.f_m(), p), p, y));
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(ProposerTest, FgsmRadiusGrows) {
  const Model m{Architecture::Logistic(1), {1.0, 0.0}};
  PerturbSpec spec = PerturbSpec::All(1, -10.0, 10.0);
  spec.epsilon = 1.0;
  spec.steps = 4;
  const Proposer p = FgsmProposer(m, {0.0}, 1, spec);
  EXPECT_DOUBLE_EQ((*p(0))[0], -0.25);
  EXPECT_DOUBLE_EQ((*p(3))[0], -1.0);
  EXPECT_FALSE(p(4).has_value());
}

TEST(ProposerTest, SinglePixelEnumeratesBothExtremes) {
  const Proposer p = SinglePixelProposer({0.5, 0.5}, PerturbSpec::All(2, 0.0, 1.0));
  EXPECT_EQ(*p(0), (FeatureVector{0.0, 0.5}));
  EXPECT_EQ(*p(1), (FeatureVector{1.0, 0.5}));
  EXPECT_EQ(*p(3), (FeatureVector{0.5, 1.0}));
  EXPECT_FALSE(p(4).has_value());
}

TEST(PerturbSpecTest, Validation) {
  PerturbSpec spec = PerturbSpec::All(3, 0.0, 1.0);
  spec.epsilon = -1.0;
  EXPECT_THROW(spec.Validate(3), ValidationError);
  spec = PerturbSpec::Masked(3, {5}, 0.0, 1.0);
  EXPECT_THROW(spec.Validate(3), ValidationError);
  spec = PerturbSpec::All(3, 1.0, 0.0);
  EXPECT_THROW(spec.Validate(3), ValidationError);
  spec = PerturbSpec::All(3, 0.0, 1.0);
  spec.rate = 1.5;
  EXPECT_THROW(spec.Validate(3), ValidationError);
  EXPECT_THROW(ParseAttackKind("deepfool"), ValidationError);
  for (AttackKind k : {AttackKind::kFgsm, AttackKind::kSaltPepper,
                       AttackKind::kSinglePixel}) {
    EXPECT_EQ(ParseAttackKind(ToString(k)), k);
  }
}

Dataset SmallClean(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Sample> rows;
  for (int i = 0; i < 20; ++i) rows.push_back({RandomPoint(4, rng), i % 2, i % 3, {}});
  return Dataset(std::move(rows), Origin::kSource);
}

TEST(AdversarialTestsetTest, IdentitySpecCopiesData) {
  const Dataset clean = SmallClean(17);
  const Model m = RandomModel(Architecture::Mlp(4, 2), 18);
  PerturbSpec spec = PerturbSpec::All(4, 0.0, 1.0);
  spec.epsilon = 0.0;
  const Dataset adv = BuildAdversarialTestset(m, clean, AttackKind::kFgsm, spec, Rng(1));
  ASSERT_EQ(adv.size(), clean.size());
  EXPECT_EQ(adv.origin(), Origin::kTarget);
  for (std::size_t i = 0; i < adv.size(); ++i) {
    EXPECT_EQ(adv[i].x, clean[i].x);
    EXPECT_EQ(adv[i].y, clean[i].y);
    EXPECT_EQ(adv[i].group, clean[i].group);
  }
}

TEST(AdversarialTestsetTest, SeededAndSizePreserving) {
  const Dataset clean = SmallClean(19);
  const Model m = RandomModel(Architecture::Mlp(4, 2), 20);
  const PerturbSpec spec = PerturbSpec::All(4, 0.0, 1.0);
  const Dataset a = BuildAdversarialTestset(m, clean, AttackKind::kSaltPepper, spec, Rng(3));
  const Dataset b = BuildAdversarialTestset(m, clean, AttackKind::kSaltPepper, spec, Rng(3));
  ASSERT_EQ(a.size(), clean.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].x, b[i].x);
}

std::filesystem::path MnistDir() {
  if (const char* env = std::getenv("HARM_MNIST_DIR")) return env;
  return HARM_DEFAULT_MNIST_DIR;
}

TEST(AdversarialTestsetTest, FgsmBreaksDigitVictim) {
  const auto dir = MnistDir();
  if (!std::filesystem::exists(dir / "train-images-idx3-ubyte")) {
    GTEST_SKIP() << "digit data not found in " << dir;
  }
  const Dataset train =
      LoadIdx(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte");
  const Dataset test =
      LoadIdx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
  PerturbSpec spec = PerturbSpec::All(train.dim(), 0.0, 1.0);
  spec.epsilon = 0.3;
  for (std::uint64_t seed : {0, 1, 2}) {
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.seed = seed;
    const Model victim = TrainErm(train, Architecture::Mlp(train.dim(), 16), cfg).model;
    EXPECT_LT(ZeroOneError(victim, test), 0.05);
    const Dataset adv =
        BuildAdversarialTestset(victim, test, AttackKind::kFgsm, spec, Rng(seed));
    EXPECT_GE(ZeroOneError(victim, adv), 0.5) << "seed " << seed;
  }
}

}  // namespace
}  // namespace harm
