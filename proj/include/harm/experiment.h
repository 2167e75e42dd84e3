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


// Pipelines shared by the command-line tool and the acceptance suite:
// per-method training dispatch, bound reports on parametric models, the
// toy-world verification suite and the file-level commands.

#ifndef HARM_EXPERIMENT_H_
#define HARM_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "harm/attacks.h"
#include "harm/bounds.h"
#include "harm/config.h"
#include "harm/datagen.h"
#include "harm/dataset.h"
#include "harm/models.h"
#include "harm/train.h"
#include "harm/world.h"

namespace harm {

struct SyntheticData {
  EffectSizes effects;
  Dataset train;
  Dataset val;
  Dataset test;
};

SyntheticData MakeSyntheticData(const SyntheticConfig& cfg);

// Throws ValidationError when `data` lacks what `method` needs: group ids
// for wrm-groupdro, aux for reg and wr.
void RequireMethodInputs(Method method, const Dataset& data);

TrainResult TrainMethod(Method method, const Dataset& data,
                        const Architecture& arch, const TrainConfig& cfg,
                        const Perturber& perturber);

// How c (and q) are searched for on continuous data.
struct SearchSettings {
  AttackKind kind = AttackKind::kFgsm;
  PerturbSpec spec;
  std::size_t budget = 10;
  std::uint64_t seed = 0;
};

double SearchC(const Model& model, const Dataset& data,
               const SearchSettings& search);

struct BoundSettings {
  double delta = kDefaultDelta;
  std::size_t class_size = 1;
  SearchSettings search;
  DiscriminatorConfig discriminator;
  std::size_t discriminator_hidden = 8;  // 0 = logistic
};

// c and q by search, D by a trained discriminator between train and test.
BoundReport SearchBoundReport(const Model& model, const Dataset& train,
                              const Dataset& test, const BoundSettings& s);

// Everything exact: the model is tabulated over the world's domain and D is
// taken over the world's hypothesis class.
BoundReport ExactBoundReport(const Model& model, const World& world,
                             const FiniteHypothesisClass& cls,
                             const Dataset& train, const Dataset& test,
                             double delta);

struct VerifyOptions {
  std::size_t worlds = 100;
  ToyWorldConfig world;
  Theorem31Options theorem31;
  std::size_t sample_n = 50;  // source / target size for the c <= D + q check
  std::uint64_t seed = 0;
  // Also sweep worlds built without the sufficiency filter and report their
  // lemma counterexamples (never counted as failures).
  bool flagged_sweep = true;
};

struct WorldVerdict {
  std::size_t index = 0;
  std::string f_h;  // truth tables
  std::string f_m;
  std::size_t class_size = 0;
  std::vector<std::string> class_tables;
  TheoremReport theorem31;
  TheoremReport theorem32;
  TheoremReport lemma;
  bool passed() const {
    return theorem31.passed() && theorem32.violations == 0 &&
           lemma.violations == 0;
  }
};

struct VerifySummary {
  std::vector<WorldVerdict> worlds;
  std::size_t flagged_worlds = 0;
  std::size_t flagged_counterexamples = 0;
  double seconds = 0.0;

  bool passed() const;
  std::size_t theorem31_violations() const;
  double theorem31_allowance() const;
  std::size_t theorem32_violations() const;
  std::size_t lemma_counterexamples() const;
  std::string ToJson() const;
};

WorldVerdict VerifyWorld(std::size_t index, const World& world,
                         const FiniteHypothesisClass& cls,
                         const VerifyOptions& options, Rng& rng);
VerifySummary RunVerifySuite(const VerifyOptions& options);

// File-level commands. Layout under out_dir:
//   manifest.json
//   data/seed<k>/{train,val,test}.csv     synthetic
//   data/seed<k>/{world.txt,train,test}   world
//   data/{train,test}.csv                 idx
//   models/<method>_seed<k>.harm, traces/<method>_seed<k>.csv
//   adversarial/<kind>_seed<k>.csv        built against the erm model
//   report.csv, report.svg, verify.json
std::filesystem::path DataDir(const RunConfig& cfg, std::uint64_t seed);
std::filesystem::path CheckpointPath(const RunConfig& cfg, Method method,
                                     std::uint64_t seed);
std::filesystem::path AdversarialPath(const RunConfig& cfg, AttackKind kind,
                                      std::uint64_t seed);

void CmdGenData(const RunConfig& cfg);
void CmdTrain(const RunConfig& cfg);
void CmdAttack(const RunConfig& cfg);
void CmdReport(const RunConfig& cfg);
// Returns true when no hard violation was found.
bool CmdVerify(const RunConfig& cfg);

}  // namespace harm

#endif  // HARM_EXPERIMENT_H_
