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

#ifndef HARM_TRAIN_H_
#define HARM_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "harm/attacks.h"
#include "harm/dataset.h"
#include "harm/models.h"
#include "harm/rng.h"
#include "harm/world.h"

namespace harm {

enum class Method { kErm, kWt, kWrmArl, kWrmLff, kWrmGroupDro, kReg, kWr };

std::string ToString(Method method);
Method ParseMethod(const std::string& name);

struct TrainConfig {
  std::size_t epochs = 300;
  // Unset: 0.1 for logistic models, 0.05 for mlp.
  std::optional<double> learning_rate;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  double reg_balance = 1.0;
  std::size_t early_stop_patience = 0;  // 0 disables
  // Early stopping watches the mean loss on this set (training data when
  // null) and hands back the parameters of the best epoch.
  std::shared_ptr<const Dataset> early_stop_data;
  // Hidden width of the side model over representations; 0 = logistic.
  std::size_t side_hidden = 0;

  void Validate() const;
  double LearningRate(const Architecture& arch) const;
};

struct TraceRow {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_err = 0.0;
  std::optional<double> worst_group_err;
  std::optional<double> side_loss;
};

void WriteTraceCsv(const std::vector<TraceRow>& trace, std::ostream& out);
void WriteTraceCsv(const std::vector<TraceRow>& trace,
                   const std::filesystem::path& path);
std::vector<TraceRow> ReadTraceCsv(std::istream& in);
std::vector<TraceRow> ReadTraceCsv(const std::filesystem::path& path);

enum class SideTarget { kLabel, kAux };

struct SideModel {
  Architecture arch;
  ModelParams params;
  SideTarget target = SideTarget::kAux;
};

struct TrainResult {
  Model model;
  std::vector<TraceRow> trace;
  std::optional<SideModel> side;
};

// Extra candidates for the inner maximization; x itself is always added by
// the caller.
using Perturber =
    std::function<std::vector<FeatureVector>(const Sample&, const Model&, Rng&)>;

Perturber IdentityPerturber();
// Every element of Q(x) in the given world.
Perturber ExhaustivePerturber(const World& world);
// `draws` copies of x with the masked coordinates redrawn from N(mean, sd).
Perturber RandomizePerturber(std::vector<int> mask, std::size_t draws,
                             double mean = 0.0, double stddev = 1.0);
Perturber AttackPerturber(AttackKind kind, PerturbSpec spec);

// The loss-maximizing candidate among x and the perturber's output; ties
// keep the earlier candidate.
FeatureVector WorstCase(const Model& model, const Sample& s,
                        const Perturber& perturber, Rng& rng);

// Per-sample weight formulas.
std::vector<double> ArlWeights(std::span<const double> phi);
std::vector<double> LffWeights(std::span<const double> biased_loss,
                               std::span<const double> main_loss);
std::vector<double> GroupDroWeights(std::span<const double> loss,
                                    std::span<const int> groups);

enum class SchemeKind { kArl, kLff, kGroupDro, kUniform };

std::string ToString(SchemeKind kind);

class WeightScheme {
 public:
  // ARL adversary: logistic over (x, y). LFF biased model: same
  // architecture as the main model. GroupDRO and uniform keep no model.
  WeightScheme(SchemeKind kind, const Architecture& main_arch, Rng& init_rng);

  SchemeKind kind() const { return kind_; }
  const std::optional<Model>& side_model() const { return side_; }

  // Advances the side state on this batch, then returns one weight per
  // sample.
  std::vector<double> Update(std::span<const Sample* const> batch,
                             std::span<const FeatureVector> inputs,
                             const Model& theta, double learning_rate);

 private:
  SchemeKind kind_;
  std::optional<Model> side_;
};

TrainResult TrainErm(const Dataset& data, const Architecture& arch,
                     const TrainConfig& cfg);
TrainResult TrainWorstCase(const Dataset& data, const Architecture& arch,
                           const TrainConfig& cfg, const Perturber& perturber);
TrainResult TrainWrm(const Dataset& data, const Architecture& arch,
                     const TrainConfig& cfg, SchemeKind scheme);
TrainResult TrainRegularized(const Dataset& data, const Architecture& arch,
                             const TrainConfig& cfg, SideTarget target);
// Per batch: the side model learns clean (t = 0) from perturbed (t = 1)
// representations, then theta takes one step on the clean batch and one on
// the perturbed batch.
TrainResult TrainWr(const Dataset& data, const Architecture& arch,
                    const TrainConfig& cfg, const Perturber& perturber);

// Accuracy of a fresh probe trained on frozen representations of `encoder`
// to predict aux, measured on `eval`. The probe has cfg.side_hidden hidden
// units (0 = logistic).
double ProbeAccuracy(const Model& encoder, const Dataset& train,
                     const Dataset& eval, const TrainConfig& cfg);

// Mean logistic loss and zero-one error of a model on a dataset.
double MeanLoss(const Model& model, const Dataset& data);
double ZeroOneError(const Model& model, const Dataset& data);
// Largest per-group zero-one error; requires group ids.
double WorstGroupError(const Model& model, const Dataset& data);

}  // namespace harm

#endif  // HARM_TRAIN_H_
