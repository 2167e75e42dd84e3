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

#include "harm/train.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

namespace harm {

std::string ToString(Method method) {
  switch (method) {
    case Method::kErm:
      return "erm";
    case Method::kWt:
      return "wt";
    case Method::kWrmArl:
      return "wrm-arl";
    case Method::kWrmLff:
      return "wrm-lff";
    case Method::kWrmGroupDro:
      return "wrm-groupdro";
    case Method::kReg:
      return "reg";
    case Method::kWr:
      return "wr";
  }
  return "";
}

Method ParseMethod(const std::string& name) {
  for (Method m : {Method::kErm, Method::kWt, Method::kWrmArl, Method::kWrmLff,
                   Method::kWrmGroupDro, Method::kReg, Method::kWr}) {
    if (ToString(m) == name) return m;
  }
  throw ValidationError("unknown method: " + name);
}

std::string ToString(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kArl:
      return "arl";
    case SchemeKind::kLff:
      return "lff";
    case SchemeKind::kGroupDro:
      return "groupdro";
    case SchemeKind::kUniform:
      return "uniform";
  }
  return "";
}

void TrainConfig::Validate() const {
  if (epochs < 1) throw ValidationError("train: epochs must be >= 1");
  if (batch_size < 1) throw ValidationError("train: batch_size must be >= 1");
  if (learning_rate && !(*learning_rate > 0.0 && std::isfinite(*learning_rate))) {
    throw ValidationError("train: learning_rate must be > 0");
  }
  if (!(reg_balance >= 0.0)) throw ValidationError("train: reg_balance < 0");
}

double TrainConfig::LearningRate(const Architecture& arch) const {
  if (learning_rate) return *learning_rate;
  return arch.kind == ArchKind::kLogistic ? 0.1 : 0.05;
}

void WriteTraceCsv(const std::vector<TraceRow>& trace, std::ostream& out) {
  const bool groups = !trace.empty() && trace.front().worst_group_err.has_value();
  const bool side = !trace.empty() && trace.front().side_loss.has_value();
  out << "epoch,train_loss,train_err";
  if (groups) out << ",worst_group_err";
  if (side) out << ",side_loss";
  out << '\n';
  for (const TraceRow& r : trace) {
    out << r.epoch << ',' << FormatReal(r.train_loss) << ','
        << FormatReal(r.train_err);
    if (groups) out << ',' << FormatReal(r.worst_group_err.value_or(0.0));
    if (side) out << ',' << FormatReal(r.side_loss.value_or(0.0));
    out << '\n';
  }
}

void WriteTraceCsv(const std::vector<TraceRow>& trace,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  WriteTraceCsv(trace, out);
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<TraceRow> ReadTraceCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("trace csv: missing header");
  const bool groups = line.find(",worst_group_err") != std::string::npos;
  const bool side = line.find(",side_loss") != std::string::npos;
  std::string expected = "epoch,train_loss,train_err";
  if (groups) expected += ",worst_group_err";
  if (side) expected += ",side_loss";
  if (line != expected) throw ValidationError("trace csv: bad header");
  const std::size_t width = 3 + (groups ? 1 : 0) + (side ? 1 : 0);
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != width) throw ValidationError("trace csv: bad row '" + line + "'");
    TraceRow r;
    try {
      std::size_t used = 0;
      r.epoch = std::stoull(cells[0], &used);
      if (used != cells[0].size()) throw std::invalid_argument(cells[0]);
    } catch (const std::exception&) {
      throw ValidationError("trace csv: bad epoch '" + cells[0] + "'");
    }
    r.train_loss = ParseReal(cells[1]);
    r.train_err = ParseReal(cells[2]);
    std::size_t k = 3;
    if (groups) r.worst_group_err = ParseReal(cells[k++]);
    if (side) r.side_loss = ParseReal(cells[k++]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<TraceRow> ReadTraceCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return ReadTraceCsv(in);
}

Perturber IdentityPerturber() {
  return [](const Sample&, const Model&, Rng&) {
    return std::vector<FeatureVector>{};
  };
}

Perturber ExhaustivePerturber(const World& world) {
  auto w = std::make_shared<World>(world);
  return [w](const Sample& s, const Model&, Rng&) {
    return Materialize(PerturbationSet(*w, s.x));
  };
}

Perturber RandomizePerturber(std::vector<int> mask, std::size_t draws,
                             double mean, double stddev) {
  return [mask = std::move(mask), draws, mean, stddev](const Sample& s,
                                                       const Model&, Rng& rng) {
    std::vector<FeatureVector> out;
    out.reserve(draws);
    for (std::size_t k = 0; k < draws; ++k) {
      FeatureVector z = s.x;
      for (int c : mask) z[c] = rng.Normal(mean, stddev);
      out.push_back(std::move(z));
    }
    return out;
  };
}

Perturber AttackPerturber(AttackKind kind, PerturbSpec spec) {
  return [kind, spec = std::move(spec)](const Sample& s, const Model& model,
                                        Rng& rng) {
    return std::vector<FeatureVector>{RunAttack(kind, model, s.x, s.y, spec, rng)};
  };
}

FeatureVector WorstCase(const Model& model, const Sample& s,
                        const Perturber& perturber, Rng& rng) {
  FeatureVector best = s.x;
  double best_loss = ModelLoss(model, s.x, s.y);
  for (FeatureVector& z : perturber(s, model, rng)) {
    const double l = ModelLoss(model, z, s.y);
    if (l > best_loss) {
      best_loss = l;
      best = std::move(z);
    }
  }
  return best;
}

std::vector<double> ArlWeights(std::span<const double> phi) {
  const double n = static_cast<double>(phi.size());
  double sum = 0.0;
  for (double v : phi) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw NumericalError("arl: adversary output must be finite and >= 0");
    }
    sum += v;
  }
  std::vector<double> w(phi.size(), 2.0);
  if (sum == 0.0) return w;
  for (std::size_t i = 0; i < phi.size(); ++i) w[i] = 1.0 + n * phi[i] / sum;
  return w;
}

std::vector<double> LffWeights(std::span<const double> biased_loss,
                               std::span<const double> main_loss) {
  if (biased_loss.size() != main_loss.size()) {
    throw ValidationError("lff: loss vectors differ in length");
  }
  std::vector<double> w(main_loss.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double den = biased_loss[i] + main_loss[i];
    w[i] = den == 0.0 ? 0.5 : biased_loss[i] / den;
  }
  return w;
}

std::vector<double> GroupDroWeights(std::span<const double> loss,
                                    std::span<const int> groups) {
  if (loss.size() != groups.size()) {
    throw ValidationError("groupdro: loss and group vectors differ in length");
  }
  std::map<int, double> peak;
  for (std::size_t i = 0; i < loss.size(); ++i) {
    auto [it, fresh] = peak.emplace(groups[i], loss[i]);
    if (!fresh) it->second = std::max(it->second, loss[i]);
  }
  std::map<int, double> total;
  std::vector<double> w(loss.size());
  for (std::size_t i = 0; i < loss.size(); ++i) {
    w[i] = std::exp(loss[i] - peak[groups[i]]);
    total[groups[i]] += w[i];
  }
  for (std::size_t i = 0; i < loss.size(); ++i) w[i] /= total[groups[i]];
  return w;
}

namespace {

void AddScaled(std::vector<double>& acc, const std::vector<double>& g, double w) {
  for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += w * g[j];
}

void ApplyStep(ModelParams& params, const std::vector<double>& grad, double scale,
               const char* what) {
  for (std::size_t j = 0; j < params.size(); ++j) {
    params[j] -= scale * grad[j];
    if (!std::isfinite(params[j])) {
      throw NumericalError(std::string(what) + ": parameter " +
                           std::to_string(j) + " became non-finite");
    }
  }
}

FeatureVector WithLabel(const FeatureVector& x, Label y) {
  FeatureVector v = x;
  v.push_back(static_cast<double>(y));
  return v;
}

}  // namespace

WeightScheme::WeightScheme(SchemeKind kind, const Architecture& main_arch,
                           Rng& init_rng)
    : kind_(kind) {
  if (kind == SchemeKind::kArl) {
    const Architecture a = Architecture::Logistic(main_arch.input_dim + 1);
    side_ = Model{a, InitParams(a, init_rng)};
  } else if (kind == SchemeKind::kLff) {
    side_ = Model{main_arch, InitParams(main_arch, init_rng)};
  }
}

std::vector<double> WeightScheme::Update(std::span<const Sample* const> batch,
                                         std::span<const FeatureVector> inputs,
                                         const Model& theta,
                                         double learning_rate) {
  const std::size_t b = batch.size();
  std::vector<double> loss(b);
  for (std::size_t i = 0; i < b; ++i) {
    loss[i] = ModelLoss(theta, inputs[i], batch[i]->y);
  }
  switch (kind_) {
    case SchemeKind::kUniform:
      return std::vector<double>(b, 1.0);
    case SchemeKind::kGroupDro: {
      std::vector<int> groups(b);
      for (std::size_t i = 0; i < b; ++i) {
        if (!batch[i]->group) throw ValidationError("groupdro: missing group id");
        groups[i] = *batch[i]->group;
      }
      return GroupDroWeights(loss, groups);
    }
    case SchemeKind::kLff: {
      Model& biased = *side_;
      std::vector<double> grad(biased.params.size(), 0.0);
      for (std::size_t i = 0; i < b; ++i) {
        AddScaled(grad, Backward(biased.arch, biased.params, inputs[i], batch[i]->y),
                  1.0);
      }
      ApplyStep(biased.params, grad, learning_rate / static_cast<double>(b), "lff");
      std::vector<double> biased_loss(b);
      for (std::size_t i = 0; i < b; ++i) {
        biased_loss[i] = ModelLoss(biased, inputs[i], batch[i]->y);
      }
      return LffWeights(biased_loss, loss);
    }
    case SchemeKind::kArl: {
      Model& adv = *side_;
      std::vector<FeatureVector> xy(b);
      std::vector<double> phi(b);
      double sum = 0.0, weighted = 0.0;
      for (std::size_t i = 0; i < b; ++i) {
        xy[i] = WithLabel(inputs[i], batch[i]->y);
        phi[i] = adv.Predict(xy[i]);
        sum += phi[i];
        weighted += phi[i] * loss[i];
      }
      // Ascent on sum_i (1 + b phi_i / sum phi) loss_i.
      if (sum > 0.0) {
        const double mean = weighted / sum;
        const double n = static_cast<double>(b);
        std::vector<double> grad(adv.params.size(), 0.0);
        for (std::size_t i = 0; i < b; ++i) {
          const double up =
              n * (loss[i] - mean) / sum * phi[i] * (1.0 - phi[i]);
          AddScaled(grad, LogitBackward(adv.arch, adv.params, xy[i], up), 1.0);
        }
        ApplyStep(adv.params, grad, -learning_rate / n, "arl");
      }
      for (std::size_t i = 0; i < b; ++i) phi[i] = adv.Predict(xy[i]);
      return ArlWeights(phi);
    }
  }
  return std::vector<double>(b, 1.0);
}

double MeanLoss(const Model& model, const Dataset& data) {
  if (data.empty()) throw ValidationError("loss: empty dataset");
  double sum = 0.0;
  for (const Sample& s : data.samples()) sum += ModelLoss(model, s.x, s.y);
  return sum / static_cast<double>(data.size());
}

double ZeroOneError(const Model& model, const Dataset& data) {
  if (data.empty()) throw ValidationError("error: empty dataset");
  std::size_t wrong = 0;
  for (const Sample& s : data.samples()) wrong += HardLabel(model.Predict(s.x)) != s.y;
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

double WorstGroupError(const Model& model, const Dataset& data) {
  if (!data.has_groups()) throw ValidationError("worst group: missing group ids");
  std::map<int, std::pair<std::size_t, std::size_t>> counts;
  for (const Sample& s : data.samples()) {
    auto& [wrong, total] = counts[*s.group];
    wrong += HardLabel(model.Predict(s.x)) != s.y;
    ++total;
  }
  double worst = 0.0;
  for (const auto& [g, c] : counts) {
    worst = std::max(worst, static_cast<double>(c.first) /
                                static_cast<double>(c.second));
  }
  return worst;
}

namespace {

struct LoopSpec {
  const Perturber* perturber = nullptr;
  std::optional<SchemeKind> scheme;
  std::optional<SideTarget> side_target;
  bool wr = false;
};

double TargetOf(const Sample& s, SideTarget target) {
  return target == SideTarget::kLabel ? s.y : *s.aux;
}

// One descent step of the side model on (e_theta(x_i), t_i). Returns the
// mean side loss before the step.
double SideStep(SideModel& side, const Model& theta,
                std::span<const FeatureVector> xs, std::span<const Label> t,
                double lr) {
  std::vector<double> grad(side.params.size(), 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto rep = Forward(theta.arch, theta.params, xs[i]).representation;
    const double s = Forward(side.arch, side.params, rep).prediction;
    loss += Loss(LossKind::kLogistic, s, t[i]);
    AddScaled(grad, LogitBackward(side.arch, side.params, rep, s - t[i]), 1.0);
  }
  ApplyStep(side.params, grad, lr / static_cast<double>(xs.size()), "side model");
  return loss / static_cast<double>(xs.size());
}

// Gradient with respect to theta's params of the side loss at (x, t).
std::vector<double> SideLossGradient(const SideModel& side, const Model& theta,
                                     const FeatureVector& x, Label t) {
  const auto rep = Forward(theta.arch, theta.params, x).representation;
  const auto up = InputGradient(side.arch, side.params, rep, t);
  return EncoderBackward(theta.arch, theta.params, x, up);
}

// Descends sum_i loss(theta(x_i), y_i) - reg * loss(side(e(x_i)), t_i).
void RegularizedStep(Model& model, const SideModel* side,
                     std::span<const FeatureVector> xs,
                     std::span<const Sample* const> batch,
                     std::span<const Label> t, std::span<const double> weights,
                     double reg, double lr) {
  std::vector<double> grad(model.params.size(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    AddScaled(grad, Backward(model.arch, model.params, xs[i], batch[i]->y),
              weights[i]);
  }
  if (side != nullptr && reg != 0.0) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      AddScaled(grad, SideLossGradient(*side, model, xs[i], t[i]), -reg);
    }
  }
  ApplyStep(model.params, grad, lr / static_cast<double>(xs.size()), "train");
}

TrainResult RunLoop(const Dataset& data, const Architecture& arch,
                    const TrainConfig& cfg, const LoopSpec& spec) {
  cfg.Validate();
  arch.Validate();
  if (data.empty()) throw ValidationError("train: empty dataset");
  if (data.dim() != arch.input_dim) {
    throw ValidationError("train: data dimension does not match architecture");
  }
  if (spec.scheme == SchemeKind::kGroupDro && !data.has_groups()) {
    throw ValidationError("train: groupdro needs a group id on every sample");
  }
  if (spec.side_target == SideTarget::kAux && !data.has_aux()) {
    throw ValidationError("train: annotation target needs aux on every sample");
  }
  const Rng root(cfg.seed);
  Rng init_rng = root.Derive(0);
  Rng shuffle_rng = root.Derive(1);
  Rng perturb_rng = root.Derive(2);
  Rng side_rng = root.Derive(3);

  TrainResult result;
  result.model = Model{arch, InitParams(arch, init_rng)};
  Model& model = result.model;
  std::optional<WeightScheme> scheme;
  if (spec.scheme) scheme.emplace(*spec.scheme, arch, side_rng);
  if (spec.side_target || spec.wr) {
    const std::size_t r = arch.RepresentationDim();
    const Architecture sa = cfg.side_hidden == 0
                                ? Architecture::Logistic(r)
                                : Architecture::Mlp(r, cfg.side_hidden);
    result.side = SideModel{sa, InitParams(sa, side_rng),
                            spec.side_target.value_or(SideTarget::kAux)};
  }
  SideModel* side = result.side ? &*result.side : nullptr;
  const double lr = cfg.LearningRate(arch);
  const double reg = cfg.reg_balance;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  ModelParams best_params;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.Shuffle(std::span<std::size_t>(order));
    double side_loss = 0.0;
    std::size_t side_updates = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      const std::size_t b = end - begin;
      std::vector<const Sample*> batch(b);
      std::vector<FeatureVector> inputs(b);
      for (std::size_t i = 0; i < b; ++i) {
        batch[i] = &data[order[begin + i]];
        inputs[i] = spec.perturber
                        ? WorstCase(model, *batch[i], *spec.perturber, perturb_rng)
                        : batch[i]->x;
      }
      const std::vector<double> ones(b, 1.0);
      if (spec.wr) {
        std::vector<FeatureVector> both;
        std::vector<Label> both_t;
        for (std::size_t i = 0; i < b; ++i) {
          both.push_back(batch[i]->x);
          both_t.push_back(0);
        }
        for (std::size_t i = 0; i < b; ++i) {
          both.push_back(inputs[i]);
          both_t.push_back(1);
        }
        side_loss += SideStep(*side, model, both, both_t, lr);
        ++side_updates;
        std::vector<FeatureVector> clean(b);
        for (std::size_t i = 0; i < b; ++i) clean[i] = batch[i]->x;
        const std::vector<Label> t0(b, 0), t1(b, 1);
        RegularizedStep(model, side, clean, batch, t0, ones, reg, lr);
        RegularizedStep(model, side, inputs, batch, t1, ones, reg, lr);
        continue;
      }
      const std::vector<double> weights =
          scheme ? scheme->Update(batch, inputs, model, lr) : ones;
      std::vector<Label> t(b, 0);
      if (side) {
        for (std::size_t i = 0; i < b; ++i) {
          t[i] = static_cast<Label>(TargetOf(*batch[i], side->target));
        }
        side_loss += SideStep(*side, model, inputs, t, lr);
        ++side_updates;
      }
      RegularizedStep(model, side, inputs, batch, t, weights, reg, lr);
    }
    TraceRow row;
    row.epoch = epoch;
    row.train_loss = MeanLoss(model, data);
    if (!std::isfinite(row.train_loss)) {
      throw NumericalError("train: non-finite loss at epoch " +
                           std::to_string(epoch));
    }
    row.train_err = ZeroOneError(model, data);
    if (data.has_groups()) row.worst_group_err = WorstGroupError(model, data);
    if (side) {
      row.side_loss = side_loss / static_cast<double>(std::max<std::size_t>(side_updates, 1));
    }
    result.trace.push_back(row);
    if (cfg.early_stop_patience > 0) {
      const double watched = cfg.early_stop_data
                                 ? MeanLoss(model, *cfg.early_stop_data)
                                 : row.train_loss;
      if (watched < best_loss) {
        best_loss = watched;
        best_params = model.params;
        stale = 0;
      } else if (++stale >= cfg.early_stop_patience) {
        break;
      }
    }
  }
  if (!best_params.empty()) model.params = std::move(best_params);
  return result;
}

}  // namespace

TrainResult TrainErm(const Dataset& data, const Architecture& arch,
                     const TrainConfig& cfg) {
  return RunLoop(data, arch, cfg, {});
}

TrainResult TrainWorstCase(const Dataset& data, const Architecture& arch,
                           const TrainConfig& cfg, const Perturber& perturber) {
  LoopSpec spec;
  spec.perturber = &perturber;
  return RunLoop(data, arch, cfg, spec);
}

TrainResult TrainWrm(const Dataset& data, const Architecture& arch,
                     const TrainConfig& cfg, SchemeKind scheme) {
  LoopSpec spec;
  spec.scheme = scheme;
  return RunLoop(data, arch, cfg, spec);
}

TrainResult TrainRegularized(const Dataset& data, const Architecture& arch,
                             const TrainConfig& cfg, SideTarget target) {
  LoopSpec spec;
  spec.side_target = target;
  return RunLoop(data, arch, cfg, spec);
}

TrainResult TrainWr(const Dataset& data, const Architecture& arch,
                    const TrainConfig& cfg, const Perturber& perturber) {
  LoopSpec spec;
  spec.perturber = &perturber;
  spec.wr = true;
  return RunLoop(data, arch, cfg, spec);
}

double ProbeAccuracy(const Model& encoder, const Dataset& train,
                     const Dataset& eval, const TrainConfig& cfg) {
  auto reps = [&](const Dataset& d) {
    if (!d.has_aux()) throw ValidationError("probe: aux required");
    std::vector<Sample> rows;
    rows.reserve(d.size());
    for (const Sample& s : d.samples()) {
      rows.push_back(
          {Forward(encoder.arch, encoder.params, s.x).representation, *s.aux, {}, {}});
    }
    return Dataset(std::move(rows), d.origin());
  };
  const Dataset rep_train = reps(train);
  const Dataset rep_eval = reps(eval);
  const std::size_t r = encoder.arch.RepresentationDim();
  const Architecture probe_arch = cfg.side_hidden == 0
                                      ? Architecture::Logistic(r)
                                      : Architecture::Mlp(r, cfg.side_hidden);
  const TrainResult probe = TrainErm(rep_train, probe_arch, cfg);
  return 1.0 - ZeroOneError(probe.model, rep_eval);
}

}  // namespace harm
