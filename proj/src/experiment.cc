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


#include "harm/experiment.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "harm/core.h"
#include "harm/report.h"

namespace harm {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void RequireFile(const fs::path& path, const std::string& hint) {
  if (!fs::exists(path)) throw IoError("missing " + path.string() + " (" + hint + ")");
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

Json ReportJson(const TheoremReport& r, const std::vector<std::string>& tables) {
  Json j;
  j["checks"] = r.checks;
  j["violations"] = r.violations;
  j["allowance"] = r.allowance;
  Json details = Json::array();
  for (const Violation& v : r.details) {
    Json d;
    d["theta"] = v.theta;
    if (v.theta < tables.size()) d["theta_table"] = tables[v.theta];
    d["trial"] = v.trial;
    d["point"] = v.point;
    d["lhs"] = v.lhs;
    d["rhs"] = v.rhs;
    details.push_back(std::move(d));
  }
  j["details"] = std::move(details);
  return j;
}

// Perturber used by the worst-case methods (wt, wr).
Perturber MethodPerturber(const RunConfig& cfg, std::size_t p, const World* world) {
  switch (cfg.data_kind) {
    case DataKind::kSynthetic: {
      SyntheticConfig sc = cfg.synthetic;
      sc.p = p;
      return RandomizePerturber(sc.SpuriousBlock(), cfg.wt_draws);
    }
    case DataKind::kWorld:
      if (world == nullptr) throw ValidationError("world perturber needs a world");
      return ExhaustivePerturber(*world);
    case DataKind::kIdx:
      return AttackPerturber(cfg.attack_kind, cfg.AttackSpec(p));
  }
  return IdentityPerturber();
}

BoundSettings MakeBoundSettings(const RunConfig& cfg, std::size_t p,
                                std::uint64_t seed) {
  BoundSettings s;
  s.delta = cfg.delta;
  s.class_size = cfg.class_size;
  s.search.kind = cfg.attack_kind;
  s.search.spec = cfg.AttackSpec(p);
  s.search.budget = cfg.search_budget;
  s.search.seed = seed;
  s.discriminator = cfg.discriminator;
  s.discriminator.seed = seed;
  s.discriminator_hidden = cfg.discriminator_hidden;
  return s;
}

Dataset Limit(const Dataset& data, std::size_t limit) {
  if (limit == 0 || limit >= data.size()) return data;
  std::vector<std::size_t> idx(limit);
  for (std::size_t i = 0; i < limit; ++i) idx[i] = i;
  return data.Subset(idx);
}

void WriteManifest(const RunConfig& cfg, const std::vector<std::string>& files) {
  Json m;
  m["config_hash"] = cfg.Hash();
  m["config"] = Json::object();
  for (const auto& [k, v] : cfg.entries) m["config"][k] = v;
  m["data_kind"] = ToString(cfg.data_kind);
  m["seeds"] = cfg.seeds;
  m["files"] = files;
  WriteText(cfg.out_dir / "manifest.json", m.dump(2) + "\n");
}

std::string Rel(const RunConfig& cfg, const fs::path& path) {
  return fs::relative(path, cfg.out_dir).generic_string();
}

}  // namespace

SyntheticData MakeSyntheticData(const SyntheticConfig& cfg) {
  SyntheticData d;
  d.effects = DrawEffectSizes(cfg);
  d.train = GenSynthetic(cfg, d.effects, Split::kTrain);
  d.val = GenSynthetic(cfg, d.effects, Split::kVal);
  d.test = GenSynthetic(cfg, d.effects, Split::kTest);
  return d;
}

void RequireMethodInputs(Method method, const Dataset& data) {
  if (method == Method::kWrmGroupDro && !data.has_groups()) {
    throw ValidationError(ToString(method) + " needs a group column on every sample");
  }
  if ((method == Method::kReg || method == Method::kWr) && !data.has_aux()) {
    throw ValidationError(ToString(method) + " needs an aux column on every sample");
  }
}

TrainResult TrainMethod(Method method, const Dataset& data,
                        const Architecture& arch, const TrainConfig& cfg,
                        const Perturber& perturber) {
  RequireMethodInputs(method, data);
  switch (method) {
    case Method::kErm: return TrainErm(data, arch, cfg);
    case Method::kWt: return TrainWorstCase(data, arch, cfg, perturber);
    case Method::kWrmArl: return TrainWrm(data, arch, cfg, SchemeKind::kArl);
    case Method::kWrmLff: return TrainWrm(data, arch, cfg, SchemeKind::kLff);
    case Method::kWrmGroupDro:
      return TrainWrm(data, arch, cfg, SchemeKind::kGroupDro);
    case Method::kReg: return TrainRegularized(data, arch, cfg, SideTarget::kAux);
    case Method::kWr: return TrainWr(data, arch, cfg, perturber);
  }
  throw ValidationError("unknown method");
}

double SearchC(const Model& model, const Dataset& data,
               const SearchSettings& search) {
  if (data.empty()) throw ValidationError("search c: empty dataset");
  search.spec.Validate(data.dim());
  const Rng root(search.seed);
  PerturbSpec spec = search.spec;
  spec.steps = search.budget;
  ProposerFactory factory;
  switch (search.kind) {
    case AttackKind::kFgsm:
      factory = [&model, spec](std::size_t, const Sample& s) {
        return FgsmProposer(model, s.x, s.y, spec);
      };
      break;
    case AttackKind::kSaltPepper:
      factory = [spec, &root](std::size_t i, const Sample& s) {
        return SaltPepperProposer(s.x, spec, root.Derive(i));
      };
      break;
    case AttackKind::kSinglePixel:
      factory = [spec](std::size_t, const Sample& s) {
        return SinglePixelProposer(s.x, spec);
      };
      break;
  }
  const PredictFn predict = [&model](std::span<const double> x) {
    return model.Predict(x);
  };
  std::size_t budget = search.budget;
  if (search.kind == AttackKind::kSinglePixel) {
    // One proposal per candidate change.
    budget = std::max<std::size_t>(budget, 2 * spec.mask.size());
  }
  return EstimateCBySearch(predict, data, factory, budget);
}

BoundReport SearchBoundReport(const Model& model, const Dataset& train,
                              const Dataset& test, const BoundSettings& s) {
  const double train_err = ZeroOneError(model, train);
  const double test_err = ZeroOneError(model, test);
  const double c = SearchC(model, train, s.search);
  SearchSettings tsearch = s.search;
  tsearch.seed = Rng(s.search.seed).Derive(1).NextU64();
  const double q = SearchC(model, test, tsearch);
  const Architecture disc_arch =
      s.discriminator_hidden == 0
          ? Architecture::Logistic(train.dim())
          : Architecture::Mlp(train.dim(), s.discriminator_hidden);
  const double d = HDivergenceDiscriminator(train, test, disc_arch, s.discriminator);
  const double phi = PhiFinite(s.class_size, train.size(), s.delta);
  return BoundReport::Assemble(train_err, test_err, c, q, d, phi, s.delta);
}

BoundReport ExactBoundReport(const Model& model, const World& world,
                             const FiniteHypothesisClass& cls,
                             const Dataset& train, const Dataset& test,
                             double delta) {
  const LabelingFn theta = LabelingFn::Tabulate(
      world.domain(), [&model](const FeatureVector& x) { return model.Predict(x); });
  ActiveSetCache cache(world.f_m());
  const double c = ComputeC(theta, train, world, &cache);
  const double q = ComputeQ(theta, test, world, &cache);
  const double d = HDivergenceExhaustive(cls, train, test);
  const double phi = PhiFinite(cls.size(), train.size(), delta);
  return BoundReport::Assemble(TableError(theta, train), TableError(theta, test),
                               c, q, d, phi, delta);
}

bool VerifySummary::passed() const {
  return std::all_of(worlds.begin(), worlds.end(),
                     [](const WorldVerdict& w) {
                       return w.theorem32.violations == 0 && w.lemma.violations == 0;
                     }) &&
         static_cast<double>(theorem31_violations()) <= theorem31_allowance();
}

std::size_t VerifySummary::theorem31_violations() const {
  std::size_t n = 0;
  for (const auto& w : worlds) n += w.theorem31.violations;
  return n;
}

double VerifySummary::theorem31_allowance() const {
  double a = 0;
  for (const auto& w : worlds) a += w.theorem31.allowance;
  return a;
}

std::size_t VerifySummary::theorem32_violations() const {
  std::size_t n = 0;
  for (const auto& w : worlds) n += w.theorem32.violations;
  return n;
}

std::size_t VerifySummary::lemma_counterexamples() const {
  std::size_t n = 0;
  for (const auto& w : worlds) n += w.lemma.violations;
  return n;
}

std::string VerifySummary::ToJson() const {
  Json j;
  j["passed"] = passed();
  Json totals;
  totals["worlds"] = worlds.size();
  totals["theorem_3_1_violations"] = theorem31_violations();
  totals["theorem_3_1_allowance"] = theorem31_allowance();
  totals["theorem_3_2_violations"] = theorem32_violations();
  totals["lemma_a1_counterexamples"] = lemma_counterexamples();
  totals["flagged_worlds"] = flagged_worlds;
  totals["flagged_lemma_counterexamples"] = flagged_counterexamples;
  j["totals"] = std::move(totals);
  Json list = Json::array();
  for (const WorldVerdict& w : worlds) {
    Json e;
    e["index"] = w.index;
    e["f_h"] = w.f_h;
    e["f_m"] = w.f_m;
    e["class_size"] = w.class_size;
    e["class"] = w.class_tables;
    e["passed"] = w.passed();
    e["theorem_3_1"] = ReportJson(w.theorem31, w.class_tables);
    e["theorem_3_2"] = ReportJson(w.theorem32, w.class_tables);
    e["lemma_a1"] = ReportJson(w.lemma, w.class_tables);
    list.push_back(std::move(e));
  }
  j["worlds"] = std::move(list);
  return j.dump(2) + "\n";
}

WorldVerdict VerifyWorld(std::size_t index, const World& world,
                         const FiniteHypothesisClass& cls,
                         const VerifyOptions& options, Rng& rng) {
  WorldVerdict v;
  v.index = index;
  v.f_h = world.f_h().Bitstring();
  v.f_m = world.f_m().Bitstring();
  v.class_size = cls.size();
  for (const LabelingFn& f : cls.members) v.class_tables.push_back(f.Bitstring());
  Rng t31_rng = rng.Derive(1);
  v.theorem31 = VerifyTheorem31(world, cls, options.theorem31, t31_rng);
  Rng sample_rng = rng.Derive(2);
  const Dataset src = SampleSource(world, options.sample_n, sample_rng);
  const Dataset tgt = SampleTargetCovered(world, src, options.sample_n, sample_rng);
  v.theorem32 = VerifyTheorem32(world, cls, src, tgt);
  v.lemma = LemmaA1Sweep(world, cls);
  return v;
}

VerifySummary RunVerifySuite(const VerifyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  VerifySummary summary;
  const Rng root(options.seed);
  for (std::size_t w = 0; w < options.worlds; ++w) {
    Rng world_rng = root.Derive(w);
    Rng build_rng = world_rng.Derive(0);
    const ToyWorld toy = MakeToyWorld(options.world, build_rng);
    summary.worlds.push_back(VerifyWorld(w, toy.world, toy.cls, options, world_rng));
    if (options.flagged_sweep) {
      ToyWorldConfig loose = options.world;
      loose.require_sufficient = false;
      Rng loose_rng = world_rng.Derive(3);
      const ToyWorld other = MakeToyWorld(loose, loose_rng);
      if (!other.world.InsufficientActiveSetPoints().empty()) {
        ++summary.flagged_worlds;
        summary.flagged_counterexamples +=
            LemmaA1Sweep(other.world, other.cls).violations;
      }
    }
  }
  summary.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start).count();
  return summary;
}

fs::path DataDir(const RunConfig& cfg, std::uint64_t seed) {
  if (cfg.data_kind == DataKind::kIdx) return cfg.out_dir / "data";
  return cfg.out_dir / "data" / ("seed" + std::to_string(seed));
}

fs::path CheckpointPath(const RunConfig& cfg, Method method, std::uint64_t seed) {
  return cfg.out_dir / "models" /
         (ToString(method) + "_seed" + std::to_string(seed) + ".harm");
}

fs::path AdversarialPath(const RunConfig& cfg, AttackKind kind, std::uint64_t seed) {
  return cfg.out_dir / "adversarial" /
         (ToString(kind) + "_seed" + std::to_string(seed) + ".csv");
}

void CmdGenData(const RunConfig& cfg) {
  EnsureDir(cfg.out_dir);
  std::vector<std::string> files;
  if (cfg.data_kind == DataKind::kIdx) {
    RequireFile(cfg.train_images, "data.train_images");
    RequireFile(cfg.train_labels, "data.train_labels");
    RequireFile(cfg.test_images, "data.test_images");
    RequireFile(cfg.test_labels, "data.test_labels");
    const fs::path dir = DataDir(cfg, 0);
    EnsureDir(dir);
    const Dataset train =
        Limit(LoadIdx(cfg.train_images, cfg.train_labels), cfg.train_limit);
    const Dataset test = Limit(LoadIdx(cfg.test_images, cfg.test_labels),
                               cfg.test_limit).WithOrigin(Origin::kTarget);
    WriteCsv(train, dir / "train.csv");
    WriteCsv(test, dir / "test.csv");
    files = {Rel(cfg, dir / "train.csv"), Rel(cfg, dir / "test.csv")};
  }
  for (std::uint64_t seed : cfg.seeds) {
    if (cfg.data_kind == DataKind::kIdx) break;
    const fs::path dir = DataDir(cfg, seed);
    EnsureDir(dir);
    if (cfg.data_kind == DataKind::kSynthetic) {
      SyntheticConfig sc = cfg.synthetic;
      sc.seed = seed;
      const SyntheticData d = MakeSyntheticData(sc);
      WriteCsv(d.train, dir / "train.csv");
      WriteCsv(d.val, dir / "val.csv");
      WriteCsv(d.test, dir / "test.csv");
      for (const char* name : {"train.csv", "val.csv", "test.csv"}) {
        files.push_back(Rel(cfg, dir / name));
      }
    } else {
      Rng rng(seed);
      Rng build = rng.Derive(0);
      const ToyWorld toy = MakeToyWorld(cfg.world, build);
      Rng sample = rng.Derive(1);
      const Dataset src = SampleSource(toy.world, cfg.sample_n, sample);
      const Dataset tgt = SampleTargetCovered(toy.world, src, cfg.sample_n, sample);
      WriteWorld(toy.world, dir / "world.txt");
      WriteCsv(src, dir / "train.csv");
      WriteCsv(tgt, dir / "test.csv");
      for (const char* name : {"world.txt", "train.csv", "test.csv"}) {
        files.push_back(Rel(cfg, dir / name));
      }
    }
  }
  WriteManifest(cfg, files);
}

void CmdTrain(const RunConfig& cfg) {
  EnsureDir(cfg.out_dir / "models");
  EnsureDir(cfg.out_dir / "traces");
  for (std::uint64_t seed : cfg.seeds) {
    const fs::path dir = DataDir(cfg, seed);
    RequireFile(dir / "train.csv", "run gen-data first");
    const Dataset train = ReadCsv(dir / "train.csv", Origin::kSource);
    // Validate every method before spending time on any of them.
    for (Method m : cfg.methods) RequireMethodInputs(m, train);
    std::optional<World> world;
    if (cfg.data_kind == DataKind::kWorld) world = ReadWorld(dir / "world.txt");
    const Architecture arch = cfg.MakeArch(train.dim());
    const Perturber perturber =
        MethodPerturber(cfg, train.dim(), world ? &*world : nullptr);
    for (Method m : cfg.methods) {
      TrainConfig tc = cfg.train;
      tc.seed = seed;
      const TrainResult r = TrainMethod(m, train, arch, tc, perturber);
      SaveCheckpoint(r.model, CheckpointPath(cfg, m, seed));
      WriteTraceCsv(r.trace, cfg.out_dir / "traces" /
                                 (ToString(m) + "_seed" + std::to_string(seed) + ".csv"));
    }
  }
}

void CmdAttack(const RunConfig& cfg) {
  EnsureDir(cfg.out_dir / "adversarial");
  for (std::uint64_t seed : cfg.seeds) {
    const fs::path dir = DataDir(cfg, seed);
    RequireFile(dir / "test.csv", "run gen-data first");
    const fs::path victim_path = CheckpointPath(cfg, Method::kErm, seed);
    RequireFile(victim_path, "train the erm victim first");
    const Dataset clean = ReadCsv(dir / "test.csv", Origin::kTarget);
    const Model victim = LoadCheckpoint(victim_path);
    const Dataset adv = BuildAdversarialTestset(
        victim, clean, cfg.attack_kind, cfg.AttackSpec(clean.dim()), Rng(seed));
    WriteCsv(adv, AdversarialPath(cfg, cfg.attack_kind, seed));
  }
}

void CmdReport(const RunConfig& cfg) {
  if (cfg.estimator == Estimator::kExact && cfg.data_kind != DataKind::kWorld) {
    throw ValidationError("bounds.estimator = exact requires data.kind = world");
  }
  std::vector<ReportRow> rows;
  for (std::uint64_t seed : cfg.seeds) {
    const fs::path dir = DataDir(cfg, seed);
    RequireFile(dir / "train.csv", "run gen-data first");
    const Dataset train = ReadCsv(dir / "train.csv", Origin::kSource);
    fs::path test_path = dir / "test.csv";
    if (cfg.data_kind == DataKind::kIdx) {
      test_path = AdversarialPath(cfg, cfg.attack_kind, seed);
      RequireFile(test_path, "run attack first");
    }
    const Dataset test = ReadCsv(test_path, Origin::kTarget);
    std::optional<World> world;
    std::optional<FiniteHypothesisClass> cls;
    if (cfg.estimator == Estimator::kExact) {
      world = ReadWorld(dir / "world.txt");
      cls = ToyClass(*world);
    }
    for (Method m : cfg.methods) {
      const fs::path ckpt = CheckpointPath(cfg, m, seed);
      RequireFile(ckpt, "run train first");
      const Model model = LoadCheckpoint(ckpt);
      ReportRow row{ToString(m), seed, {}};
      if (world) {
        row.report = ExactBoundReport(model, *world, *cls, train, test, cfg.delta);
      } else {
        row.report = SearchBoundReport(model, train, test,
                                       MakeBoundSettings(cfg, train.dim(), seed));
      }
      rows.push_back(std::move(row));
    }
  }
  EnsureDir(cfg.out_dir);
  WriteReportCsv(rows, cfg.out_dir / "report.csv");
  if (cfg.emit_svg) {
    WriteReportSvg(rows, "bounds (" + ToString(cfg.data_kind) + ")",
                   cfg.out_dir / "report.svg");
  }
}

bool CmdVerify(const RunConfig& cfg) {
  VerifyOptions opts;
  opts.worlds = cfg.worlds;
  opts.world = cfg.world;
  opts.theorem31.trials = cfg.trials;
  opts.theorem31.n = cfg.sample_n;
  opts.theorem31.delta = cfg.delta;
  opts.sample_n = cfg.sample_n;
  opts.seed = cfg.seeds.front();
  VerifySummary summary;
  if (!cfg.world_file.empty()) {
    const World world = ReadWorld(cfg.world_file);
    const FiniteHypothesisClass cls = ToyClass(world);
    Rng rng(opts.seed);
    summary.worlds.push_back(VerifyWorld(0, world, cls, opts, rng));
  } else {
    summary = RunVerifySuite(opts);
  }
  EnsureDir(cfg.out_dir);
  WriteText(cfg.out_dir / "verify.json", summary.ToJson());
  return summary.passed();
}

}  // namespace harm
