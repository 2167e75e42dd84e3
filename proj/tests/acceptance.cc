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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.h"
#include "harm/attacks.h"
#include "harm/bounds.h"
#include "harm/config.h"
#include "harm/datagen.h"
#include "harm/experiment.h"
#include "harm/models.h"
#include "harm/report.h"
#include "harm/train.h"
#include "harm/world.h"
#include "oracles.h"

namespace harm {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path OutDir() { return HARM_ACCEPTANCE_OUT; }

fs::path ConfigPath(const char* name) {
  return fs::path(HARM_SOURCE_DIR) / "configs" / name;
}

// Criteria 1-3 share one suite run.
const VerifySummary& Suite() {
  static const VerifySummary summary = [] {
    VerifyOptions opts;  // 100 worlds, 20 trials, n = 50, delta = 0.1
    return RunVerifySuite(opts);
  }();
  return summary;
}

Outcome Theorem31() {
  const auto start = std::chrono::steady_clock::now();
  const VerifySummary& s = Suite();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double v = static_cast<double>(s.theorem31_violations());
  return {s.worlds.size() == 100 && v <= s.theorem31_allowance() && secs < 120.0,
          std::to_string(s.worlds.size()) + " worlds, violations " +
              std::to_string(s.theorem31_violations()) + " <= allowance " +
              Fmt("%.0f", s.theorem31_allowance()) + ", suite " + Fmt("%.1fs", secs)};
}

Outcome Theorem32() {
  const VerifySummary& s = Suite();
  return {s.worlds.size() == 100 && s.theorem32_violations() == 0 && s.seconds < 120.0,
          "violations " + std::to_string(s.theorem32_violations()) + " over " +
              std::to_string(s.worlds.size()) + " worlds"};
}

Outcome Lemma() {
  const VerifySummary& s = Suite();
  return {s.worlds.size() == 100 && s.lemma_counterexamples() == 0,
          "counterexamples " + std::to_string(s.lemma_counterexamples()) +
              " (flagged worlds swept separately: " +
              std::to_string(s.flagged_counterexamples) + ", informational)"};
}

Outcome OracleEquivalence() {
  Rng rng(404);
  std::size_t compared = 0, mismatches = 0;
  for (int w = 0; w < 50; ++w) {
    const ToyWorld toy = MakeToyWorld(ToyWorldConfig{}, rng);
    const World& world = toy.world;
    const Dataset src = SampleSource(world, 50, rng);
    std::vector<LabelingFn> thetas = toy.cls.members;
    for (int k = 0; k < 10; ++k) thetas.push_back(oracle::RandomFn(world.domain(), rng));
    const ProposerFactory exhaustive = [&world](std::size_t, const Sample& s) {
      return ListProposer(Materialize(PerturbationSet(world, s.x)));
    };
    const std::size_t budget = std::size_t{1} << world.misaligned_block().size();
    for (const LabelingFn& theta : thetas) {
      const PredictFn predict = [&theta](std::span<const double> x) {
        return static_cast<double>(theta(FeatureVector(x.begin(), x.end())));
      };
      const double sampled = EstimateCBySearch(predict, src, exhaustive, budget);
      const double exact = ComputeC(theta, src, world);
      ++compared;
      if (std::bit_cast<std::uint64_t>(sampled) != std::bit_cast<std::uint64_t>(exact)) {
        ++mismatches;
      }
    }
  }
  return {mismatches == 0, std::to_string(compared) + " (world, theta) pairs on 50 worlds, " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome Gradients() {
  double worst = 0;
  std::string detail;
  std::uint64_t seed = 1;
  for (ArchKind kind : {ArchKind::kLogistic, ArchKind::kMlp}) {
    for (bool params : {true, false}) {
      const double e = gradcheck::MaxError(kind, params, 100, seed++);
      worst = std::max(worst, e);
      detail += ToString(kind) + (params ? "/params " : "/inputs ") + Fmt("%.2e", e) + ", ";
    }
  }
  detail += "max " + Fmt("%.2e", worst) + " < 1e-4";
  return {worst < gradcheck::kTolerance, detail};
}

// Report rows keyed by method, in seed order.
std::map<std::string, std::vector<BoundReport>> ByMethod(const std::vector<ReportRow>& rows) {
  std::map<std::string, std::vector<BoundReport>> out;
  for (const ReportRow& r : rows) out[r.method].push_back(r.report);
  return out;
}

double Mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double Var(const std::vector<double>& v) {
  const double m = Mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

struct SyntheticRun {
  std::vector<ReportRow> rows;
  double seconds = 0;
  std::string error;
};

const SyntheticRun& Synthetic() {
  static const SyntheticRun run = [] {
    SyntheticRun r;
    const auto start = std::chrono::steady_clock::now();
    try {
      RunConfig cfg = LoadConfig(ConfigPath("synthetic.cfg"));
      cfg.out_dir = OutDir() / "synthetic";
      fs::remove_all(cfg.out_dir);
      CmdGenData(cfg);
      CmdTrain(cfg);
      CmdReport(cfg);
      r.rows = ReadReportCsv(cfg.out_dir / "report.csv");
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }();
  return run;
}

Outcome SyntheticBounds() {
  const SyntheticRun& run = Synthetic();
  if (!run.error.empty()) return {false, run.error};
  auto by = ByMethod(run.rows);
  const auto& erm = by["erm"];
  const auto& wt = by["wt"];
  if (erm.size() != 10 || wt.size() != 10) return {false, "expected 10 seeds"};
  std::vector<double> gap, wt_gap;
  int b = 0, c = 0;
  for (const BoundReport& r : erm) {
    gap.push_back(r.test_err - r.train_err);
    b += r.bound_c >= r.test_err;
    c += r.bound_c <= r.bound_d;
  }
  for (const BoundReport& r : wt) wt_gap.push_back(r.test_err - r.train_err);
  const bool a_ok = Mean(gap) >= 0.10;
  const bool b_ok = b >= 9;
  const bool c_ok = c >= 7;
  const bool d_ok = Mean(wt_gap) <= 0.05;
  const bool t_ok = run.seconds < 600.0;
  return {a_ok && b_ok && c_ok && d_ok && t_ok,
          std::string("(a) erm gap ") + Fmt("%.3f", Mean(gap)) + (a_ok ? " ok" : " FAIL") +
              "; (b) train+c >= test in " + std::to_string(b) + "/10" +
              (b_ok ? " ok" : " FAIL") + "; (c) train+c <= train+D in " +
              std::to_string(c) + "/10" + (c_ok ? " ok" : " FAIL") +
              "; (d) wt gap " + Fmt("%.3f", Mean(wt_gap)) + (d_ok ? " ok" : " FAIL") +
              "; pipeline " + Fmt("%.0fs", run.seconds) + (t_ok ? "" : " FAIL")};
}

Outcome MethodOrdering() {
  const SyntheticRun& run = Synthetic();
  if (!run.error.empty()) return {false, run.error};
  auto by = ByMethod(run.rows);
  std::map<std::string, std::vector<double>> test;
  for (const char* m : {"erm", "wt", "reg", "wrm-groupdro", "wr"}) {
    for (const BoundReport& r : by[m]) test[m].push_back(r.test_err);
    if (test[m].size() != 10) return {false, std::string("missing seeds for ") + m};
  }
  const double erm = Mean(test["erm"]);
  bool ok = true;
  std::string detail = "mean test err: erm " + Fmt("%.4f", erm);
  for (const char* m : {"wt", "reg", "wrm-groupdro"}) {
    const double v = Mean(test[m]);
    const bool below = erm > v;
    ok = ok && below;
    detail += std::string(", ") + m + " " + Fmt("%.4f", v) + (below ? "" : " (not below erm)");
  }
  // Accuracy comparison; pooled std of the two compared groups.
  const double wr_acc = 1.0 - Mean(test["wr"]);
  const std::string best = Mean(test["wt"]) <= Mean(test["reg"]) ? "wt" : "reg";
  const double best_acc = 1.0 - Mean(test[best]);
  const double pooled = std::sqrt(0.5 * (Var(test["wr"]) + Var(test[best])));
  const bool wr_ok = wr_acc >= best_acc - pooled;
  ok = ok && wr_ok;
  detail += "; wr acc " + Fmt("%.4f", wr_acc) + " vs max(wt, reg) " + Fmt("%.4f", best_acc) +
            " - pooled std " + Fmt("%.4f", pooled) + (wr_ok ? " ok" : " FAIL");
  return {ok, detail};
}

Outcome Digits() {
  const auto start = std::chrono::steady_clock::now();
  RunConfig cfg;
  try {
    cfg = LoadConfig(ConfigPath("mnist01.cfg"));
  } catch (const std::exception& e) {
    return {false, e.what()};
  }
  if (!fs::exists(cfg.train_images)) {
    return {true, "skipped: IDX files not found at " + cfg.train_images.string()};
  }
  cfg.out_dir = OutDir() / "mnist01";
  fs::remove_all(cfg.out_dir);
  std::string detail;
  int tighter = 0;
  bool ok = true;
  try {
    CmdGenData(cfg);
    CmdTrain(cfg);
    for (const char* kind : {"fgsm", "salt_pepper", "single_pixel"}) {
      RunConfig k = cfg;
      SetConfigValue(k, "attack.kind", kind);
      CmdAttack(k);
      CmdReport(k);
      fs::copy_file(k.out_dir / "report.csv",
                    k.out_dir / (std::string("report_") + kind + ".csv"),
                    fs::copy_options::overwrite_existing);
      auto by = ByMethod(ReadReportCsv(k.out_dir / "report.csv"));
      const BoundReport& erm = by["erm"].at(0);
      const BoundReport& wt = by["wt"].at(0);
      tighter += erm.bound_c <= erm.bound_d;
      detail += std::string(kind) + ": erm err " + Fmt("%.3f", erm.test_err) +
                " wt err " + Fmt("%.3f", wt.test_err) + " bound_c " +
                Fmt("%.3f", erm.bound_c) + " bound_d " + Fmt("%.3f", erm.bound_d) + "; ";
      if (std::string(kind) == "fgsm") {
        ok = ok && erm.test_err >= 0.5 && wt.test_err <= 0.2;
      }
    }
  } catch (const std::exception& e) {
    return {false, e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ok = ok && tighter >= 2 && secs < 600.0;
  detail += "bound_c <= bound_d in " + std::to_string(tighter) + "/3, " + Fmt("%.0fs", secs);
  return {ok, detail};
}

Outcome Determinism() {
  // Small synthetic pipeline, every method, two seeds, run twice.
  auto small = [](const fs::path& out) {
    RunConfig cfg = LoadConfig(ConfigPath("synthetic.cfg"));
    SetConfigValue(cfg, "data.n", "200");
    SetConfigValue(cfg, "train.epochs", "3");
    SetConfigValue(cfg, "train.method", "erm, wt, wrm-arl, wrm-lff, wrm-groupdro, reg, wr");
    SetConfigValue(cfg, "bounds.disc_epochs", "5");
    SetConfigValue(cfg, "seeds", "0, 1");
    cfg.out_dir = out;
    fs::remove_all(out);
    CmdGenData(cfg);
    CmdTrain(cfg);
    CmdAttack(cfg);
    CmdReport(cfg);
  };
  const fs::path a = OutDir() / "det_a", b = OutDir() / "det_b";
  std::size_t files = 0, differing = 0, checkpoints = 0, csvs = 0;
  std::string bad;
  try {
    small(a);
    small(b);
    for (const auto& e : fs::recursive_directory_iterator(a)) {
      if (!e.is_regular_file()) continue;
      const fs::path rel = fs::relative(e.path(), a);
      ++files;
      if (Slurp(e.path()) != Slurp(b / rel)) {
        ++differing;
        bad = rel.string();
      }
      const std::string ext = e.path().extension().string();
      if (ext == ".harm") {
        std::stringstream buf;
        SaveCheckpoint(LoadCheckpoint(e.path()), buf);
        if (buf.str() != Slurp(e.path())) {
          ++differing;
          bad = rel.string() + " (checkpoint round trip)";
        }
        ++checkpoints;
      } else if (ext == ".csv") {
        const std::string top = rel.begin()->string();
        std::stringstream again;
        if (top == "traces") {
          WriteTraceCsv(ReadTraceCsv(e.path()), again);
        } else if (rel == "report.csv") {
          WriteReportCsv(ReadReportCsv(e.path()), again);
        } else {
          WriteCsv(ReadCsv(e.path(), Origin::kSource), again);
        }
        if (again.str() != Slurp(e.path())) {
          ++differing;
          bad = rel.string() + " (csv self-parse)";
        }
        ++csvs;
      }
    }
  } catch (const std::exception& e) {
    return {false, e.what()};
  }
  return {differing == 0 && files > 0,
          std::to_string(files) + " files byte-identical across runs, " +
              std::to_string(checkpoints) + " checkpoints round-trip, " +
              std::to_string(csvs) + " CSVs self-parse" +
              (differing ? "; first mismatch " + bad : "")};
}

}  // namespace
}  // namespace harm

int main() {
  using harm::Outcome;
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 c-bound suite", harm::Theorem31},
      {"2 d-bound suite", harm::Theorem32},
      {"3 lemma sweep", harm::Lemma},
      {"4 flip search equals exact c", harm::OracleEquivalence},
      {"5 gradient checks", harm::Gradients},
      {"6 synthetic bounds", harm::SyntheticBounds},
      {"7 method ordering", harm::MethodOrdering},
      {"8 binary digits", harm::Digits},
      {"9 determinism and formats", harm::Determinism},
  };
  std::filesystem::create_directories(harm::OutDir());
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name,
                o.detail.c_str(), secs);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
