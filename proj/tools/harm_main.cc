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


// harm: command-line front end.
//
//   harm [--config PATH] [--out DIR] [--seed N] <gen-data|train|attack|report|verify>
//
// Exit codes: 0 ok, 1 validation error (or a failed verification), 2
// numerical failure, 3 IO error.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "harm/config.h"
#include "harm/core.h"
#include "harm/experiment.h"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kNumerical = 2;
constexpr int kIo = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Misaligned-feature bounds and robust training workbench"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "run config (section.key = value)");
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "single seed (overrides seeds)");

  app.add_subcommand("gen-data", "write train/val/test data and a manifest");
  app.add_subcommand("train", "train every configured method for every seed");
  app.add_subcommand("attack", "build adversarial test sets against the erm model");
  app.add_subcommand("report", "bound report CSV and SVG");
  app.add_subcommand("verify", "toy-world theorem and lemma suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    harm::RunConfig cfg;
    if (!config_path.empty()) cfg = harm::LoadConfig(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed) harm::SetConfigValue(cfg, "seeds", std::to_string(*seed));

    if (command == "gen-data") {
      harm::CmdGenData(cfg);
    } else if (command == "train") {
      harm::CmdTrain(cfg);
    } else if (command == "attack") {
      harm::CmdAttack(cfg);
    } else if (command == "report") {
      harm::CmdReport(cfg);
    } else if (command == "verify") {
      if (!harm::CmdVerify(cfg)) {
        std::cerr << "harm verify: violations found, see "
                  << (cfg.out_dir / "verify.json").string() << "\n";
        return kValidation;
      }
    }
  } catch (const harm::ValidationError& e) {
    std::cerr << "harm " << command << ": " << e.what() << "\n";
    return kValidation;
  } catch (const harm::NumericalError& e) {
    std::cerr << "harm " << command << ": numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const harm::IoError& e) {
    std::cerr << "harm " << command << ": " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "harm " << command << ": " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
