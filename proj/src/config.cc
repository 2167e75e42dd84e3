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


#include "harm/config.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "harm/core.h"
#include "harm/dataset.h"

namespace harm {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t ToU64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const unsigned long long out = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ValidationError("config: " + key + " expects a non-negative integer, got '" +
                          v + "'");
  }
}

std::size_t ToSize(const std::string& key, const std::string& v) {
  return static_cast<std::size_t>(ToU64(key, v));
}

double ToReal(const std::string& key, const std::string& v) {
  try {
    return ParseReal(v);
  } catch (const std::exception&) {
    throw ValidationError("config: " + key + " expects a number, got '" + v + "'");
  }
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError("config: " + key + " expects true/false, got '" + v + "'");
}

std::vector<int> ToIndexList(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (std::uint64_t i : ParseSeedList(v)) {
    if (i > 1u << 24) throw ValidationError("config: index too large in " + key);
    out.push_back(static_cast<int>(i));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::unordered_map<std::string, Setter>& Setters() {
  static const auto* table = new std::unordered_map<std::string, Setter>{
      {"data.kind",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "synthetic") {
           c.data_kind = DataKind::kSynthetic;
         } else if (v == "world") {
           c.data_kind = DataKind::kWorld;
         } else if (v == "idx") {
           c.data_kind = DataKind::kIdx;
         } else {
           throw ValidationError("config: " + k + " must be synthetic, world or idx");
         }
       }},
      {"data.n", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synthetic.n = ToSize(k, v);
       }},
      {"data.p", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synthetic.p = ToSize(k, v);
       }},
      {"data.rho", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synthetic.rho = ToReal(k, v);
       }},
      {"data.per_coordinate",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synthetic.per_coordinate = ToBool(k, v);
       }},
      {"data.aligned_bits",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.world.aligned_bits = ToSize(k, v);
       }},
      {"data.misaligned_bits",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.world.misaligned_bits = ToSize(k, v);
       }},
      {"data.require_sufficient",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.world.require_sufficient = ToBool(k, v);
       }},
      {"data.worlds", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.worlds = ToSize(k, v);
       }},
      {"data.trials", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.trials = ToSize(k, v);
       }},
      {"data.sample_n",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sample_n = ToSize(k, v);
       }},
      {"data.world_file",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.world_file = v;
       }},
      {"data.train_images",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.train_images = v;
       }},
      {"data.train_labels",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.train_labels = v;
       }},
      {"data.test_images",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.test_images = v;
       }},
      {"data.test_labels",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.test_labels = v;
       }},
      {"data.train_limit",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train_limit = ToSize(k, v);
       }},
      {"data.test_limit",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.test_limit = ToSize(k, v);
       }},
      {"model.arch", [](RunConfig& c, const std::string&, const std::string& v) {
         c.arch_kind = ParseArchKind(v);
       }},
      {"model.hidden",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.hidden = ToSize(k, v);
       }},
      {"train.method",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.methods.clear();
         for (const std::string& m : SplitList(v)) c.methods.push_back(ParseMethod(m));
         if (c.methods.empty()) throw ValidationError("config: " + k + " is empty");
       }},
      {"train.epochs",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.epochs = ToSize(k, v);
       }},
      {"train.learning_rate",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.learning_rate = ToReal(k, v);
       }},
      {"train.batch_size",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.batch_size = ToSize(k, v);
       }},
      {"train.reg_balance",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.reg_balance = ToReal(k, v);
       }},
      {"train.early_stop_patience",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.early_stop_patience = ToSize(k, v);
       }},
      {"train.side_hidden",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.side_hidden = ToSize(k, v);
       }},
      {"train.wt_draws",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.wt_draws = ToSize(k, v);
       }},
      {"attack.kind", [](RunConfig& c, const std::string&, const std::string& v) {
         c.attack_kind = ParseAttackKind(v);
       }},
      {"attack.epsilon",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.attack.epsilon = ToReal(k, v);
       }},
      {"attack.rate", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.attack.rate = ToReal(k, v);
       }},
      {"attack.steps",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.attack.steps = ToSize(k, v);
       }},
      {"attack.mask", [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "all") {
           c.attack_mask_all = true;
           c.attack_mask.reset();
         } else {
           c.attack_mask_all = false;
           c.attack_mask = ToIndexList(k, v);
         }
       }},
      {"attack.lo", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.attack_lo = ToReal(k, v);
       }},
      {"attack.hi", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.attack_hi = ToReal(k, v);
       }},
      {"bounds.delta", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.delta = ToReal(k, v);
       }},
      {"bounds.estimator",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "exact") {
           c.estimator = Estimator::kExact;
         } else if (v == "search") {
           c.estimator = Estimator::kSearch;
         } else if (v == "discriminator") {
           c.estimator = Estimator::kDiscriminator;
         } else {
           throw ValidationError("config: " + k +
                                 " must be exact, search or discriminator");
         }
       }},
      {"bounds.search_budget",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.search_budget = ToSize(k, v);
       }},
      {"bounds.class_size",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.class_size = ToSize(k, v);
       }},
      {"bounds.disc_epochs",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.discriminator.epochs = ToSize(k, v);
       }},
      {"bounds.disc_learning_rate",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.discriminator.learning_rate = ToReal(k, v);
       }},
      {"bounds.disc_batch_size",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.discriminator.batch_size = ToSize(k, v);
       }},
      {"bounds.disc_hidden",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.discriminator_hidden = ToSize(k, v);
       }},
      {"output.dir", [](RunConfig& c, const std::string&, const std::string& v) {
         c.out_dir = v;
       }},
      {"output.emit_svg",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.emit_svg = ToBool(k, v);
       }},
      {"seeds", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.seeds = ParseSeedList(v);
         if (c.seeds.empty()) throw ValidationError("config: " + k + " is empty");
       }},
  };
  return *table;
}

void Validate(const RunConfig& c) {
  c.synthetic.Validate();
  c.world.Validate();
  c.train.Validate();
  if (c.worlds < 1 || c.trials < 1 || c.sample_n < 1) {
    throw ValidationError("config: data.worlds, data.trials and data.sample_n must be >= 1");
  }
  if (!(c.delta > 0.0 && c.delta <= 1.0)) {
    throw ValidationError("config: bounds.delta must lie in (0, 1]");
  }
  if (c.search_budget < 1) throw ValidationError("config: bounds.search_budget must be >= 1");
  if (c.class_size < 1) throw ValidationError("config: bounds.class_size must be >= 1");
  if (c.arch_kind == ArchKind::kMlp && c.hidden < 1) {
    throw ValidationError("config: model.hidden must be >= 1 for mlp");
  }
  if (c.attack_lo.has_value() != c.attack_hi.has_value()) {
    throw ValidationError("config: attack.lo and attack.hi go together");
  }
  if (c.attack_lo && !(*c.attack_lo <= *c.attack_hi)) {
    throw ValidationError("config: attack.lo > attack.hi");
  }
  if (!(c.attack.epsilon >= 0.0) || !(c.attack.rate >= 0.0 && c.attack.rate <= 1.0)) {
    throw ValidationError("config: attack.epsilon must be >= 0, attack.rate in [0, 1]");
  }
}

}  // namespace

std::string ToString(DataKind kind) {
  switch (kind) {
    case DataKind::kSynthetic: return "synthetic";
    case DataKind::kWorld: return "world";
    case DataKind::kIdx: return "idx";
  }
  return "?";
}

std::string ToString(Estimator kind) {
  switch (kind) {
    case Estimator::kExact: return "exact";
    case Estimator::kSearch: return "search";
    case Estimator::kDiscriminator: return "discriminator";
  }
  return "?";
}

std::vector<std::uint64_t> ParseSeedList(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const std::string& item : SplitList(text)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(ToU64("list", item));
      continue;
    }
    const std::uint64_t lo = ToU64("list", Trim(item.substr(0, dots)));
    const std::uint64_t hi = ToU64("list", Trim(item.substr(dots + 2)));
    if (lo > hi || hi - lo > 1'000'000) {
      throw ValidationError("config: bad range '" + item + "'");
    }
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

void SetConfigValue(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  const auto& table = Setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ValidationError("config: unknown key '" + key + "'");
  it->second(cfg, key, value);
  cfg.entries[key] = value;
  Validate(cfg);
}

RunConfig ParseConfig(std::istream& in) {
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config: line " + std::to_string(line_no) +
                            ": expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (cfg.entries.count(key)) {
      throw ValidationError("config: line " + std::to_string(line_no) +
                            ": duplicate key '" + key + "'");
    }
    try {
      SetConfigValue(cfg, key, value);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config: " + path.string());
  RunConfig cfg = ParseConfig(in);
  // Data files are looked up next to the config file.
  const std::filesystem::path base = path.parent_path();
  for (auto* p : {&cfg.world_file, &cfg.train_images, &cfg.train_labels,
                  &cfg.test_images, &cfg.test_labels}) {
    if (!p->empty() && p->is_relative()) *p = base / *p;
  }
  return cfg;
}

std::string RunConfig::Canonical() const {
  std::string out;
  for (const auto& [k, v] : entries) out += k + "=" + v + "\n";
  return out;
}

std::string RunConfig::Hash() const {
  const std::string text = Canonical();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("config: sha256 failed");
  }
  static const char* kHex = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 15];
  }
  return hex;
}

Architecture RunConfig::MakeArch(std::size_t input_dim) const {
  const Architecture arch = arch_kind == ArchKind::kLogistic
                                ? Architecture::Logistic(input_dim)
                                : Architecture::Mlp(input_dim, hidden);
  arch.Validate();
  return arch;
}

PerturbSpec RunConfig::AttackSpec(std::size_t p) const {
  PerturbSpec spec = attack;
  if (attack_mask) {
    spec.mask = *attack_mask;
  } else if (attack_mask_all || data_kind != DataKind::kSynthetic) {
    spec.mask.resize(p);
    for (std::size_t j = 0; j < p; ++j) spec.mask[j] = static_cast<int>(j);
  } else {
    SyntheticConfig sc = synthetic;
    sc.p = p;
    spec.mask = sc.SpuriousBlock();
  }
  if (attack_lo) {
    spec.lo.assign(p, *attack_lo);
    spec.hi.assign(p, *attack_hi);
  } else if (data_kind == DataKind::kIdx) {
    spec.lo.assign(p, 0.0);
    spec.hi.assign(p, 1.0);
  } else if (data_kind == DataKind::kWorld) {
    spec.lo.assign(p, 0.0);
    spec.hi.assign(p, 1.0);
  }
  spec.Validate(p);
  return spec;
}

}  // namespace harm
