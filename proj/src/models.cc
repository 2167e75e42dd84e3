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

#include "harm/models.h"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace harm {

void Architecture::Validate() const {
  if (input_dim < 1) throw ValidationError("architecture: input_dim must be >= 1");
  if (kind == ArchKind::kMlp && hidden_dim < 1) {
    throw ValidationError("architecture: mlp hidden_dim must be >= 1");
  }
  if (kind == ArchKind::kLogistic && hidden_dim != 0) {
    throw ValidationError("architecture: logistic model has no hidden layer");
  }
}

std::size_t Architecture::ParamCount() const {
  if (kind == ArchKind::kLogistic) return input_dim + 1;
  return hidden_dim * input_dim + hidden_dim + hidden_dim + 1;
}

std::size_t Architecture::RepresentationDim() const {
  return kind == ArchKind::kLogistic ? input_dim : hidden_dim;
}

std::size_t Architecture::DecoderOffset() const {
  return kind == ArchKind::kLogistic ? 0 : hidden_dim * input_dim + hidden_dim;
}

namespace {

void CheckShapes(const Architecture& arch, const ModelParams& params,
                 std::span<const double> x) {
  if (params.size() != arch.ParamCount()) {
    throw ValidationError("model: parameter count does not match architecture");
  }
  if (x.size() != arch.input_dim) {
    throw ValidationError("model: input dimension mismatch (got " +
                          std::to_string(x.size()) + ", expected " +
                          std::to_string(arch.input_dim) + ")");
  }
}

double DecoderLogit(const Architecture& arch, const ModelParams& params,
                    std::span<const double> rep) {
  const std::size_t off = arch.DecoderOffset();
  const std::size_t r = arch.RepresentationDim();
  double t = params[off + r];
  for (std::size_t k = 0; k < r; ++k) t += params[off + k] * rep[k];
  return t;
}

}  // namespace

ModelParams InitParams(const Architecture& arch, Rng& rng) {
  arch.Validate();
  ModelParams params(arch.ParamCount(), 0.0);
  auto fill = [&](std::size_t begin, std::size_t count, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < count; ++i) {
      params[begin + i] = (2.0 * rng.Uniform() - 1.0) * bound;
    }
  };
  if (arch.kind == ArchKind::kLogistic) {
    fill(0, arch.input_dim, arch.input_dim);
  } else {
    fill(0, arch.hidden_dim * arch.input_dim, arch.input_dim);
    fill(arch.DecoderOffset(), arch.hidden_dim, arch.hidden_dim);
  }
  return params;
}

ForwardResult Forward(const Architecture& arch, const ModelParams& params,
                      std::span<const double> x) {
  CheckShapes(arch, params, x);
  ForwardResult out;
  if (arch.kind == ArchKind::kLogistic) {
    out.representation.assign(x.begin(), x.end());
  } else {
    const std::size_t p = arch.input_dim;
    const std::size_t h = arch.hidden_dim;
    out.representation.resize(h);
    for (std::size_t k = 0; k < h; ++k) {
      double a = params[h * p + k];
      const double* row = params.data() + k * p;
      for (std::size_t j = 0; j < p; ++j) a += row[j] * x[j];
      out.representation[k] = std::tanh(a);
    }
  }
  out.logit = DecoderLogit(arch, params, out.representation);
  out.prediction = Sigmoid(out.logit);
  if (std::isnan(out.prediction)) throw NumericalError("forward: NaN output");
  return out;
}

double Decode(const Architecture& arch, const ModelParams& params,
              std::span<const double> representation) {
  if (representation.size() != arch.RepresentationDim()) {
    throw ValidationError("decode: representation dimension mismatch");
  }
  return Sigmoid(DecoderLogit(arch, params, representation));
}

namespace {

std::vector<double> LogitBackwardFrom(const Architecture& arch,
                                      const ModelParams& params,
                                      std::span<const double> x,
                                      const ForwardResult& f, double upstream) {
  std::vector<double> grad(params.size(), 0.0);
  const std::size_t off = arch.DecoderOffset();
  const std::size_t r = arch.RepresentationDim();
  for (std::size_t k = 0; k < r; ++k) grad[off + k] = upstream * f.representation[k];
  grad[off + r] = upstream;
  if (arch.kind == ArchKind::kMlp) {
    const std::size_t p = arch.input_dim;
    for (std::size_t k = 0; k < r; ++k) {
      const double hk = f.representation[k];
      const double da = upstream * params[off + k] * (1.0 - hk * hk);
      for (std::size_t j = 0; j < p; ++j) grad[k * p + j] = da * x[j];
      grad[r * p + k] = da;
    }
  }
  return grad;
}

}  // namespace

std::vector<double> LogitBackward(const Architecture& arch,
                                  const ModelParams& params,
                                  std::span<const double> x, double upstream) {
  return LogitBackwardFrom(arch, params, x, Forward(arch, params, x), upstream);
}

std::vector<double> Backward(const Architecture& arch, const ModelParams& params,
                             std::span<const double> x, Label y, LossKind kind) {
  if (kind != LossKind::kLogistic) {
    throw ValidationError("backward: zero-one loss is not differentiable");
  }
  const ForwardResult f = Forward(arch, params, x);
  // d loss / d logit for the logistic loss on a sigmoid output.
  return LogitBackwardFrom(arch, params, x, f,
                           f.prediction - static_cast<double>(y));
}

std::vector<double> InputGradient(const Architecture& arch,
                                  const ModelParams& params,
                                  std::span<const double> x, Label y) {
  const ForwardResult f = Forward(arch, params, x);
  const double g = f.prediction - static_cast<double>(y);
  const std::size_t p = arch.input_dim;
  std::vector<double> grad(p, 0.0);
  if (arch.kind == ArchKind::kLogistic) {
    for (std::size_t j = 0; j < p; ++j) grad[j] = g * params[j];
    return grad;
  }
  const std::size_t off = arch.DecoderOffset();
  for (std::size_t k = 0; k < arch.hidden_dim; ++k) {
    const double hk = f.representation[k];
    const double da = g * params[off + k] * (1.0 - hk * hk);
    const double* row = params.data() + k * p;
    for (std::size_t j = 0; j < p; ++j) grad[j] += da * row[j];
  }
  return grad;
}

std::vector<double> EncoderBackward(const Architecture& arch,
                                    const ModelParams& params,
                                    std::span<const double> x,
                                    std::span<const double> upstream) {
  CheckShapes(arch, params, x);
  if (upstream.size() != arch.RepresentationDim()) {
    throw ValidationError("encoder_backward: upstream dimension mismatch");
  }
  std::vector<double> grad(params.size(), 0.0);
  if (arch.kind == ArchKind::kLogistic) return grad;
  const std::size_t p = arch.input_dim;
  const std::size_t h = arch.hidden_dim;
  for (std::size_t k = 0; k < h; ++k) {
    double a = params[h * p + k];
    const double* row = params.data() + k * p;
    for (std::size_t j = 0; j < p; ++j) a += row[j] * x[j];
    const double hk = std::tanh(a);
    const double da = upstream[k] * (1.0 - hk * hk);
    for (std::size_t j = 0; j < p; ++j) grad[k * p + j] = da * x[j];
    grad[h * p + k] = da;
  }
  return grad;
}

namespace {

template <typename T>
void PutLe(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T GetLe(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw ValidationError("checkpoint: truncated file");
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(bytes[i]) << (8 * i);
  }
  return value;
}

}  // namespace

void SaveCheckpoint(const Model& model, std::ostream& out) {
  model.arch.Validate();
  if (model.params.size() != model.arch.ParamCount()) {
    throw ValidationError("checkpoint: parameter count mismatch");
  }
  out.write("HARM", 4);
  PutLe<std::uint32_t>(out, kCheckpointVersion);
  PutLe<std::uint8_t>(out, static_cast<std::uint8_t>(model.arch.kind));
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(model.arch.input_dim));
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(model.arch.hidden_dim));
  PutLe<std::uint64_t>(out, model.params.size());
  for (double v : model.params) PutLe<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
}

void SaveCheckpoint(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  SaveCheckpoint(model, out);
  if (!out) throw IoError("write failed: " + path.string());
}

Model LoadCheckpoint(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4) throw ValidationError("checkpoint: truncated file");
  if (std::memcmp(magic, "HARM", 4) != 0) {
    throw ValidationError("checkpoint: bad magic");
  }
  const auto version = GetLe<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw ValidationError("checkpoint: unsupported version " +
                          std::to_string(version));
  }
  const auto kind = GetLe<std::uint8_t>(in);
  if (kind > 1) throw ValidationError("checkpoint: unknown architecture kind");
  Model m;
  m.arch.kind = static_cast<ArchKind>(kind);
  m.arch.input_dim = GetLe<std::uint32_t>(in);
  m.arch.hidden_dim = GetLe<std::uint32_t>(in);
  m.arch.Validate();
  const auto count = GetLe<std::uint64_t>(in);
  if (count != m.arch.ParamCount()) {
    throw ValidationError("checkpoint: parameter count does not match header");
  }
  m.params.resize(count);
  for (auto& v : m.params) v = std::bit_cast<double>(GetLe<std::uint64_t>(in));
  for (double v : m.params) {
    if (!std::isfinite(v)) throw ValidationError("checkpoint: non-finite parameter");
  }
  return m;
}

Model LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return LoadCheckpoint(in);
}

std::string ToString(ArchKind kind) {
  return kind == ArchKind::kLogistic ? "logistic" : "mlp";
}

ArchKind ParseArchKind(const std::string& name) {
  if (name == "logistic") return ArchKind::kLogistic;
  if (name == "mlp") return ArchKind::kMlp;
  throw ValidationError("unknown architecture: " + name);
}

}  // namespace harm
