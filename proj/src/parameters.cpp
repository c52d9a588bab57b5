// src/parameters.cpp

// Copyright 2026  The speechground Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "speechground/parameters.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

namespace speechground {

namespace {

constexpr uint32_t kCheckpointMagic = 0x4b434753;  // "SGCK"
constexpr uint32_t kCheckpointVersion = 1;

void PutU32(std::ostream &out, uint32_t v) {
  std::array<unsigned char, 4> b;
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char *>(b.data()), 4);
}

uint32_t GetU32(std::istream &in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char *>(b.data()), 4)) throw Error("truncated checkpoint");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

void PutF64(std::ostream &out, double x) {
  uint64_t bits;
  std::memcpy(&bits, &x, 8);
  std::array<unsigned char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char *>(b.data()), 8);
}

double GetF64(std::istream &in) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char *>(b.data()), 8)) throw Error("truncated checkpoint");
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(b[i]) << (8 * i);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

}  // namespace

ag::Parameter &ParameterStore::Add(const std::string &name, Matrix init) {
  if (Has(name)) throw Error("duplicate parameter '" + name + "'");
  auto p = std::make_unique<ag::Parameter>();
  p->name = name;
  p->value = std::move(init);
  params_.push_back(std::move(p));
  return *params_.back();
}

ag::Parameter &ParameterStore::AddXavier(const std::string &name, int rows, int cols, Rng &rng) {
  double a = std::sqrt(6.0 / (rows + cols));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Uniform(rng, -a, a);
  return Add(name, std::move(m));
}

ag::Parameter &ParameterStore::AddZeros(const std::string &name, int rows, int cols) {
  return Add(name, Matrix::Zero(rows, cols));
}

ag::Parameter &ParameterStore::Get(std::string_view name) {
  for (auto &p : params_)
    if (p->name == name) return *p;
  throw Error("no parameter named '" + std::string(name) + "'");
}

const ag::Parameter &ParameterStore::Get(std::string_view name) const {
  for (const auto &p : params_)
    if (p->name == name) return *p;
  throw Error("no parameter named '" + std::string(name) + "'");
}

bool ParameterStore::Has(std::string_view name) const {
  for (const auto &p : params_)
    if (p->name == name) return true;
  return false;
}

size_t ParameterStore::NumScalars() const {
  size_t n = 0;
  for (const auto &p : params_) n += static_cast<size_t>(p->value.size());
  return n;
}

void ParameterStore::ZeroGrad() {
  for (auto &p : params_) p->grad.resize(0, 0);
}

void ParameterStore::Save(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  PutU32(out, kCheckpointMagic);
  PutU32(out, kCheckpointVersion);
  PutU32(out, static_cast<uint32_t>(params_.size()));
  for (const auto &p : params_) {
    PutU32(out, static_cast<uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    PutU32(out, static_cast<uint32_t>(p->value.rows()));
    PutU32(out, static_cast<uint32_t>(p->value.cols()));
    for (Eigen::Index i = 0; i < p->value.size(); ++i) PutF64(out, p->value.data()[i]);
  }
}

void ParameterStore::Load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  if (GetU32(in) != kCheckpointMagic) throw Error(path.string() + ": not a checkpoint");
  if (GetU32(in) != kCheckpointVersion) throw Error(path.string() + ": unsupported version");
  uint32_t count = GetU32(in);
  if (count != params_.size())
    throw Error(path.string() + ": checkpoint holds " + std::to_string(count) +
                " tensors, model expects " + std::to_string(params_.size()));
  for (uint32_t k = 0; k < count; ++k) {
    uint32_t len = GetU32(in);
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw Error("truncated checkpoint");
    uint32_t rows = GetU32(in), cols = GetU32(in);
    ag::Parameter &p = Get(name);
    if (p.value.rows() != rows || p.value.cols() != cols)
      throw Error(path.string() + ": dimension mismatch for '" + name + "': checkpoint " +
                  std::to_string(rows) + "x" + std::to_string(cols) + ", model " +
                  std::to_string(p.value.rows()) + "x" + std::to_string(p.value.cols()));
    for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = GetF64(in);
  }
}

void AdamOptimizer::Step(ParameterStore &store) {
  if (m_.size() != store.size()) {
    m_.resize(store.size());
    v_.resize(store.size());
  }
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, step_);
  const double c2 = 1.0 - std::pow(beta2_, step_);
  for (size_t i = 0; i < store.size(); ++i) {
    ag::Parameter &p = store.at(i);
    if (p.grad.size() == 0) continue;
    if (m_[i].size() == 0) {
      m_[i] = Matrix::Zero(p.value.rows(), p.value.cols());
      v_[i] = Matrix::Zero(p.value.rows(), p.value.cols());
    }
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseProduct(p.grad);
    p.value.array() -=
        lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

}  // namespace speechground
