// include/speechground/parameters.hpp

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

#ifndef SPEECHGROUND_PARAMETERS_HPP_
#define SPEECHGROUND_PARAMETERS_HPP_

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "speechground/autograd.hpp"

namespace speechground {

/// Owns every trainable tensor of a model, in creation order. Addresses
/// are stable, so tapes may hold raw pointers into the store.
class ParameterStore {
 public:
  ag::Parameter &Add(const std::string &name, Matrix init);
  /// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
  ag::Parameter &AddXavier(const std::string &name, int rows, int cols, Rng &rng);
  ag::Parameter &AddZeros(const std::string &name, int rows, int cols);

  ag::Parameter &Get(std::string_view name);
  const ag::Parameter &Get(std::string_view name) const;
  bool Has(std::string_view name) const;

  size_t size() const { return params_.size(); }
  ag::Parameter &at(size_t i) { return *params_[i]; }
  const ag::Parameter &at(size_t i) const { return *params_[i]; }
  size_t NumScalars() const;

  void ZeroGrad();

  /// Binary checkpoint: magic "SGCK", version, count, then per tensor the
  /// name (length-prefixed), rows, cols and little-endian doubles.
  void Save(const std::filesystem::path &path) const;
  /// Overwrites values of the existing tensors; throws Error on any name or
  /// shape mismatch.
  void Load(const std::filesystem::path &path);

 private:
  std::vector<std::unique_ptr<ag::Parameter>> params_;
};

/// Adam with bias correction; state is keyed by parameter position.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  /// Applies one update to every parameter that holds a gradient.
  void Step(ParameterStore &store);
  int steps() const { return step_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  int step_ = 0;
  std::vector<Matrix> m_, v_;
};

}  // namespace speechground

#endif  // SPEECHGROUND_PARAMETERS_HPP_
