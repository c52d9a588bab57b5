// tests/test_util.hpp

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

#ifndef SPEECHGROUND_TESTS_TEST_UTIL_HPP_
#define SPEECHGROUND_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "speechground/autograd.hpp"
#include "speechground/common.hpp"
#include "speechground/config.hpp"
#include "speechground/dataset_io.hpp"
#include "speechground/model.hpp"
#include "speechground/trainer.hpp"

namespace sgtest {

namespace sg = speechground;

class TempDir {
 public:
  explicit TempDir(const std::string &tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("sgtest_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline sg::Matrix RandomMatrix(int rows, int cols, sg::Rng &rng, double lo = -1.0,
                               double hi = 1.0) {
  sg::Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = sg::Uniform(rng, lo, hi);
  return m;
}

struct FdReport {
  double max_rel_error = 0.0;
  std::string worst;
  int checked = 0;
};

// Central differences over every entry (or `max_entries` random entries per
// tensor) of the given parameters, compared with the tape's gradients.
// Relative error per tensor is ||a - n|| / max(||a||, ||n||, floor).
inline FdReport FiniteDifferences(const std::vector<sg::ag::Parameter *> &params,
                                  const std::function<sg::ag::Var(sg::ag::Tape &)> &loss,
                                  double eps = 1e-5, int max_entries = 0, uint64_t seed = 7) {
  for (auto *p : params) p->grad = sg::Matrix::Zero(p->value.rows(), p->value.cols());
  {
    sg::ag::Tape tape;
    tape.Backward(loss(tape));
  }
  auto eval = [&] {
    sg::ag::Tape tape(false);
    return loss(tape).scalar();
  };
  sg::Rng rng(seed);
  FdReport report;
  for (auto *p : params) {
    const int n = static_cast<int>(p->value.size());
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    if (max_entries > 0 && n > max_entries) {
      for (int i = 0; i < max_entries; ++i) std::swap(idx[i], idx[i + sg::UniformInt(rng, 0, n - 1 - i)]);
      idx.resize(max_entries);
    }
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (int i : idx) {
      double &x = p->value.data()[i];
      const double saved = x;
      x = saved + eps;
      const double up = eval();
      x = saved - eps;
      const double down = eval();
      x = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = p->grad.data()[i];
      diff2 += (analytic - numeric) * (analytic - numeric);
      a2 += analytic * analytic;
      n2 += numeric * numeric;
      ++report.checked;
    }
    const double rel =
        std::sqrt(diff2) / std::max({std::sqrt(a2), std::sqrt(n2), sg::kGradNormFloor});
    if (rel >= report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst = p->name;
    }
  }
  return report;
}

inline std::vector<sg::ag::Parameter *> AllParams(sg::ParameterStore &store) {
  std::vector<sg::ag::Parameter *> out;
  for (size_t i = 0; i < store.size(); ++i) out.push_back(&store.at(i));
  return out;
}

// A scene generator setting whose scenes always fit `num_proposals`.
inline sg::GenConfig SmallGen(int num_proposals) {
  sg::GenConfig gen;
  gen.max_objects = std::min(gen.max_objects, num_proposals);
  gen.min_objects = std::min(gen.min_objects, gen.max_objects);
  return gen;
}

inline sg::Dataset SmallDataset(int scenes, int per_scene, uint64_t seed, int num_proposals = 16) {
  return sg::GenerateDataset({scenes, per_scene, seed, "t"}, SmallGen(num_proposals));
}

inline sg::InputConfig SmallInput(int num_proposals) {
  sg::InputConfig input;
  input.num_proposals = num_proposals;
  input.points_per_scene = 512;
  return input;
}

inline sg::ModelConfig TinyModel() {
  sg::ModelConfig m;
  m.d_model = 16;
  m.heads = 2;
  m.ffn_hidden = 24;
  m.score_hidden = 12;
  return m;
}

}  // namespace sgtest

#endif  // SPEECHGROUND_TESTS_TEST_UTIL_HPP_
