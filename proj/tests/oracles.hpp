// tests/oracles.hpp

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

#ifndef SPEECHGROUND_TESTS_ORACLES_HPP_
#define SPEECHGROUND_TESTS_ORACLES_HPP_

// Reference implementations written directly from the definitions, without
// any of the library's numerical code.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "speechground/scenegen.hpp"

namespace sgtest {

namespace sg = speechground;

// Counts voxel centers of a k^3 grid over the joint bounding region. Box
// membership is a product of per-axis interval tests, so the 3D count equals
// the product of the per-axis counts, which keeps a fine grid cheap.
inline double VoxelIou(const sg::Box3D &a, const sg::Box3D &b, int k = 20000) {
  double counts[3][3];  // axis x {in a, in b, in both}
  for (int ax = 0; ax < 3; ++ax) {
    const double lo = std::min(a.min_corner()[ax], b.min_corner()[ax]);
    const double hi = std::max(a.max_corner()[ax], b.max_corner()[ax]);
    const double h = (hi - lo) / k;
    double na = 0, nb = 0, nab = 0;
    for (int i = 0; i < k; ++i) {
      const double x = lo + (i + 0.5) * h;
      const bool in_a = x >= a.min_corner()[ax] && x <= a.max_corner()[ax];
      const bool in_b = x >= b.min_corner()[ax] && x <= b.max_corner()[ax];
      na += in_a;
      nb += in_b;
      nab += in_a && in_b;
    }
    counts[ax][0] = na;
    counts[ax][1] = nb;
    counts[ax][2] = nab;
  }
  const double va = counts[0][0] * counts[1][0] * counts[2][0];
  const double vb = counts[0][1] * counts[1][1] * counts[2][1];
  const double vab = counts[0][2] * counts[1][2] * counts[2][2];
  return vab == 0 ? 0.0 : vab / (va + vb - vab);
}

// Closed-form overlap from per-axis interval intersections.
inline double IntervalIou(const sg::Box3D &a, const sg::Box3D &b) {
  double inter = 1.0, va = 1.0, vb = 1.0;
  for (int ax = 0; ax < 3; ++ax) {
    const double lo = std::max(a.center[ax] - a.size[ax] / 2, b.center[ax] - b.size[ax] / 2);
    const double hi = std::min(a.center[ax] + a.size[ax] / 2, b.center[ax] + b.size[ax] / 2);
    inter *= std::max(0.0, hi - lo);
    va *= a.size[ax];
    vb *= b.size[ax];
  }
  return inter / (va + vb - inter);
}

// Index of the highest-IoU proposal by exhaustive pairwise comparison; the
// earliest of equal proposals wins.
inline int BruteForceHot(const std::vector<sg::Box3D> &boxes, const sg::Box3D &gt) {
  for (size_t i = 0; i < boxes.size(); ++i) {
    bool best = true;
    for (size_t j = 0; j < boxes.size(); ++j) {
      const double ii = IntervalIou(boxes[i], gt), jj = IntervalIou(boxes[j], gt);
      if (jj > ii || (j < i && jj == ii)) best = false;
    }
    if (best) return static_cast<int>(i);
  }
  return -1;
}

using Rows = std::vector<std::vector<double>>;

inline double Cosine(const std::vector<double> &u, const std::vector<double> &v) {
  double uv = 0, uu = 0, vv = 0;
  for (size_t k = 0; k < u.size(); ++k) {
    uv += u[k] * v[k];
    uu += u[k] * u[k];
    vv += v[k] * v[k];
  }
  return uv / std::sqrt(uu * vv);
}

// (1/N) sum_i -log( exp(c_ii / tau) / sum_j exp(c_ij / tau) ), c = cosine.
inline double DirectionalSum(const Rows &a, const Rows &b, double tau) {
  const size_t n = a.size();
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double denom = 0.0;
    for (size_t j = 0; j < n; ++j) denom += std::exp(Cosine(a[i], b[j]) / tau);
    total += -std::log(std::exp(Cosine(a[i], b[i]) / tau) / denom);
  }
  return total / static_cast<double>(n);
}

// Mean of all six directional sums among speech, text and object rows.
inline double SixTermContrastive(const Rows &s, const Rows &t, const Rows &o, double tau) {
  return (DirectionalSum(t, s, tau) + DirectionalSum(s, t, tau) + DirectionalSum(s, o, tau) +
          DirectionalSum(o, s, tau) + DirectionalSum(t, o, tau) + DirectionalSum(o, t, tau)) /
         6.0;
}

// Magnitude spectrum of one frame by the textbook O(n^2) DFT.
inline std::vector<double> NaiveDftMagnitude(const std::vector<double> &x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> mag(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (int t = 0; t < n; ++t) {
      const double ang = 2.0 * std::numbers::pi * k * t / n;
      re += x[t] * std::cos(ang);
      im -= x[t] * std::sin(ang);
    }
    mag[k] = std::sqrt(re * re + im * im);
  }
  return mag;
}

// 80 HTK-mel triangles over 0..8000 Hz evaluated on the 201 FFT bins of a
// 400-sample window at 16 kHz.
inline std::vector<std::vector<double>> OracleMelBank() {
  auto to_mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto to_hz = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  const int channels = 80, bins = 201;
  std::vector<double> edge(channels + 2);
  for (int i = 0; i < channels + 2; ++i) edge[i] = to_hz(to_mel(8000.0) * i / (channels + 1));
  std::vector<std::vector<double>> bank(channels, std::vector<double>(bins, 0.0));
  for (int m = 0; m < channels; ++m) {
    for (int b = 0; b < bins; ++b) {
      const double f = b * 40.0;
      if (f > edge[m] && f <= edge[m + 1])
        bank[m][b] = (f - edge[m]) / (edge[m + 1] - edge[m]);
      else if (f > edge[m + 1] && f < edge[m + 2])
        bank[m][b] = (edge[m + 2] - f) / (edge[m + 2] - edge[m + 1]);
    }
  }
  return bank;
}

// Log mel energies of every frame: periodic Hann, 400 window, 160 hop.
inline std::vector<std::vector<double>> OracleLogMel(const std::vector<double> &wave) {
  const int win = 400, hop = 160;
  const auto bank = OracleMelBank();
  std::vector<std::vector<double>> out;
  for (size_t start = 0; start + win <= wave.size(); start += hop) {
    std::vector<double> frame(win);
    for (int t = 0; t < win; ++t)
      frame[t] = wave[start + t] * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * t / win));
    const auto mag = NaiveDftMagnitude(frame);
    std::vector<double> row(bank.size());
    for (size_t m = 0; m < bank.size(); ++m) {
      double e = 0.0;
      for (size_t b = 0; b < mag.size(); ++b) e += bank[m][b] * mag[b];
      row[m] = std::log(std::max(e, 1e-10));
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace sgtest

#endif  // SPEECHGROUND_TESTS_ORACLES_HPP_
