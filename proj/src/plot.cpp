// src/plot.cpp

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

#include "speechground/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace speechground {

namespace {

std::vector<std::string> SplitCsv(const std::string &line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double ParseNumber(const std::string &s, const std::string &source, int line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError(source, line, "expected a number, got '" + s + "'");
  return v;
}

std::vector<std::string> ReadLines(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::vector<ChartPoint> ReadAblationResults(const std::filesystem::path &path) {
  const std::string source = path.string();
  auto lines = ReadLines(path);
  if (lines.empty()) throw ParseError(source, 1, "empty results file");
  auto header = SplitCsv(lines[0]);
  const bool summary = header.size() == 7 && header[0] == "cell" && header[1] == "subset" &&
                       header[2] == "thresh" && header[3] == "mean";
  const bool raw = header.size() == 5 && header[0] == "cell" && header[1] == "seed" &&
                   header[2] == "subset" && header[3] == "thresh" && header[4] == "accuracy";
  if (!summary && !raw) throw ParseError(source, 1, "unrecognized header '" + lines[0] + "'");
  if (lines.size() < 2) throw ParseError(source, 2, "no data rows");

  std::vector<ChartPoint> points;
  std::vector<std::vector<double>> samples;
  std::map<std::tuple<std::string, std::string, std::string>, size_t> index;
  for (size_t i = 1; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i) + 1;
    auto f = SplitCsv(lines[i]);
    if (f.size() != header.size())
      throw ParseError(source, lineno,
                       "expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(f.size()));
    if (f[0].empty()) throw ParseError(source, lineno, "empty cell name");
    if (summary) {
      ParseNumber(f[2], source, lineno);
      for (int k = 3; k < 7; ++k) ParseNumber(f[k], source, lineno);
      points.push_back({f[0], f[1], f[2], f[3]});
    } else {
      ParseNumber(f[1], source, lineno);
      ParseNumber(f[3], source, lineno);
      double acc = ParseNumber(f[4], source, lineno);
      auto key = std::make_tuple(f[0], f[2], f[3]);
      auto it = index.find(key);
      if (it == index.end()) {
        it = index.emplace(key, points.size()).first;
        points.push_back({f[0], f[2], f[3], ""});
        samples.emplace_back();
      }
      samples[it->second].push_back(acc);
    }
  }
  if (raw) {
    for (size_t i = 0; i < points.size(); ++i) {
      double mean = 0.0;
      for (double v : samples[i]) mean += v;
      points[i].value = Fmt(mean / static_cast<double>(samples[i].size()));
    }
  }
  return points;
}

std::vector<LossPoint> ReadRunLog(const std::filesystem::path &path) {
  const std::string source = path.string();
  auto lines = ReadLines(path);
  std::vector<LossPoint> points;
  for (size_t i = 0; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i) + 1;
    if (lines[i].empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(source, lineno, e.what());
    }
    if (!j.is_object()) throw ParseError(source, lineno, "expected a JSON object");
    if (!j.contains("epoch")) continue;  // closing record
    try {
      LossPoint p;
      p.epoch = j.at("epoch").get<int>();
      p.total = j.at("loss_total").get<double>();
      p.contrastive = j.at("loss_contrastive").get<double>();
      p.ref = j.at("loss_ref").get<double>();
      p.cls = j.at("loss_cls").get<double>();
      points.push_back(p);
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  if (points.empty()) throw ParseError(source, 1, "run log holds no epoch records");
  return points;
}

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 64, kRight = 160, kTop = 40, kBottom = 56;
const char *const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Frame {
  double x0, x1, y0, y1;
  double X(double x) const {
    return kLeft + (x1 == x0 ? 0.5 : (x - x0) / (x1 - x0)) * (kWidth - kLeft - kRight);
  }
  double Y(double y) const {
    return kHeight - kBottom - (y1 == y0 ? 0.5 : (y - y0) / (y1 - y0)) * (kHeight - kTop - kBottom);
  }
};

std::string Escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

std::string Open(const std::string &title, const std::string &xlabel, const std::string &ylabel) {
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                "viewBox=\"0 0 %g %g\" font-family=\"sans-serif\" font-size=\"12\">\n"
                "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n"
                "<text x=\"%g\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">%s</text>\n"
                "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%s</text>\n"
                "<text x=\"16\" y=\"%g\" text-anchor=\"middle\" transform=\"rotate(-90 16 %g)\">%s</text>\n",
                kWidth, kHeight, kWidth, kHeight, (kWidth - kRight + kLeft) / 2,
                Escape(title).c_str(), (kWidth - kRight + kLeft) / 2, kHeight - 12,
                Escape(xlabel).c_str(), (kHeight - kBottom + kTop) / 2,
                (kHeight - kBottom + kTop) / 2, Escape(ylabel).c_str());
  return buf;
}

std::string Axes(const Frame &f, int yticks) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n"
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom, kLeft, kTop, kLeft,
                kHeight - kBottom);
  out += buf;
  for (int i = 0; i <= yticks; ++i) {
    double v = f.y0 + (f.y1 - f.y0) * i / yticks;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%.3g</text>\n"
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#ddd\"/>\n",
                  kLeft - 6, f.Y(v) + 4, v, kLeft, f.Y(v), kWidth - kRight, f.Y(v));
    out += buf;
  }
  return out;
}

std::string Legend(const std::vector<std::string> &names) {
  std::string out;
  char buf[256];
  for (size_t i = 0; i < names.size(); ++i) {
    double y = kTop + 16 * static_cast<double>(i);
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%g\" y=\"%g\" width=\"12\" height=\"10\" fill=\"%s\"/>\n"
                  "<text x=\"%g\" y=\"%g\">%s</text>\n",
                  kWidth - kRight + 16, y, kColors[i % 6], kWidth - kRight + 34, y + 9,
                  Escape(names[i]).c_str());
    out += buf;
  }
  return out;
}

std::pair<double, double> PaddedRange(double lo, double hi) {
  if (lo == hi) return {lo - 1.0, hi + 1.0};
  double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

std::string Polyline(const Frame &f, const std::vector<std::pair<double, double>> &xy,
                     const char *color) {
  std::string out = "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"";
  out += color;
  out += "\" points=\"";
  char buf[64];
  for (size_t i = 0; i < xy.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", f.X(xy[i].first), f.Y(xy[i].second));
    out += buf;
  }
  out += "\"/>\n";
  for (const auto &[x, y] : xy) {
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n",
                  f.X(x), f.Y(y), color);
    out += buf;
  }
  return out;
}

double BetaOf(const std::string &cell) {
  if (cell.rfind("beta=", 0) != 0) throw Error("cell '" + cell + "' is not a beta cell");
  return std::stod(cell.substr(5));
}

std::vector<ChartPoint> Overall(const std::vector<ChartPoint> &points) {
  std::vector<ChartPoint> out;
  for (const auto &p : points)
    if (p.subset == "overall") out.push_back(p);
  if (out.empty()) throw Error("no overall rows to plot");
  return out;
}

}  // namespace

std::string BetaSweepSvg(const std::vector<ChartPoint> &points) {
  auto rows = Overall(points);
  std::map<std::string, std::vector<std::pair<double, double>>> curves;
  double lo = 1e300, hi = -1e300;
  for (const auto &p : rows) {
    double y = std::stod(p.value);
    curves["Acc@" + p.thresh].push_back({BetaOf(p.cell), y});
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  auto [y0, y1] = PaddedRange(lo, hi);
  Frame f{0.0, 1.0, y0, y1};
  std::string svg = Open("Accuracy against score weight", "beta (speech share)", "overall accuracy (%)");
  svg += Axes(f, 5);
  char buf[160];
  for (double b : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%g</text>\n",
                  f.X(b), kHeight - kBottom + 16, b);
    svg += buf;
  }
  std::vector<std::string> names;
  int i = 0;
  for (auto &[name, xy] : curves) {
    std::sort(xy.begin(), xy.end());
    svg += Polyline(f, xy, kColors[i++ % 6]);
    names.push_back(name);
  }
  svg += Legend(names) + "</svg>\n";
  return svg;
}

std::string ModuleBarsSvg(const std::vector<ChartPoint> &points) {
  auto rows = Overall(points);
  std::vector<std::string> cells, thresholds;
  for (const auto &p : rows) {
    if (std::find(cells.begin(), cells.end(), p.cell) == cells.end()) cells.push_back(p.cell);
    if (std::find(thresholds.begin(), thresholds.end(), p.thresh) == thresholds.end())
      thresholds.push_back(p.thresh);
  }
  double hi = 0.0;
  for (const auto &p : rows) hi = std::max(hi, std::stod(p.value));
  Frame f{0.0, 1.0, 0.0, hi > 0.0 ? hi * 1.1 : 1.0};
  std::string svg = Open("Accuracy per configuration", "configuration", "overall accuracy (%)");
  svg += Axes(f, 5);
  const double plot_w = kWidth - kLeft - kRight;
  const double group_w = plot_w / static_cast<double>(cells.size());
  const double bar_w = 0.8 * group_w / static_cast<double>(thresholds.size());
  char buf[256];
  for (size_t c = 0; c < cells.size(); ++c) {
    double gx = kLeft + group_w * static_cast<double>(c) + 0.1 * group_w;
    for (const auto &p : rows) {
      if (p.cell != cells[c]) continue;
      size_t t = std::find(thresholds.begin(), thresholds.end(), p.thresh) - thresholds.begin();
      double y = std::stod(p.value);
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n",
                    gx + bar_w * static_cast<double>(t), f.Y(y), bar_w, f.Y(f.y0) - f.Y(y),
                    kColors[t % 6]);
      svg += buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%g\" text-anchor=\"middle\">%s</text>\n",
                  kLeft + group_w * (static_cast<double>(c) + 0.5), kHeight - kBottom + 16,
                  Escape(cells[c]).c_str());
    svg += buf;
  }
  std::vector<std::string> names;
  for (const auto &t : thresholds) names.push_back("Acc@" + t);
  svg += Legend(names) + "</svg>\n";
  return svg;
}

std::string LossCurveSvg(const std::vector<LossPoint> &points) {
  if (points.empty()) throw Error("no loss points to plot");
  double lo = 0.0, hi = 0.0;
  for (const auto &p : points) hi = std::max({hi, p.total, p.contrastive, p.ref, p.cls});
  auto [y0, y1] = PaddedRange(lo, hi);
  Frame f{static_cast<double>(points.front().epoch), static_cast<double>(points.back().epoch),
          std::max(0.0, y0), y1};
  std::string svg = Open("Training loss", "epoch", "loss");
  svg += Axes(f, 5);
  struct Series {
    const char *name;
    double LossPoint::*field;
  };
  const Series series[] = {{"total", &LossPoint::total},
                           {"reference", &LossPoint::ref},
                           {"classification", &LossPoint::cls},
                           {"contrastive", &LossPoint::contrastive}};
  std::vector<std::string> names;
  int i = 0;
  for (const auto &s : series) {
    std::vector<std::pair<double, double>> xy;
    for (const auto &p : points) xy.push_back({static_cast<double>(p.epoch), p.*(s.field)});
    svg += Polyline(f, xy, kColors[i++ % 6]);
    names.push_back(s.name);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%d</text>\n"
                "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%d</text>\n",
                f.X(f.x0), kHeight - kBottom + 16, points.front().epoch, f.X(f.x1),
                kHeight - kBottom + 16, points.back().epoch);
  svg += buf;
  svg += Legend(names) + "</svg>\n";
  return svg;
}

std::string ChartPointsCsv(const std::vector<ChartPoint> &points) {
  std::string out = "cell,subset,thresh,value\n";
  for (const auto &p : points) out += p.cell + "," + p.subset + "," + p.thresh + "," + p.value + "\n";
  return out;
}

std::string LossPointsCsv(const std::vector<LossPoint> &points) {
  std::string out = "epoch,total,contrastive,ref,cls\n";
  for (const auto &p : points) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", p.epoch, p.total,
                  p.contrastive, p.ref, p.cls);
    out += buf;
  }
  return out;
}

std::vector<std::filesystem::path> PlotFile(const std::filesystem::path &input,
                                            const std::filesystem::path &out_dir) {
  std::string svg, csv, suffix;
  const std::string ext = input.extension().string();
  if (ext == ".jsonl" || ext == ".json") {
    auto points = ReadRunLog(input);
    svg = LossCurveSvg(points);
    csv = LossPointsCsv(points);
    suffix = "_loss";
  } else {
    auto points = ReadAblationResults(input);
    bool beta = std::all_of(points.begin(), points.end(),
                            [](const ChartPoint &p) { return p.cell.rfind("beta=", 0) == 0; });
    svg = beta ? BetaSweepSvg(points) : ModuleBarsSvg(points);
    csv = ChartPointsCsv(points);
    suffix = beta ? "_beta" : "_bars";
  }
  std::filesystem::create_directories(out_dir);
  const std::string stem = input.stem().string() + suffix;
  std::vector<std::filesystem::path> written = {out_dir / (stem + ".svg"),
                                                out_dir / (stem + ".csv")};
  const std::string *contents[] = {&svg, &csv};
  for (int i = 0; i < 2; ++i) {
    std::ofstream out(written[i], std::ios::binary);
    if (!out) throw Error("cannot write " + written[i].string());
    out << *contents[i];
  }
  return written;
}

}  // namespace speechground
