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


#include "harm/report.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "harm/core.h"
#include "harm/dataset.h"

namespace harm {
namespace {

constexpr const char* kHeader =
    "method,seed,train_err,test_err,c,q,d_theta,phi,bound_c,bound_d";

std::vector<std::string> SplitCells(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string Escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

// Fixed-precision number for SVG attributes.
std::string Num(double v) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(2);
  ss << v;
  return ss.str();
}

}  // namespace

void WriteReportCsv(std::vector<ReportRow> rows, std::ostream& out) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ReportRow& a, const ReportRow& b) {
                     return std::tie(a.method, a.seed) <
                            std::tie(b.method, b.seed);
                   });
  out << kHeader << '\n';
  for (const ReportRow& row : rows) {
    if (row.method.find_first_of(",\n") != std::string::npos) {
      throw ValidationError("report: bad method name '" + row.method + "'");
    }
    const BoundReport& r = row.report;
    out << row.method << ',' << row.seed;
    for (double v : {r.train_err, r.test_err, r.c, r.q, r.d_theta, r.phi,
                     r.bound_c, r.bound_d}) {
      out << ',' << FormatReal(v);
    }
    out << '\n';
  }
}

void WriteReportCsv(std::vector<ReportRow> rows,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  WriteReportCsv(std::move(rows), out);
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<ReportRow> ReadReportCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw ValidationError("report csv: bad header");
  }
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = SplitCells(line);
    if (cells.size() != 10) {
      throw ValidationError("report csv: line " + std::to_string(line_no) +
                            " has " + std::to_string(cells.size()) + " cells");
    }
    ReportRow row;
    row.method = cells[0];
    try {
      std::size_t used = 0;
      row.seed = std::stoull(cells[1], &used);
      if (used != cells[1].size()) throw std::invalid_argument("seed");
    } catch (const std::exception&) {
      throw ValidationError("report csv: bad seed on line " +
                            std::to_string(line_no));
    }
    BoundReport& r = row.report;
    double* fields[] = {&r.train_err, &r.test_err, &r.c,       &r.q,
                        &r.d_theta,   &r.phi,      &r.bound_c, &r.bound_d};
    for (std::size_t k = 0; k < 8; ++k) *fields[k] = ParseReal(cells[k + 2]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ReportRow> ReadReportCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return ReadReportCsv(in);
}

std::string RenderReportSvg(const std::vector<ReportRow>& rows,
                            const std::string& title) {
  struct Acc {
    double v[4] = {0, 0, 0, 0};
    std::size_t n = 0;
  };
  std::map<std::string, Acc> by_method;
  for (const ReportRow& row : rows) {
    Acc& a = by_method[row.method];
    const BoundReport& r = row.report;
    a.v[0] += r.train_err;
    a.v[1] += r.test_err;
    a.v[2] += r.bound_c;
    a.v[3] += r.bound_d;
    ++a.n;
  }
  double top = 1.0;
  for (auto& [name, a] : by_method) {
    for (double& v : a.v) {
      v /= static_cast<double>(a.n);
      top = std::max(top, v);
    }
  }

  static const char* kSeries[4] = {"train_err", "test_err", "bound_c",
                                   "bound_d"};
  static const char* kColors[4] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52"};
  const double bar_w = 18, group_gap = 30, left = 50, plot_h = 220, base = 260;
  const double group_w = 4 * bar_w + group_gap;
  const double width = left + group_w * static_cast<double>(by_method.size()) + 20;
  const double height = 330;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Num(width)
      << "\" height=\"" << Num(height) << "\" font-family=\"sans-serif\" "
      << "font-size=\"11\">\n";
  svg << "<text x=\"" << Num(left) << "\" y=\"20\" font-size=\"14\">"
      << Escape(title) << "</text>\n";
  svg << "<line x1=\"" << Num(left) << "\" y1=\"" << Num(base) << "\" x2=\""
      << Num(width - 10) << "\" y2=\"" << Num(base)
      << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = top * tick / 4.0;
    const double y = base - plot_h * v / top;
    svg << "<text x=\"" << Num(left - 6) << "\" y=\"" << Num(y + 4)
        << "\" text-anchor=\"end\">" << Num(v) << "</text>\n";
  }
  std::size_t g = 0;
  for (const auto& [name, a] : by_method) {
    const double x0 = left + 10 + group_w * static_cast<double>(g++);
    for (int k = 0; k < 4; ++k) {
      const double h = plot_h * a.v[k] / top;
      svg << "<rect class=\"bar\" data-method=\"" << Escape(name)
          << "\" data-series=\"" << kSeries[k] << "\" x=\""
          << Num(x0 + bar_w * k) << "\" y=\"" << Num(base - h) << "\" width=\""
          << Num(bar_w - 2) << "\" height=\"" << Num(h) << "\" fill=\""
          << kColors[k] << "\"><title>" << kSeries[k] << " "
          << FormatReal(a.v[k]) << "</title></rect>\n";
    }
    svg << "<text x=\"" << Num(x0 + 2 * bar_w) << "\" y=\"" << Num(base + 16)
        << "\" text-anchor=\"middle\">" << Escape(name) << "</text>\n";
  }
  for (int k = 0; k < 4; ++k) {
    const double x = left + 110.0 * k;
    svg << "<rect x=\"" << Num(x) << "\" y=\"" << Num(height - 28)
        << "\" width=\"10\" height=\"10\" fill=\"" << kColors[k] << "\"/>"
        << "<text x=\"" << Num(x + 14) << "\" y=\"" << Num(height - 19)
        << "\">" << kSeries[k] << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void WriteReportSvg(const std::vector<ReportRow>& rows, const std::string& title,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << RenderReportSvg(rows, title);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace harm
