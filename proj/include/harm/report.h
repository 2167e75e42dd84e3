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


#ifndef HARM_REPORT_H_
#define HARM_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "harm/bounds.h"

namespace harm {

struct ReportRow {
  std::string method;
  std::uint64_t seed = 0;
  BoundReport report;
};

// Header `method,seed,train_err,test_err,c,q,d_theta,phi,bound_c,bound_d`.
// Rows are written sorted by (method, seed).
void WriteReportCsv(std::vector<ReportRow> rows, std::ostream& out);
void WriteReportCsv(std::vector<ReportRow> rows,
                    const std::filesystem::path& path);
// delta is not stored in the CSV; rows read back carry kDefaultDelta.
std::vector<ReportRow> ReadReportCsv(std::istream& in);
std::vector<ReportRow> ReadReportCsv(const std::filesystem::path& path);

// Grouped bar chart: per method the seed means of train_err, test_err,
// bound_c and bound_d, one <rect class="bar"> each.
std::string RenderReportSvg(const std::vector<ReportRow>& rows,
                            const std::string& title);
void WriteReportSvg(const std::vector<ReportRow>& rows, const std::string& title,
                    const std::filesystem::path& path);

}  // namespace harm

#endif  // HARM_REPORT_H_
