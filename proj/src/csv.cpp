// Copyright 2026 The trimest Authors
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

#include "trimest/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "trimest/error.hpp"

namespace trimest {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (!have_header) {
      for (auto& c : cells) t.header.push_back(trim(c));
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size())
      fail(ErrorCode::ParseError, at_line(lineno) + "expected " + std::to_string(t.header.size()) +
                                      " fields, found " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto& raw : cells) {
      const std::string c = trim(raw);
      double v = 0.0;
      const char* first = c.data();
      const char* last = c.data() + c.size();
      if (!c.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (c.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
        fail(ErrorCode::ParseError, at_line(lineno) + "not a finite number: '" + c + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) fail(ErrorCode::ParseError, "line 1: missing header row");
  t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      t.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  return read_csv(in);
}

Dataset dataset_from_table(const CsvTable& table, DataKind kind, std::size_t q) {
  const Index cols = table.values.cols();
  const Index n = table.values.rows();
  require(n >= 1, ErrorCode::ParseError, "no data rows");
  switch (kind) {
    case DataKind::ggm:
      return Dataset::ggm(table.values);
    case DataKind::regression:
      require(cols >= 2, ErrorCode::ParseError, "regression data needs x columns and a y column");
      return Dataset::regression(table.values.leftCols(cols - 1), table.values.col(cols - 1));
    case DataKind::multiresponse: {
      const auto qi = static_cast<Index>(q);
      require(q >= 1 && cols > qi, ErrorCode::ParseError, "multiresponse data needs x columns and q response columns");
      return Dataset::multiresponse(table.values.leftCols(cols - qi), table.values.rightCols(qi));
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown data kind");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_matrix_csv(std::ostream& out, const Matrix& m, const std::vector<std::string>& header) {
  require(static_cast<Index>(header.size()) == m.cols(), ErrorCode::IncompatibleShapes,
          "header width differs from matrix width");
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

}  // namespace trimest
