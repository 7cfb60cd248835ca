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

// Numeric CSV with a mandatory header row. '.' decimal point, no quoting.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "trimest/model.hpp"

namespace trimest {

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
};

/// Throws ParseError naming the 1-based line of the first bad row.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// regression: x1..xp,y. multiresponse: x1..xp,y1..yq. ggm: x1..xp.
Dataset dataset_from_table(const CsvTable& table, DataKind kind, std::size_t q = 1);

/// 17 significant digits, enough to read back the same double.
std::string format_double(double v);

void write_matrix_csv(std::ostream& out, const Matrix& m, const std::vector<std::string>& header);

}  // namespace trimest
