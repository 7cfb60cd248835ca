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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "reference.hpp"
#include "trimest/csv.hpp"
#include "trimest/error.hpp"

using namespace trimest;

namespace {

ErrorCode code_of(const std::string& text) {
  std::istringstream in(text);
  try {
    read_csv(in);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

std::string message_of(const std::string& text) {
  std::istringstream in(text);
  try {
    read_csv(in);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("reads a numeric table", "[csv]") {
  std::istringstream in("a,b\n1,2.5\n-3e2,4\n");
  const CsvTable t = read_csv(in);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.values.rows() == 2);
  CHECK(t.values(1, 0) == -300.0);
  CHECK(t.values(0, 1) == 2.5);
}

TEST_CASE("parse errors name the offending line", "[csv]") {
  CHECK(code_of("a,b\n1,2\n3\n") == ErrorCode::ParseError);
  CHECK(message_of("a,b\n1,2\n3\n").rfind("line 3", 0) == 0);
  CHECK(message_of("a,b\n1,2\n1,x\n").rfind("line 3", 0) == 0);
  CHECK(code_of("") == ErrorCode::ParseError);
  CHECK(code_of("a,b\n1,nan\n") == ErrorCode::ParseError);
}

TEST_CASE("a header without rows is not a dataset", "[csv]") {
  std::istringstream in("a,b\n");
  const CsvTable t = read_csv(in);
  CHECK(t.values.rows() == 0);
  try {
    dataset_from_table(t, DataKind::regression);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
}

TEST_CASE("missing files are an io error", "[csv]") {
  try {
    read_csv_file("/nonexistent/trimest/file.csv");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("doubles round-trip through seventeen digits", "[csv]") {
  std::mt19937_64 gen(71);
  const Matrix m = testing::random_gaussian(6, 4, gen) * 1e3;
  std::ostringstream out;
  write_matrix_csv(out, m, {"c1", "c2", "c3", "c4"});
  std::istringstream in(out.str());
  const CsvTable t = read_csv(in);
  CHECK(t.values == m);
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("tables become datasets", "[csv]") {
  std::istringstream in("x1,x2,y1,y2\n1,2,3,4\n5,6,7,8\n");
  const CsvTable t = read_csv(in);
  const Dataset reg = dataset_from_table(t, DataKind::regression);
  CHECK(reg.p() == 3);
  CHECK(reg.y()(1, 0) == 8.0);
  const Dataset multi = dataset_from_table(t, DataKind::multiresponse, 2);
  CHECK(multi.p() == 2);
  CHECK(multi.q() == 2);
  CHECK(multi.y()(0, 1) == 4.0);
  const Dataset g = dataset_from_table(t, DataKind::ggm);
  CHECK(g.p() == 4);
  CHECK_THROWS_AS(dataset_from_table(t, DataKind::multiresponse, 4), Error);
}
