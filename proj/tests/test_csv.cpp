#include <doctest.h>

#include <random>

#include "etl/csv.hpp"
#include "etl/errors.hpp"
#include "support/tempdir.hpp"

using namespace etl;

TEST_CASE("parse basic table") {
  auto t = parse_csv("a,b\n1,2\n3,4\n", "test");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][1] == "4");
  CHECK(t.line_numbers[0] == 2);
}

TEST_CASE("quoting round trip") {
  CsvTable t;
  t.header = {"x", "y"};
  t.rows.push_back({"has,comma", "has \"quote\""});
  t.rows.push_back({"line\nbreak", ""});
  auto text = to_csv(t);
  auto back = parse_csv(text, "test");
  CHECK(back.rows == t.rows);
  CHECK(to_csv(back) == text);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_csv("a,b\n1\n", "f"), doctest::Contains("f:2"), Error);
  CHECK_THROWS_AS(parse_csv("a,b\n\"open,2\n", "f"), Error);
  CHECK_THROWS_AS(parse_csv("", "f"), Error);
}

TEST_CASE("blank lines are skipped, crlf tolerated") {
  auto t = parse_csv("a,b\r\n1,2\r\n\r\n3,4\r\n", "test");
  CHECK(t.rows.size() == 2);
}

TEST_CASE("file write is readable back") {
  testing::TempDir dir("csv");
  CsvTable t;
  t.header = {"c"};
  t.rows.push_back({"v"});
  write_csv_file(dir.path() / "t.csv", t);
  auto back = read_csv_file(dir.path() / "t.csv");
  CHECK(back.rows == t.rows);
  CHECK_THROWS_AS(read_csv_file(dir.path() / "missing.csv"), Error);
}

TEST_CASE("serialize/parse round trip holds for random tables") {
  std::mt19937 rng(7);
  const std::string alphabet = "ab,\"\n x";
  for (int trial = 0; trial < 50; ++trial) {
    CsvTable t;
    // Two columns minimum: in a one-column table an empty row is
    // indistinguishable from the blank lines the parser tolerates.
    int cols = 2 + int(rng() % 3);
    for (int c = 0; c < cols; ++c) t.header.push_back("c" + std::to_string(c));
    int rows = int(rng() % 8);
    for (int r = 0; r < rows; ++r) {
      std::vector<std::string> row;
      for (int c = 0; c < cols; ++c) {
        std::string v;
        int len = int(rng() % 6);
        for (int i = 0; i < len; ++i) v += alphabet[rng() % alphabet.size()];
        row.push_back(v);
      }
      t.rows.push_back(row);
    }
    auto text = to_csv(t);
    auto back = parse_csv(text, "prop");
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(to_csv(back) == text);
  }
}
