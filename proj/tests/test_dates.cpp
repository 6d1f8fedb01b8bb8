#include <doctest.h>

#include "etl/dates.hpp"
#include "etl/errors.hpp"

using namespace etl;

TEST_CASE("date validity") {
  CHECK(is_valid_date(20141008));
  CHECK(is_valid_date(20160229));  // leap day
  CHECK(is_valid_date(99991231));
  CHECK_FALSE(is_valid_date(20141032));
  CHECK_FALSE(is_valid_date(20141300));
  CHECK_FALSE(is_valid_date(20150229));
  CHECK_FALSE(is_valid_date(0));
  CHECK_FALSE(is_valid_date(123));
}

TEST_CASE("previous day crosses month and year boundaries") {
  CHECK(prev_day(20141008) == 20141007);
  CHECK(prev_day(20141001) == 20140930);
  CHECK(prev_day(20150101) == 20141231);
  CHECK(prev_day(20160301) == 20160229);
  CHECK(prev_day(20150301) == 20150228);
  CHECK(next_day(20141231) == 20150101);
  CHECK(next_day(prev_day(20141008)) == 20141008);
}

TEST_CASE("parse and format") {
  CHECK(parse_date("20141008") == 20141008);
  CHECK(parse_date("") == kDateAbsent);
  CHECK(format_date(20141008) == "20141008");
  CHECK(format_date(kDateAbsent) == "");
  CHECK_THROWS_AS(parse_date("2014100"), Error);
  CHECK_THROWS_AS(parse_date("2014-1-1"), Error);
  CHECK_THROWS_AS(parse_date("20141301"), Error);
}
