#include "etl/dates.hpp"

#include <chrono>

#include "etl/errors.hpp"

namespace etl {

namespace {

std::chrono::year_month_day to_ymd(Date d) {
  return std::chrono::year_month_day{std::chrono::year(d / 10000),
                                     std::chrono::month(unsigned(d / 100 % 100)),
                                     std::chrono::day(unsigned(d % 100))};
}

Date from_ymd(const std::chrono::year_month_day& ymd) {
  return Date(int(ymd.year()) * 10000 + int(unsigned(ymd.month())) * 100 +
              int(unsigned(ymd.day())));
}

}  // namespace

bool is_valid_date(Date d) {
  if (d < 10000101 || d > 99991231) return false;
  return to_ymd(d).ok();
}

Date prev_day(Date d) {
  if (!is_valid_date(d))
    throw Error(ErrorCode::ParseError, "not a calendar date: " + std::to_string(d));
  auto days = std::chrono::sys_days(to_ymd(d)) - std::chrono::days(1);
  return from_ymd(std::chrono::year_month_day(days));
}

Date next_day(Date d) {
  if (!is_valid_date(d))
    throw Error(ErrorCode::ParseError, "not a calendar date: " + std::to_string(d));
  auto days = std::chrono::sys_days(to_ymd(d)) + std::chrono::days(1);
  return from_ymd(std::chrono::year_month_day(days));
}

Date parse_date(const std::string& text) {
  if (text.empty()) return kDateAbsent;
  if (text.size() != 8) throw Error(ErrorCode::ParseError, "bad date field '" + text + "'");
  Date d = 0;
  for (char c : text) {
    if (c < '0' || c > '9')
      throw Error(ErrorCode::ParseError, "bad date field '" + text + "'");
    d = d * 10 + (c - '0');
  }
  if (!is_valid_date(d)) throw Error(ErrorCode::ParseError, "bad date field '" + text + "'");
  return d;
}

std::string format_date(Date d) {
  if (d == kDateAbsent) return "";
  return std::to_string(d);
}

}  // namespace etl
