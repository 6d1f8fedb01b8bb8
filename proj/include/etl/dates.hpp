#pragma once

#include <cstdint>
#include <string>

namespace etl {

// Calendar dates travel as 8-digit YYYYMMDD integers. 0 means absent;
// 99991231 is the open-end sentinel on history records.
using Date = std::int32_t;

inline constexpr Date kDateAbsent = 0;
inline constexpr Date kOpenEndDate = 99991231;

bool is_valid_date(Date d);

// Calendar-correct previous/next day (month and year boundaries included).
Date prev_day(Date d);
Date next_day(Date d);

// Parses an 8-digit date field. Empty input yields kDateAbsent; anything
// else must be a valid calendar date or the sentinel.
Date parse_date(const std::string& text);

// Formats a date as its 8-digit form; absent becomes the empty string.
std::string format_date(Date d);

}  // namespace etl
