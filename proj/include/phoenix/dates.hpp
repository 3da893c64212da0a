#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace phoenix {

// Calendar date. Accepts "YYYYMMDD" and "YYYY-MM-DD" on input; records
// always serialize dates as YYYYMMDD.
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;

  bool ok() const {
    return std::chrono::year_month_day{
        std::chrono::year{year}, std::chrono::month(unsigned(month)),
        std::chrono::day(unsigned(day))}
        .ok();
  }

  std::string yyyymmdd() const;   // "20140620"
  std::string iso() const;        // "2014-06-20"
};

std::optional<Date> parse_date(const std::string& text);

// Inclusive date interval, used for date-scoped dictionary entries.
struct DateRange {
  Date from;
  Date to;
  bool contains(const Date& d) const { return from <= d && d <= to; }
};

// Timestamps are UTC seconds since the epoch.
using Timestamp = std::chrono::sys_seconds;

Timestamp now_utc();
std::string iso8601(Timestamp t);                      // "2014-06-20T12:00:00Z"
std::optional<Timestamp> parse_iso8601(const std::string& text);
Date date_of(Timestamp t);
Timestamp start_of_day(const Date& d);

}  // namespace phoenix
