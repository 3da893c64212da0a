#include "phoenix/dates.hpp"

#include <cstdio>
#include <ctime>

namespace phoenix {

std::string Date::yyyymmdd() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d%02d%02d", year, month, day);
  return buf;
}

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::optional<Date> parse_date(const std::string& text) {
  Date d;
  if (text.size() == 8) {
    if (std::sscanf(text.c_str(), "%4d%2d%2d", &d.year, &d.month, &d.day) != 3)
      return std::nullopt;
  } else if (text.size() == 10) {
    if (std::sscanf(text.c_str(), "%4d-%2d-%2d", &d.year, &d.month, &d.day) !=
        3)
      return std::nullopt;
  } else {
    return std::nullopt;
  }
  if (!d.ok()) return std::nullopt;
  return d;
}

Timestamp now_utc() {
  return std::chrono::time_point_cast<std::chrono::seconds>(
      std::chrono::system_clock::now());
}

std::string iso8601(Timestamp t) {
  std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

std::optional<Timestamp> parse_iso8601(const std::string& text) {
  int y, mo, d, h, mi, s;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2dZ", &y, &mo, &d, &h,
                  &mi, &s) != 6)
    return std::nullopt;
  Date date{y, mo, d};
  if (!date.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60)
    return std::nullopt;
  return start_of_day(date) + std::chrono::hours(h) + std::chrono::minutes(mi) +
         std::chrono::seconds(s);
}

Date date_of(Timestamp t) {
  auto days = std::chrono::floor<std::chrono::days>(t);
  std::chrono::year_month_day ymd{days};
  return Date{int(ymd.year()), int(unsigned(ymd.month())),
              int(unsigned(ymd.day()))};
}

Timestamp start_of_day(const Date& d) {
  std::chrono::year_month_day ymd{std::chrono::year{d.year},
                                  std::chrono::month(unsigned(d.month)),
                                  std::chrono::day(unsigned(d.day))};
  return std::chrono::sys_days{ymd};
}

}  // namespace phoenix
