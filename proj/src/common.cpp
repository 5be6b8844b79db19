#include "safemob/common.hpp"

#include <chrono>
#include <cstdio>

#include "safemob/calendar.hpp"

namespace safemob {

std::string_view to_string(TravelMode mode) noexcept {
    return mode == TravelMode::Walk ? "walk" : "car";
}

TravelMode travel_mode_from_string(std::string_view text) {
    if (text == "walk") return TravelMode::Walk;
    if (text == "car") return TravelMode::Car;
    fail(ErrorKind::InvalidArgument, "unknown travel mode '" + std::string(text) + "'");
}

namespace {

constexpr UnixTime kSecondsPerDay = 86400;

UnixTime floor_div(UnixTime a, UnixTime b) {
    UnixTime q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

Date parse_iso_date(std::string_view text) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    const std::string s(text);
    if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
        fail(ErrorKind::Parse, "expected ISO date YYYY-MM-DD, got '" + s + "'");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) fail(ErrorKind::Parse, "invalid calendar date '" + s + "'");
    return Date{y, m, d};
}

std::string format_iso_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", date.year, date.month, date.day);
    return buf;
}

UnixTime start_of_day(const Date& date) {
    using namespace std::chrono;
    const sys_days days{year{date.year} / month{date.month} / day{date.day}};
    return static_cast<UnixTime>(days.time_since_epoch().count()) * kSecondsPerDay;
}

UnixTime end_of_day(const Date& date) { return start_of_day(date) + kSecondsPerDay - 1; }

Date date_of(UnixTime t) {
    using namespace std::chrono;
    const sys_days days{std::chrono::days{floor_div(t, kSecondsPerDay)}};
    const year_month_day ymd{days};
    return Date{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day())};
}

std::string format_iso_datetime(UnixTime t) {
    const Date d = date_of(t);
    const UnixTime secs = t - start_of_day(d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_iso_date(d).c_str(),
                  static_cast<int>(secs / 3600), static_cast<int>((secs / 60) % 60),
                  static_cast<int>(secs % 60));
    return buf;
}

}  // namespace safemob
