#pragma once

#include <compare>
#include <string>
#include <string_view>

#include "safemob/common.hpp"

namespace safemob {

struct Date {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;

    auto operator<=>(const Date&) const = default;
};

/// Parses `YYYY-MM-DD`; rejects impossible calendar dates.
Date parse_iso_date(std::string_view text);
std::string format_iso_date(const Date& date);

UnixTime start_of_day(const Date& date);
/// Last second of the day, so `[start_of_day(a), end_of_day(b)]` is inclusive.
UnixTime end_of_day(const Date& date);
Date date_of(UnixTime t);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_iso_datetime(UnixTime t);

}  // namespace safemob
