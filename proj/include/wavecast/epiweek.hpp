#pragma once

#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

#include "wavecast/error.hpp"

namespace wavecast {

/// Number of weeks (52 or 53) in an ISO-8601 week-numbering year.
inline int weeks_in_iso_year(int year) {
    auto jan1_dow = [](int y) { return (y + y / 4 - y / 100 + y / 400) % 7; };
    return (jan1_dow(year) == 4 || jan1_dow(year - 1) == 3) ? 53 : 52;
}

/// ISO-8601 week date (year plus 1-based week number), the time axis for
/// all case series. Serialized as `YYYY-Www`.
struct EpiWeek {
    int year = 0;
    int week = 0;

    friend auto operator<=>(const EpiWeek&, const EpiWeek&) = default;
};

inline bool is_valid(EpiWeek w) {
    return w.year >= 1583 && w.year <= 9999 && w.week >= 1 && w.week <= weeks_in_iso_year(w.year);
}

/// Linear week index (weeks since 1583-W01). Total order compatible with
/// operator<=>; differences give week distances.
inline long week_index(EpiWeek w) {
    long idx = 0;
    for (int y = 1583; y < w.year; ++y)
        idx += weeks_in_iso_year(y);
    return idx + w.week - 1;
}

inline EpiWeek week_from_index(long idx) {
    if (idx < 0)
        throw Error("week index before 1583-W01");
    int year = 1583;
    long n;
    while (idx >= (n = weeks_in_iso_year(year))) {
        idx -= n;
        ++year;
    }
    return EpiWeek{year, static_cast<int>(idx) + 1};
}

inline EpiWeek add_weeks(EpiWeek w, long n) {
    return week_from_index(week_index(w) + n);
}

inline long weeks_between(EpiWeek from, EpiWeek to) {
    return week_index(to) - week_index(from);
}

inline std::string to_string(EpiWeek w) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-W%02d", w.year, w.week);
    return buf;
}

/// Parses a strict `YYYY-Www` token. Throws on malformed input or a week
/// number outside the year's ISO range.
inline EpiWeek parse_epi_week(std::string_view token) {
    auto fail = [&] { throw Error("bad epidemiological week token '" + std::string(token) + "' (expected YYYY-Www)"); };
    if (token.size() != 8 || token[4] != '-' || token[5] != 'W')
        fail();
    for (int i : {0, 1, 2, 3, 6, 7})
        if (token[i] < '0' || token[i] > '9')
            fail();
    int year = (token[0] - '0') * 1000 + (token[1] - '0') * 100 + (token[2] - '0') * 10 + (token[3] - '0');
    int week = (token[6] - '0') * 10 + (token[7] - '0');
    EpiWeek w{year, week};
    if (!is_valid(w))
        throw Error("week '" + std::string(token) + "' out of range (year has " +
                    std::to_string(weeks_in_iso_year(year)) + " weeks)");
    return w;
}

/// Inclusive span of weeks.
struct WeekRange {
    EpiWeek start;
    EpiWeek end;

    long length() const { return weeks_between(start, end) + 1; }
    bool contains(EpiWeek w) const { return start <= w && w <= end; }

    friend auto operator<=>(const WeekRange&, const WeekRange&) = default;
};

} // namespace wavecast
