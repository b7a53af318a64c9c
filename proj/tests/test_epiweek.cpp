#include <catch2/catch_amalgamated.hpp>

#include "wavecast/epiweek.hpp"

using namespace wavecast;

TEST_CASE("ISO year lengths", "[epiweek]") {
    CHECK(weeks_in_iso_year(2020) == 53);
    CHECK(weeks_in_iso_year(2015) == 53);
    CHECK(weeks_in_iso_year(2004) == 53);
    CHECK(weeks_in_iso_year(2019) == 52);
    CHECK(weeks_in_iso_year(2021) == 52);
    CHECK(weeks_in_iso_year(2014) == 52);
}

TEST_CASE("parse and format round-trip", "[epiweek]") {
    EpiWeek w = parse_epi_week("2020-W05");
    CHECK(w.year == 2020);
    CHECK(w.week == 5);
    CHECK(to_string(w) == "2020-W05");
    CHECK(to_string(parse_epi_week("2014-W52")) == "2014-W52");
}

TEST_CASE("parse rejects malformed tokens", "[epiweek]") {
    CHECK_THROWS_AS(parse_epi_week("2020-05"), Error);
    CHECK_THROWS_AS(parse_epi_week("2020W05"), Error);
    CHECK_THROWS_AS(parse_epi_week("2020-W00"), Error);
    CHECK_THROWS_AS(parse_epi_week("2019-W53"), Error); // 2019 has 52 weeks
    CHECK_THROWS_AS(parse_epi_week("20-W05"), Error);
    CHECK_THROWS_AS(parse_epi_week("abcd-Wxy"), Error);
    CHECK_NOTHROW(parse_epi_week("2020-W53"));
}

TEST_CASE("week arithmetic crosses year boundaries", "[epiweek]") {
    CHECK(add_weeks({2019, 52}, 1) == EpiWeek{2020, 1});
    CHECK(add_weeks({2020, 53}, 1) == EpiWeek{2021, 1});
    CHECK(add_weeks({2021, 1}, -1) == EpiWeek{2020, 53});
    CHECK(weeks_between({2020, 1}, {2020, 10}) == 9);
    CHECK(weeks_between({2019, 52}, {2020, 2}) == 2);
    CHECK(weeks_between({2020, 10}, {2020, 1}) == -9);
}

TEST_CASE("index round-trip over a long span", "[epiweek]") {
    EpiWeek w{2013, 1};
    for (int i = 0; i < 700; ++i) {
        EpiWeek cur = add_weeks(w, i);
        CHECK(week_from_index(week_index(cur)) == cur);
    }
}

TEST_CASE("week ranges", "[epiweek]") {
    WeekRange r{{2020, 1}, {2020, 10}};
    CHECK(r.length() == 10);
    CHECK(r.contains({2020, 5}));
    CHECK_FALSE(r.contains({2020, 11}));
    CHECK_FALSE(r.contains({2019, 52}));
}
