#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "wavecast/ingest.hpp"

using namespace wavecast;
using testutil::TempDir;
using testutil::write_file;

namespace {

DiseaseConfig small_config() {
    DiseaseConfig c;
    c.disease = "testpox";
    c.train_range = {{2020, 1}, {2020, 4}};
    c.test_range = {{2020, 5}, {2020, 6}};
    c.gdp_year_start = 2014;
    c.gdp_year_end = 2015;
    return c;
}

} // namespace

TEST_CASE("load_case_series parses and merges rows per city", "[ingest]") {
    TempDir dir("cases");
    write_file(dir.file("cases.csv"),
               "city_id,epi_week,cases\n"
               "A,2020-W01,3\n"
               "A,2020-W02,5\n"
               "B,2020-W02,1\n");
    auto series = load_case_series(dir.file("cases.csv"), "testpox");
    REQUIRE(series.size() == 2);
    CHECK(series[0].city == "A");
    CHECK(series[0].start_week == EpiWeek{2020, 1});
    CHECK(series[0].values == std::vector<double>{3, 5});
    CHECK(series[0].disease == "testpox");
    CHECK(series[1].city == "B");
    CHECK(series[1].values == std::vector<double>{1});
}

TEST_CASE("missing interior weeks are zero-filled", "[ingest]") {
    TempDir dir("cases");
    write_file(dir.file("cases.csv"),
               "city_id,epi_week,cases\n"
               "A,2020-W01,3\n"
               "A,2020-W03,5\n");
    auto series = load_case_series(dir.file("cases.csv"), "d");
    REQUIRE(series.size() == 1);
    CHECK(series[0].values == std::vector<double>{3, 0, 5});
}

TEST_CASE("loading twice yields equal structures", "[ingest]") {
    TempDir dir("cases");
    write_file(dir.file("cases.csv"),
               "city_id,epi_week,cases\nA,2020-W01,3\nA,2020-W04,2\nB,2020-W02,9\n");
    auto first = load_case_series(dir.file("cases.csv"), "d");
    auto second = load_case_series(dir.file("cases.csv"), "d");
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].city == second[i].city);
        CHECK(first[i].start_week == second[i].start_week);
        CHECK(first[i].values == second[i].values);
    }
}

TEST_CASE("case file errors carry the line number", "[ingest]") {
    TempDir dir("cases");

    write_file(dir.file("neg.csv"), "city_id,epi_week,cases\nA,2020-W01,-2\n");
    CHECK_THROWS_WITH(load_case_series(dir.file("neg.csv"), "d"),
                      Catch::Matchers::ContainsSubstring("negative case count") &&
                          Catch::Matchers::ContainsSubstring(":2"));

    write_file(dir.file("frac.csv"), "city_id,epi_week,cases\nA,2020-W01,2.5\n");
    CHECK_THROWS_WITH(load_case_series(dir.file("frac.csv"), "d"),
                      Catch::Matchers::ContainsSubstring("non-integer"));

    write_file(dir.file("week.csv"), "city_id,epi_week,cases\nA,2020-13,2\n");
    CHECK_THROWS_WITH(load_case_series(dir.file("week.csv"), "d"),
                      Catch::Matchers::ContainsSubstring("week"));

    write_file(dir.file("dup.csv"), "city_id,epi_week,cases\nA,2020-W01,2\nA,2020-W01,3\n");
    CHECK_THROWS_WITH(load_case_series(dir.file("dup.csv"), "d"),
                      Catch::Matchers::ContainsSubstring("duplicate"));
}

TEST_CASE("load_city_meta joins coordinates and gdp", "[ingest]") {
    TempDir dir("meta");
    write_file(dir.file("cities.csv"),
               "city_id,name,latitude,longitude\nA,Alpha,-23.5,-46.6\nB,Beta,1.0,2.0\n");
    write_file(dir.file("gdp.csv"),
               "city_id,year,gdp_per_capita\nA,2014,30000\nA,2015,31000\nZ,2014,5\n");
    std::vector<std::string> warnings;
    auto meta = load_city_meta(dir.file("cities.csv"), dir.file("gdp.csv"), &warnings);
    REQUIRE(meta.size() == 2);
    CHECK(meta.at("A").name == "Alpha");
    CHECK(meta.at("A").latitude == -23.5);
    CHECK(meta.at("A").longitude == -46.6);
    CHECK(meta.at("A").gdp_per_capita == std::map<int, double>{{2014, 30000}, {2015, 31000}});
    CHECK(meta.at("B").gdp_per_capita.empty());
    REQUIRE(warnings.size() == 1); // unknown city Z skipped with a warning
    CHECK(warnings[0].find("'Z'") != std::string::npos);
}

TEST_CASE("coordinate range checks", "[ingest]") {
    TempDir dir("meta");
    write_file(dir.file("gdp.csv"), "city_id,year,gdp_per_capita\n");

    write_file(dir.file("lat.csv"), "city_id,name,latitude,longitude\nA,Alpha,91,0\n");
    CHECK_THROWS_WITH(load_city_meta(dir.file("lat.csv"), dir.file("gdp.csv")),
                      Catch::Matchers::ContainsSubstring("latitude"));

    write_file(dir.file("lon.csv"), "city_id,name,latitude,longitude\nA,Alpha,0,-181\n");
    CHECK_THROWS_WITH(load_city_meta(dir.file("lon.csv"), dir.file("gdp.csv")),
                      Catch::Matchers::ContainsSubstring("longitude"));

    write_file(dir.file("cities.csv"), "city_id,name,latitude,longitude\nA,Alpha,0,0\n");
    write_file(dir.file("badgdp.csv"), "city_id,year,gdp_per_capita\nA,2014,0\n");
    CHECK_THROWS_WITH(load_city_meta(dir.file("cities.csv"), dir.file("badgdp.csv")),
                      Catch::Matchers::ContainsSubstring("positive"));
}

TEST_CASE("build_cohort keeps exactly the fully covered cities", "[ingest]") {
    DiseaseConfig config = small_config();

    auto make_series = [](const CityId& id, EpiWeek start, int n) {
        WeeklySeries s;
        s.city = id;
        s.disease = "testpox";
        s.start_week = start;
        for (int i = 0; i < n; ++i)
            s.values.push_back(i + 1);
        return s;
    };
    auto make_meta = [](const CityId& id, std::vector<int> years) {
        CityMeta m;
        m.city = id;
        m.latitude = 1;
        m.longitude = 2;
        for (int y : years)
            m.gdp_per_capita[y] = 1000.0 + y;
        return m;
    };

    std::vector<WeeklySeries> series{
        make_series("A", {2020, 1}, 6), // full coverage
        make_series("B", {2020, 1}, 8), // longer than needed: trimmed
        make_series("C", {2020, 2}, 6), // starts late
        make_series("D", {2020, 1}, 6), // missing gdp year
        make_series("E", {2020, 1}, 6), // no meta at all
    };
    std::map<CityId, CityMeta> meta{
        {"A", make_meta("A", {2014, 2015})},
        {"B", make_meta("B", {2014, 2015})},
        {"C", make_meta("C", {2014, 2015})},
        {"D", make_meta("D", {2014})},
    };

    std::vector<std::string> warnings;
    Cohort cohort = build_cohort(series, meta, config, &warnings);
    CHECK(cohort.city_ids() == std::vector<CityId>{"A", "B"});
    CHECK(cohort.series.at("A").values.size() == 6);
    CHECK(cohort.series.at("B").values.size() == 6); // trimmed to the configured range
    CHECK(cohort.series.at("B").start_week == EpiWeek{2020, 1});
    CHECK(cohort.meta.count("A") == 1);
    CHECK(warnings.size() == 3);

    // every kept series has meta and configured length
    for (const auto& [id, s] : cohort.series) {
        CHECK(cohort.meta.count(id) == 1);
        CHECK(static_cast<long>(s.values.size()) == config.full_range().length());
    }
}

TEST_CASE("empty cohort is an error", "[ingest]") {
    DiseaseConfig config = small_config();
    WeeklySeries s;
    s.city = "A";
    s.start_week = {2020, 3}; // cannot cover the range
    s.values = {1, 2};
    CHECK_THROWS_WITH(build_cohort({s}, {}, config),
                      Catch::Matchers::ContainsSubstring("no city satisfies cohort criteria"));
}
