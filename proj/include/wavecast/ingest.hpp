#pragma once

#include <map>
#include <string>
#include <vector>

#include "wavecast/config.hpp"
#include "wavecast/csv.hpp"
#include "wavecast/epiweek.hpp"
#include "wavecast/error.hpp"

namespace wavecast {

/// Municipality code (IBGE code by convention). Names are reporting-only.
using CityId = std::string;

/// One city's ordered weekly case counts for one disease. Index i is the
/// week start_week + i; no gaps.
struct WeeklySeries {
    CityId city;
    std::string disease;
    EpiWeek start_week;
    std::vector<double> values;

    EpiWeek end_week() const { return add_weeks(start_week, static_cast<long>(values.size()) - 1); }

    bool covers(const WeekRange& range) const {
        return !values.empty() && start_week <= range.start && range.end <= end_week();
    }

    /// Copy of the values over an inclusive week range (must be covered).
    std::vector<double> slice(const WeekRange& range) const {
        if (!covers(range))
            throw Error("series for city '" + city + "' does not cover " + to_string(range.start) +
                        ".." + to_string(range.end));
        auto offset = static_cast<std::size_t>(weeks_between(start_week, range.start));
        return {values.begin() + offset, values.begin() + offset + range.length()};
    }
};

struct CityMeta {
    CityId city;
    std::string name;
    double latitude = 0;
    double longitude = 0;
    std::map<int, double> gdp_per_capita; // year -> currency units per inhabitant
};

/// The per-disease city set that survived the data-coverage filters.
/// Immutable after construction; safe to share across threads.
struct Cohort {
    std::string disease;
    std::map<CityId, WeeklySeries> series;
    std::map<CityId, CityMeta> meta;

    std::size_t size() const { return series.size(); }

    std::vector<CityId> city_ids() const {
        std::vector<CityId> ids;
        ids.reserve(series.size());
        for (const auto& [id, s] : series)
            ids.push_back(id);
        return ids;
    }
};

/// Loads the cases CSV (`city_id,epi_week,cases`). Rows for the same city
/// are merged in week order and missing weeks inside a city's observed
/// range are filled with 0: absence of a notification record is read as
/// zero notified cases.
inline std::vector<WeeklySeries> load_case_series(const std::string& path, const std::string& disease) {
    CsvReader reader(path, {"city_id", "epi_week", "cases"});
    std::map<CityId, std::map<long, double>> by_city;
    std::vector<std::string> fields;
    while (reader.next_row(fields)) {
        if (fields.size() != 3)
            reader.fail("expected 3 fields, got " + std::to_string(fields.size()));
        const CityId& city = fields[0];
        if (city.empty())
            reader.fail("empty city_id");
        EpiWeek week;
        long long cases;
        try {
            week = parse_epi_week(fields[1]);
            cases = parse_integer(fields[2], "case count");
        } catch (const Error& e) {
            reader.fail(e.what());
        }
        if (cases < 0)
            reader.fail("negative case count " + std::to_string(cases) + " for city '" + city + "'");
        auto [it, inserted] = by_city[city].emplace(week_index(week), static_cast<double>(cases));
        if (!inserted)
            reader.fail("duplicate (city, week) pair ('" + city + "', " + fields[1] + ")");
    }

    std::vector<WeeklySeries> out;
    out.reserve(by_city.size());
    for (auto& [city, weeks] : by_city) {
        long first = weeks.begin()->first;
        long last = weeks.rbegin()->first;
        WeeklySeries s;
        s.city = city;
        s.disease = disease;
        s.start_week = week_from_index(first);
        s.values.assign(static_cast<std::size_t>(last - first + 1), 0.0);
        for (const auto& [idx, v] : weeks)
            s.values[static_cast<std::size_t>(idx - first)] = v;
        out.push_back(std::move(s));
    }
    return out;
}

/// Loads city coordinates (`city_id,name,latitude,longitude`) and joins the
/// GDP file (`city_id,year,gdp_per_capita`). GDP rows for cities absent from
/// the cities file are skipped with a warning.
inline std::map<CityId, CityMeta> load_city_meta(const std::string& cities_path,
                                                 const std::string& gdp_path,
                                                 std::vector<std::string>* warnings = nullptr) {
    std::map<CityId, CityMeta> out;
    {
        CsvReader reader(cities_path, {"city_id", "name", "latitude", "longitude"});
        std::vector<std::string> fields;
        while (reader.next_row(fields)) {
            if (fields.size() != 4)
                reader.fail("expected 4 fields, got " + std::to_string(fields.size()));
            CityMeta meta;
            meta.city = fields[0];
            meta.name = fields[1];
            if (meta.city.empty())
                reader.fail("empty city_id");
            try {
                meta.latitude = parse_real(fields[2], "latitude");
                meta.longitude = parse_real(fields[3], "longitude");
            } catch (const Error& e) {
                reader.fail(e.what());
            }
            if (meta.latitude < -90 || meta.latitude > 90)
                reader.fail("latitude " + fields[2] + " out of [-90, 90]");
            if (meta.longitude < -180 || meta.longitude > 180)
                reader.fail("longitude " + fields[3] + " out of [-180, 180]");
            if (!out.emplace(meta.city, std::move(meta)).second)
                reader.fail("duplicate city_id '" + fields[0] + "'");
        }
    }
    {
        CsvReader reader(gdp_path, {"city_id", "year", "gdp_per_capita"});
        std::vector<std::string> fields;
        while (reader.next_row(fields)) {
            if (fields.size() != 3)
                reader.fail("expected 3 fields, got " + std::to_string(fields.size()));
            auto it = out.find(fields[0]);
            if (it == out.end()) {
                if (warnings)
                    warnings->push_back(reader.location() + ": gdp row for unknown city '" + fields[0] +
                                        "' skipped");
                continue;
            }
            long long year;
            double gdp;
            try {
                year = parse_integer(fields[1], "year");
                gdp = parse_real(fields[2], "gdp_per_capita");
            } catch (const Error& e) {
                reader.fail(e.what());
            }
            if (!(gdp > 0))
                reader.fail("gdp_per_capita must be positive, got '" + fields[2] + "'");
            if (!it->second.gdp_per_capita.emplace(static_cast<int>(year), gdp).second)
                reader.fail("duplicate gdp year " + fields[1] + " for city '" + fields[0] + "'");
        }
    }
    return out;
}

/// Keeps exactly the cities with (a) case data covering the configured
/// range, (b) coordinates and (c) GDP values for every configured year;
/// series are trimmed to the configured range. Dropped cities get one
/// warning line each.
inline Cohort build_cohort(const std::vector<WeeklySeries>& series,
                           const std::map<CityId, CityMeta>& meta,
                           const DiseaseConfig& config,
                           std::vector<std::string>* warnings = nullptr) {
    const WeekRange range = config.full_range();
    auto warn = [&](const CityId& city, const std::string& why) {
        if (warnings)
            warnings->push_back("city '" + city + "' dropped: " + why);
    };

    Cohort cohort;
    cohort.disease = config.disease;
    for (const auto& s : series) {
        auto mit = meta.find(s.city);
        if (mit == meta.end()) {
            warn(s.city, "no coordinates");
            continue;
        }
        if (!s.covers(range)) {
            warn(s.city, "case data does not cover " + to_string(range.start) + ".." + to_string(range.end));
            continue;
        }
        bool gdp_ok = true;
        for (int year = config.gdp_year_start; year <= config.gdp_year_end; ++year) {
            if (!mit->second.gdp_per_capita.count(year)) {
                warn(s.city, "missing gdp for year " + std::to_string(year));
                gdp_ok = false;
                break;
            }
        }
        if (!gdp_ok)
            continue;

        WeeklySeries trimmed;
        trimmed.city = s.city;
        trimmed.disease = s.disease;
        trimmed.start_week = range.start;
        trimmed.values = s.slice(range);
        cohort.series.emplace(s.city, std::move(trimmed));
        cohort.meta.emplace(s.city, mit->second);
    }
    if (cohort.series.empty())
        throw Error("no city satisfies cohort criteria");
    return cohort;
}

} // namespace wavecast
