#pragma once

#include <string>
#include <vector>

#include "wavecast/epiweek.hpp"

namespace wavecast {

/// Per-disease experiment settings: date splits, lag structure, anomaly
/// threshold and the GDP coverage window a city must satisfy.
struct DiseaseConfig {
    std::string disease;
    WeekRange train_range;
    WeekRange test_range;
    int lags = 5;
    int horizon = 1;
    int seasonal_m = 0; // 0 means "same as horizon"
    double z_threshold = 4.0;
    int gdp_year_start = 2014;
    int gdp_year_end = 2020;

    int effective_seasonal_m() const { return seasonal_m > 0 ? seasonal_m : horizon; }

    WeekRange full_range() const { return WeekRange{train_range.start, test_range.end}; }

    /// Structural checks; returns human-readable problems, empty when fine.
    std::vector<std::string> problems() const {
        std::vector<std::string> out;
        if (disease.empty())
            out.push_back("disease name is empty");
        if (!is_valid(train_range.start) || !is_valid(train_range.end))
            out.push_back("train range has invalid weeks");
        if (!is_valid(test_range.start) || !is_valid(test_range.end))
            out.push_back("test range has invalid weeks");
        if (is_valid(train_range.start) && is_valid(train_range.end) && train_range.end < train_range.start)
            out.push_back("train range ends before it starts");
        if (is_valid(test_range.start) && is_valid(test_range.end) && test_range.end < test_range.start)
            out.push_back("test range ends before it starts");
        if (is_valid(train_range.end) && is_valid(test_range.start) && !(train_range.end < test_range.start))
            out.push_back("ranges overlap: train must end strictly before test begins");
        if (lags < 1)
            out.push_back("lags must be >= 1");
        if (horizon < 1)
            out.push_back("horizon must be >= 1");
        if (seasonal_m < 0)
            out.push_back("seasonal_m must be >= 0 (0 = horizon)");
        if (!(z_threshold > 0))
            out.push_back("z_threshold must be > 0");
        if (gdp_year_end < gdp_year_start)
            out.push_back("gdp year range is reversed");
        return out;
    }
};

} // namespace wavecast
