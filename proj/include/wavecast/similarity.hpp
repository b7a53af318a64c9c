#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wavecast/config.hpp"
#include "wavecast/error.hpp"
#include "wavecast/ingest.hpp"
#include "wavecast/preprocess.hpp"

namespace wavecast {

/// How related cities are selected for a target.
enum class Criterion {
    none,       // baseline, no augmentation
    geographic, // Euclidean distance in (latitude, longitude) degrees
    gdp_dtw,    // DTW over yearly GDP-per-capita series
    cases_dtw,  // DTW over normalized training case series
};

inline std::string to_string(Criterion c) {
    switch (c) {
    case Criterion::none: return "none";
    case Criterion::geographic: return "geographic";
    case Criterion::gdp_dtw: return "gdp_dtw";
    case Criterion::cases_dtw: return "cases_dtw";
    }
    return "?";
}

/// Accepts both the full names and the CLI short forms geo|gdp|cases|none.
inline Criterion parse_criterion(const std::string& name) {
    if (name == "none") return Criterion::none;
    if (name == "geo" || name == "geographic") return Criterion::geographic;
    if (name == "gdp" || name == "gdp_dtw") return Criterion::gdp_dtw;
    if (name == "cases" || name == "cases_dtw") return Criterion::cases_dtw;
    throw Error("unknown criterion '" + name + "' (expected geo|gdp|cases|none)");
}

/// Candidates for one target, ascending by distance; the target itself is
/// never listed. Ties are broken by city id so the order is total.
struct NeighborRanking {
    CityId target;
    std::vector<std::pair<CityId, double>> ordered;
};

/// Plain Euclidean distance in degree space, exactly the quantity the
/// ranking criterion is defined over. Haversine is available behind
/// RankOptions for sensitivity runs, not as the default.
inline double geo_distance(const CityMeta& a, const CityMeta& b) {
    double dlat = a.latitude - b.latitude;
    double dlon = a.longitude - b.longitude;
    return std::sqrt(dlat * dlat + dlon * dlon);
}

inline double haversine_km(const CityMeta& a, const CityMeta& b) {
    constexpr double radius = 6371.0088;
    constexpr double deg = 3.14159265358979323846 / 180.0;
    double s1 = std::sin((b.latitude - a.latitude) * deg / 2);
    double s2 = std::sin((b.longitude - a.longitude) * deg / 2);
    double h = s1 * s1 + std::cos(a.latitude * deg) * std::cos(b.latitude * deg) * s2 * s2;
    return 2 * radius * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Dynamic time warping distance with pointwise cost |p - q|: the minimum
/// over monotone alignments (steps advance i, j, or both) of the summed
/// costs, via the classic O(nm) accumulated-cost recurrence. No window
/// constraint; the series here are short.
inline double dtw_distance(std::span<const double> p, std::span<const double> q) {
    if (p.empty() || q.empty())
        throw Error("dtw_distance: empty series");
    const std::size_t m = q.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= p.size(); ++i) {
        cur[0] = inf;
        for (std::size_t j = 1; j <= m; ++j) {
            double cost = std::abs(p[i - 1] - q[j - 1]);
            cur[j] = cost + std::min({prev[j - 1], prev[j], cur[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

struct RankOptions {
    bool haversine = false;     // geographic criterion in kilometers instead of degrees
    bool gdp_normalize = false; // divide each GDP series by its own max before DTW
};

namespace detail {

inline std::vector<double> gdp_sequence(const CityMeta& meta, const DiseaseConfig& config,
                                        bool normalize) {
    std::vector<double> seq;
    for (int year = config.gdp_year_start; year <= config.gdp_year_end; ++year) {
        auto it = meta.gdp_per_capita.find(year);
        if (it == meta.gdp_per_capita.end())
            throw Error("city '" + meta.city + "' missing gdp for year " + std::to_string(year));
        seq.push_back(it->second);
    }
    if (normalize && !seq.empty()) {
        double mx = *std::max_element(seq.begin(), seq.end());
        if (mx > 0)
            for (double& v : seq)
                v /= mx;
    }
    return seq;
}

} // namespace detail

/// Ranks every other cohort city by distance to the target under the given
/// criterion. The cases criterion runs on normalized training segments
/// only; hold-out values never influence the ranking.
inline NeighborRanking rank_neighbors(const CityId& target, const Cohort& cohort,
                                      Criterion criterion,
                                      const std::map<CityId, SplitSeries>& splits,
                                      const DiseaseConfig& config,
                                      const RankOptions& options = {}) {
    if (criterion == Criterion::none)
        throw Error("rank_neighbors: criterion 'none' has no neighborhood");
    if (!cohort.series.count(target))
        throw Error("rank_neighbors: target '" + target + "' not in cohort");

    auto split_of = [&](const CityId& id) -> const SplitSeries& {
        auto it = splits.find(id);
        if (it == splits.end())
            throw Error("rank_neighbors: no split series for city '" + id + "'");
        return it->second;
    };

    NeighborRanking ranking;
    ranking.target = target;
    for (const auto& [id, meta] : cohort.meta) {
        if (id == target)
            continue;
        double d = 0;
        switch (criterion) {
        case Criterion::geographic:
            d = options.haversine ? haversine_km(cohort.meta.at(target), meta)
                                  : geo_distance(cohort.meta.at(target), meta);
            break;
        case Criterion::gdp_dtw:
            d = dtw_distance(detail::gdp_sequence(cohort.meta.at(target), config, options.gdp_normalize),
                             detail::gdp_sequence(meta, config, options.gdp_normalize));
            break;
        case Criterion::cases_dtw:
            d = dtw_distance(split_of(target).train, split_of(id).train);
            break;
        case Criterion::none:
            break;
        }
        ranking.ordered.emplace_back(id, d);
    }
    std::sort(ranking.ordered.begin(), ranking.ordered.end(),
              [](const auto& a, const auto& b) {
                  return a.second != b.second ? a.second < b.second : a.first < b.first;
              });
    return ranking;
}

/// First k cities of the ranking.
inline std::vector<CityId> top_k(const NeighborRanking& ranking, int k) {
    if (k < 0)
        throw Error("top_k: k must be >= 0");
    if (static_cast<std::size_t>(k) > ranking.ordered.size())
        throw Error("top_k: requested " + std::to_string(k) + " neighbors, only " +
                    std::to_string(ranking.ordered.size()) + " candidates");
    std::vector<CityId> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        out.push_back(ranking.ordered[static_cast<std::size_t>(i)].first);
    return out;
}

} // namespace wavecast
