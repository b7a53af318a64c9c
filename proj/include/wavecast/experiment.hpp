#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "wavecast/config.hpp"
#include "wavecast/error.hpp"
#include "wavecast/eval.hpp"
#include "wavecast/features.hpp"
#include "wavecast/ingest.hpp"
#include "wavecast/learn.hpp"
#include "wavecast/preprocess.hpp"
#include "wavecast/rng.hpp"
#include "wavecast/similarity.hpp"

namespace wavecast {

/// Hyperparameter grid, one combination per (n_trees, max_depth[, lr])
/// tuple in listing order; grid order is the tie-break for equal CV MAE.
struct GridSpec {
    std::vector<int> n_trees{25, 50, 100, 150, 200};
    std::vector<int> max_depth{2, 4, -1}; // -1 = unlimited
    std::vector<double> learning_rate{0.001, 0.005, 0.01};
    SplitCriterion split_criterion = SplitCriterion::mae;
    bool bootstrap = true;
    FeatureSubset feature_subset;

    std::vector<HyperParams> expand(Algorithm algorithm) const {
        std::vector<HyperParams> grid;
        for (int trees : n_trees) {
            for (int depth : max_depth) {
                HyperParams p;
                p.algorithm = algorithm;
                p.n_trees = trees;
                p.max_depth = depth;
                p.split_criterion = split_criterion;
                p.bootstrap = bootstrap;
                p.feature_subset = feature_subset;
                if (algorithm == Algorithm::gradient_boosting) {
                    for (double lr : learning_rate) {
                        p.learning_rate = lr;
                        grid.push_back(p);
                    }
                } else {
                    grid.push_back(p);
                }
            }
        }
        return grid;
    }
};

/// Full batch-run settings: inputs, disease window, which augmentations to
/// run, grids, seed and output options.
struct ExperimentConfig {
    std::string cases_path;
    std::string cities_path;
    std::string gdp_path;
    DiseaseConfig disease;
    std::vector<Criterion> criteria{Criterion::geographic, Criterion::gdp_dtw, Criterion::cases_dtw};
    std::vector<int> k_values{1, 2, 3};
    std::vector<Algorithm> algorithms{Algorithm::random_forest, Algorithm::gradient_boosting};
    GridSpec grid;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool include_anomalous = false; // adds the "all" stratum to summary/plot data
    bool emit_forecasts = true;
    std::string out_dir = ".";
    RankOptions rank_options;
    MaseDenominator mase_mode = MaseDenominator::evaluation_window;

    std::vector<Criterion> augmentation_criteria() const {
        std::vector<Criterion> out;
        for (Criterion c : criteria)
            if (c != Criterion::none && std::find(out.begin(), out.end(), c) == out.end())
                out.push_back(c);
        return out;
    }

    std::vector<int> sorted_k_values() const {
        std::vector<int> ks = k_values;
        std::sort(ks.begin(), ks.end());
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
        return ks;
    }
};

struct ExperimentResult {
    int exit_code = 0; // 0 ok, 2 partial per-city failures
    std::size_t n_cities = 0;
    std::vector<EvalReport> reports;
    std::vector<SummaryRow> summary;
    std::vector<std::string> failures;
};

namespace detail {

struct WorkItem {
    CityId city;
    Algorithm algorithm;
    Criterion criterion;
    int k;
};

struct WorkOutcome {
    std::optional<EvalReport> report;
    std::vector<double> test_predictions; // normalized
    std::string error;
};

inline std::uint64_t item_seed(std::uint64_t master, const WorkItem& item) {
    std::uint64_t s = mix_seed(master, hash_string(item.city));
    s = mix_seed(s, hash_string(to_string(item.criterion)));
    s = mix_seed(s, static_cast<std::uint64_t>(item.k));
    return mix_seed(s, hash_string(to_string(item.algorithm)));
}

inline void log_line(std::ostream* log, const std::string& line) {
    if (log)
        *log << line << '\n';
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os)
        throw Error("cannot write '" + path.string() + "'");
    return os;
}

} // namespace detail

/// Read-only sanity pass: schema, ranges, grid and cohort feasibility.
/// Returns human-readable diagnostics instead of throwing.
inline std::vector<std::string> validate(const ExperimentConfig& config) {
    std::vector<std::string> diags = config.disease.problems();

    if (config.criteria.empty())
        diags.push_back("no criterion configured");
    for (int k : config.k_values)
        if (k < 1 || k > 3)
            diags.push_back("k=" + std::to_string(k) + " outside {1,2,3}");
    if (config.algorithms.empty())
        diags.push_back("no algorithm configured");
    if (config.jobs < 1)
        diags.push_back("jobs must be >= 1");
    if (config.grid.n_trees.empty() || config.grid.max_depth.empty())
        diags.push_back("hyperparameter grid is empty");
    for (int t : config.grid.n_trees)
        if (t < 1)
            diags.push_back("grid n_trees " + std::to_string(t) + " must be >= 1");
    for (int d : config.grid.max_depth)
        if (d != -1 && d < 1)
            diags.push_back("grid max_depth " + std::to_string(d) + " must be >= 1 or -1 (unlimited)");
    bool wants_gb = std::find(config.algorithms.begin(), config.algorithms.end(),
                              Algorithm::gradient_boosting) != config.algorithms.end();
    if (wants_gb && config.grid.learning_rate.empty())
        diags.push_back("gradient boosting configured but learning-rate grid is empty");
    for (double lr : config.grid.learning_rate)
        if (!(lr > 0))
            diags.push_back("grid learning_rate must be > 0");

    if (!diags.empty())
        return diags; // structural problems first; data checks need valid ranges

    try {
        std::vector<std::string> warnings;
        auto series = load_case_series(config.cases_path, config.disease.disease);
        auto meta = load_city_meta(config.cities_path, config.gdp_path, &warnings);
        Cohort cohort = build_cohort(series, meta, config.disease, &warnings);

        auto ks = config.sorted_k_values();
        if (!ks.empty() && !config.augmentation_criteria().empty() &&
            static_cast<std::size_t>(ks.back()) + 1 > cohort.size())
            diags.push_back("insufficient neighbor candidates: k=" + std::to_string(ks.back()) +
                            " needs " + std::to_string(ks.back() + 1) + " cities, cohort has " +
                            std::to_string(cohort.size()));
        long train_len = config.disease.train_range.length();
        long min_len = config.disease.lags + config.disease.horizon;
        if (train_len < min_len)
            diags.push_back("training range too short for lag structure (" +
                            std::to_string(train_len) + " < " + std::to_string(min_len) + " weeks)");
        else if (train_len - min_len + 1 < 5)
            diags.push_back("too few training rows for 4-split cross-validation");
    } catch (const Error& e) {
        diags.push_back(e.what());
    }
    return diags;
}

/// Runs the full protocol: per city the baseline grid search and
/// evaluation per algorithm, then the same — with independent grid
/// searches — for every (criterion, k) augmentation; writes reports.csv,
/// summary.csv, plotdata.csv, neighbors.csv and (optionally)
/// forecasts.csv under config.out_dir. Output bytes depend only on the
/// config and seed, never on the worker count.
inline ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr) {
    namespace fs = std::filesystem;

    std::vector<std::string> warnings;
    auto series = load_case_series(config.cases_path, config.disease.disease);
    auto meta = load_city_meta(config.cities_path, config.gdp_path, &warnings);
    Cohort cohort = build_cohort(series, meta, config.disease, &warnings);
    for (const std::string& w : warnings)
        detail::log_line(log, "warning: " + w);

    const std::vector<CityId> cities = cohort.city_ids();
    detail::log_line(log, "cohort: " + std::to_string(cities.size()) + " cities for " +
                              config.disease.disease);

    std::map<CityId, SplitSeries> splits;
    std::map<CityId, bool> anomalous;
    for (const CityId& id : cities) {
        SplitSeries split = split_and_normalize(cohort.series.at(id), config.disease);
        anomalous[id] = flag_anomalous(split.train, split.test, config.disease.z_threshold);
        splits.emplace(id, std::move(split));
    }

    if (log) {
        std::vector<double> pooled;
        std::vector<double> skews;
        for (const CityId& id : cities) {
            const auto& values = cohort.series.at(id).values;
            pooled.insert(pooled.end(), values.begin(), values.end());
            skews.push_back(series_stats(values).skewness);
        }
        SeriesStats pooled_stats = series_stats(pooled);
        auto [skew_mean, skew_std] = detail::mean_and_std(skews);
        detail::log_line(log, "weekly cases: mean " + format_number(pooled_stats.mean) + " +- " +
                                  format_number(pooled_stats.std) + ", max " +
                                  format_number(pooled_stats.max) + ", per-city skewness " +
                                  format_number(skew_mean) + " +- " + format_number(skew_std));
    }

    // Neighbor rankings per augmentation criterion, shared read-only.
    const auto aug_criteria = config.augmentation_criteria();
    const auto ks = config.sorted_k_values();
    const int max_k = ks.empty() ? 0 : ks.back();
    std::map<Criterion, std::map<CityId, NeighborRanking>> rankings;
    for (Criterion crit : aug_criteria) {
        auto& per_city = rankings[crit];
        for (const CityId& id : cities)
            per_city.emplace(id, rank_neighbors(id, cohort, crit, splits, config.disease,
                                                config.rank_options));
    }

    // Canonical work order fixes the output row order up front.
    std::vector<detail::WorkItem> items;
    for (const CityId& id : cities) {
        for (Algorithm alg : config.algorithms) {
            items.push_back({id, alg, Criterion::none, 0});
            for (Criterion crit : aug_criteria)
                for (int k : ks)
                    items.push_back({id, alg, crit, k});
        }
    }

    std::vector<detail::WorkOutcome> outcomes(items.size());
    auto run_item = [&](const detail::WorkItem& item) {
        detail::WorkOutcome outcome;
        try {
            std::vector<CityId> neighbors;
            if (item.criterion != Criterion::none)
                neighbors = top_k(rankings.at(item.criterion).at(item.city), item.k);
            auto [train_ds, test_ds] = augment_dataset(item.city, splits, neighbors, config.disease);

            std::uint64_t seed = detail::item_seed(config.seed, item);
            auto grid = config.grid.expand(item.algorithm);
            GridSearchResult gs = grid_search(train_ds, grid, mix_seed(seed, 1));
            TreeEnsemble model = fit_ensemble(train_ds, gs.best, mix_seed(seed, 2));

            ReportContext ctx{item.city, config.disease.disease, item.criterion, item.k,
                              anomalous.at(item.city)};
            outcome.report = evaluate_city(model, train_ds, test_ds, splits.at(item.city),
                                           config.disease, ctx, config.mase_mode);
            outcome.test_predictions = predict(model, test_ds);
        } catch (const std::exception& e) {
            outcome.error = item.city + " (" + to_string(item.algorithm) + ", " +
                            to_string(item.criterion) + ", k=" + std::to_string(item.k) +
                            "): " + e.what();
        }
        return outcome;
    };

    const std::size_t n_workers = std::max<std::size_t>(
        1, std::min<std::size_t>(static_cast<std::size_t>(std::max(config.jobs, 1)), items.size()));
    if (n_workers == 1) {
        for (std::size_t i = 0; i < items.size(); ++i)
            outcomes[i] = run_item(items[i]);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i; (i = next.fetch_add(1)) < items.size();)
                outcomes[i] = run_item(items[i]);
        };
        std::vector<std::thread> pool;
        for (std::size_t w = 1; w < n_workers; ++w)
            pool.emplace_back(worker);
        worker();
        for (std::thread& t : pool)
            t.join();
    }

    ExperimentResult result;
    result.n_cities = cities.size();
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (outcomes[i].report) {
            result.reports.push_back(*outcomes[i].report);
        } else {
            result.failures.push_back(outcomes[i].error);
            detail::log_line(log, "skipped: " + outcomes[i].error);
        }
    }
    if (!result.failures.empty())
        result.exit_code = 2;
    if (result.reports.empty())
        throw Error("every city failed; no reports to write");

    std::vector<SummaryRow> all_strata = aggregate(result.reports, true);
    for (const SummaryRow& row : all_strata)
        if (config.include_anomalous || row.stratum == "z<4")
            result.summary.push_back(row);

    // Fig. 2 / Fig. 3 need one algorithm per disease: the baseline winner.
    auto summary_mean = [&](Algorithm alg, Criterion crit, int k) {
        double z4 = std::nan(""), all = std::nan("");
        for (const SummaryRow& row : all_strata) {
            if (row.algorithm != alg || row.criterion != crit || row.k_neighbors != k)
                continue;
            (row.stratum == "z<4" ? z4 : all) = row.mean_test_mase;
        }
        return z4 == z4 ? z4 : all; // prefer the z<4 stratum when it exists
    };
    Algorithm best_algorithm = config.algorithms.front();
    double best_baseline = std::numeric_limits<double>::infinity();
    for (Algorithm alg : config.algorithms) {
        double mase_value = summary_mean(alg, Criterion::none, 0);
        if (mase_value == mase_value && mase_value < best_baseline) {
            best_baseline = mase_value;
            best_algorithm = alg;
        }
    }

    Criterion best_criterion = Criterion::none;
    int best_k = 0;
    double best_combo = std::numeric_limits<double>::infinity();
    {
        std::vector<std::pair<Criterion, int>> combos{{Criterion::none, 0}};
        for (Criterion crit : aug_criteria)
            for (int k : ks)
                combos.emplace_back(crit, k);
        for (auto [crit, k] : combos) {
            double mase_value = summary_mean(best_algorithm, crit, k);
            if (mase_value == mase_value && mase_value < best_combo) {
                best_combo = mase_value;
                best_criterion = crit;
                best_k = k;
            }
        }
    }

    fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);
    {
        auto os = detail::open_output(out_dir / "reports.csv");
        write_reports_csv(os, result.reports);
    }
    {
        auto os = detail::open_output(out_dir / "summary.csv");
        write_summary_csv(os, result.summary);
    }
    {
        std::vector<SummaryRow> plot_rows;
        for (const SummaryRow& row : result.summary)
            if (row.algorithm == best_algorithm)
                plot_rows.push_back(row);
        auto os = detail::open_output(out_dir / "plotdata.csv");
        write_plotdata_csv(os, plot_rows);
    }
    {
        auto os = detail::open_output(out_dir / "neighbors.csv");
        os << "target_id,rank,neighbor_id,distance,criterion\n";
        for (Criterion crit : aug_criteria) {
            for (const CityId& id : cities) {
                const NeighborRanking& ranking = rankings.at(crit).at(id);
                int depth = std::min<int>(max_k, static_cast<int>(ranking.ordered.size()));
                for (int r = 0; r < depth; ++r)
                    os << csv_escape(id) << ',' << (r + 1) << ','
                       << csv_escape(ranking.ordered[static_cast<std::size_t>(r)].first) << ','
                       << format_number(ranking.ordered[static_cast<std::size_t>(r)].second) << ','
                       << to_string(crit) << '\n';
            }
        }
    }
    if (config.emit_forecasts) {
        std::vector<ForecastPoint> points;
        for (std::size_t i = 0; i < items.size(); ++i) {
            const detail::WorkItem& item = items[i];
            if (item.algorithm != best_algorithm || item.criterion != best_criterion ||
                item.k != best_k || !outcomes[i].report)
                continue;
            const SplitSeries& split = splits.at(item.city);
            for (std::size_t j = 0; j < outcomes[i].test_predictions.size(); ++j) {
                ForecastPoint p;
                p.city = item.city;
                p.week = add_weeks(config.disease.test_range.start, static_cast<long>(j));
                p.actual = split.raw_test[j];
                p.predicted = outcomes[i].test_predictions[j] * split.scale;
                points.push_back(std::move(p));
            }
        }
        auto os = detail::open_output(out_dir / "forecasts.csv");
        write_forecasts_csv(os, points);
    }

    detail::log_line(log, "wrote " + std::to_string(result.reports.size()) + " reports to " +
                              out_dir.string());
    return result;
}

/// Loads the cohort and writes neighbors.csv for one criterion (the
/// `wavecast neighbors` subcommand).
inline void export_neighbors(const ExperimentConfig& config, Criterion criterion,
                             std::ostream* log = nullptr) {
    if (criterion == Criterion::none)
        throw Error("neighbors export needs a criterion other than 'none'");
    std::vector<std::string> warnings;
    auto series = load_case_series(config.cases_path, config.disease.disease);
    auto meta = load_city_meta(config.cities_path, config.gdp_path, &warnings);
    Cohort cohort = build_cohort(series, meta, config.disease, &warnings);
    for (const std::string& w : warnings)
        detail::log_line(log, "warning: " + w);

    std::map<CityId, SplitSeries> splits;
    if (criterion == Criterion::cases_dtw)
        for (const auto& [id, s] : cohort.series)
            splits.emplace(id, split_and_normalize(s, config.disease));

    const auto ks = config.sorted_k_values();
    const int max_k = ks.empty() ? 3 : ks.back();

    std::filesystem::path out_dir(config.out_dir);
    std::filesystem::create_directories(out_dir);
    auto os = detail::open_output(out_dir / "neighbors.csv");
    os << "target_id,rank,neighbor_id,distance,criterion\n";
    for (const CityId& id : cohort.city_ids()) {
        NeighborRanking ranking =
            rank_neighbors(id, cohort, criterion, splits, config.disease, config.rank_options);
        int depth = std::min<int>(max_k, static_cast<int>(ranking.ordered.size()));
        for (int r = 0; r < depth; ++r)
            os << csv_escape(id) << ',' << (r + 1) << ','
               << csv_escape(ranking.ordered[static_cast<std::size_t>(r)].first) << ','
               << format_number(ranking.ordered[static_cast<std::size_t>(r)].second) << ','
               << to_string(criterion) << '\n';
    }
    detail::log_line(log, "wrote neighbors.csv for " + std::to_string(cohort.size()) + " cities");
}

} // namespace wavecast
