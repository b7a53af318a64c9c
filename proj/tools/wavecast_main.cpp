// wavecast: batch experiment runner for the related-city forecasting
// protocol. Subcommands: run, validate, neighbors. Every config key can
// also be given as a command-line flag; flags win over the config file.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "wavecast/wavecast.hpp"

namespace {

struct CliOptions {
    std::string cases, cities, gdp;
    std::string out = ".";
    std::string disease;
    std::string train_start, train_end, test_start, test_end;
    int lags = 5;
    int horizon = 1;
    int seasonal_m = 0;
    double z_threshold = 4.0;
    int gdp_year_start = 2014;
    int gdp_year_end = 2020;
    std::vector<std::string> criteria{"geographic", "gdp_dtw", "cases_dtw"};
    std::vector<int> neighbors{1, 2, 3};
    std::vector<std::string> algorithms{"random_forest", "gradient_boosting"};
    std::vector<int> grid_n_trees{25, 50, 100, 150, 200};
    std::vector<int> grid_max_depth{2, 4, -1};
    std::vector<double> grid_learning_rate{0.001, 0.005, 0.01};
    std::string split_criterion = "mae";
    std::string feature_subset = "sqrt";
    bool no_bootstrap = false;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool include_anomalous = false;
    bool no_forecasts = false;
    bool haversine = false;
    bool gdp_normalize = false;
    std::string mase_denominator = "evaluation_window";
};

void add_experiment_options(CLI::App* cmd, CliOptions& o) {
    cmd->set_config("--config", "", "TOML config file; flags override its keys");
    cmd->add_option("--cases", o.cases, "cases CSV (city_id,epi_week,cases)");
    cmd->add_option("--cities", o.cities, "cities CSV (city_id,name,latitude,longitude)");
    cmd->add_option("--gdp", o.gdp, "gdp CSV (city_id,year,gdp_per_capita)");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--disease", o.disease, "disease label");
    cmd->add_option("--train-start", o.train_start, "first training week (YYYY-Www)");
    cmd->add_option("--train-end", o.train_end, "last training week");
    cmd->add_option("--test-start", o.test_start, "first hold-out week");
    cmd->add_option("--test-end", o.test_end, "last hold-out week");
    cmd->add_option("--lags", o.lags, "lag count per source series");
    cmd->add_option("--horizon", o.horizon, "forecast horizon in weeks");
    cmd->add_option("--seasonal-m", o.seasonal_m, "seasonal naive lag m (0 = horizon)");
    cmd->add_option("--z-threshold", o.z_threshold, "anomaly z-score threshold");
    cmd->add_option("--gdp-year-start", o.gdp_year_start, "first GDP year a city must cover");
    cmd->add_option("--gdp-year-end", o.gdp_year_end, "last GDP year a city must cover");
    cmd->add_option("--criterion", o.criteria, "related-city criteria to run (geo|gdp|cases|none)");
    cmd->add_option("--neighbors", o.neighbors, "neighbor counts k to run (subset of 1,2,3)");
    cmd->add_option("--algorithm", o.algorithms, "regressors to run (rf|gb)");
    cmd->add_option("--grid-n-trees", o.grid_n_trees, "tree counts in the grid");
    cmd->add_option("--grid-max-depth", o.grid_max_depth, "depth limits in the grid (-1 = unlimited)");
    cmd->add_option("--grid-learning-rate", o.grid_learning_rate, "learning rates (gradient boosting)");
    cmd->add_option("--split-criterion", o.split_criterion, "tree split criterion (mae|mse)");
    cmd->add_option("--feature-subset", o.feature_subset,
                    "features per split: sqrt, all, a fraction (0.5) or a count (8)");
    cmd->add_flag("--no-bootstrap", o.no_bootstrap, "fit forest trees on the full dataset");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--jobs", o.jobs, "worker threads (output is identical for any value)");
    cmd->add_flag("--include-anomalous", o.include_anomalous,
                  "add the 'all' stratum (anomalous cities included) to summary and plot data");
    cmd->add_flag("--no-forecasts", o.no_forecasts, "skip forecasts.csv");
    cmd->add_flag("--haversine", o.haversine, "geographic distance in km instead of degrees");
    cmd->add_flag("--gdp-normalize", o.gdp_normalize, "max-normalize GDP series before DTW");
    cmd->add_option("--mase-denominator", o.mase_denominator,
                    "MASE denominator window (evaluation_window|in_sample)");
}

wavecast::FeatureSubset parse_feature_subset(const std::string& text) {
    wavecast::FeatureSubset fs;
    if (text == "sqrt") {
        fs.mode = wavecast::FeatureSubset::Mode::sqrt_features;
    } else if (text == "all") {
        fs.mode = wavecast::FeatureSubset::Mode::all;
    } else if (text.find('.') != std::string::npos) {
        fs.mode = wavecast::FeatureSubset::Mode::fraction;
        fs.fraction = wavecast::parse_real(text, "feature subset fraction");
    } else {
        fs.mode = wavecast::FeatureSubset::Mode::count;
        fs.count = static_cast<int>(wavecast::parse_integer(text, "feature subset count"));
    }
    return fs;
}

wavecast::ExperimentConfig to_config(const CliOptions& o) {
    using namespace wavecast;
    ExperimentConfig config;
    config.cases_path = o.cases;
    config.cities_path = o.cities;
    config.gdp_path = o.gdp;
    config.out_dir = o.out;
    config.disease.disease = o.disease;
    auto need_week = [](const std::string& text, const char* what) {
        if (text.empty())
            throw Error(std::string(what) + " is not set");
        return parse_epi_week(text);
    };
    config.disease.train_range = {need_week(o.train_start, "train-start"),
                                  need_week(o.train_end, "train-end")};
    config.disease.test_range = {need_week(o.test_start, "test-start"),
                                 need_week(o.test_end, "test-end")};
    config.disease.lags = o.lags;
    config.disease.horizon = o.horizon;
    config.disease.seasonal_m = o.seasonal_m;
    config.disease.z_threshold = o.z_threshold;
    config.disease.gdp_year_start = o.gdp_year_start;
    config.disease.gdp_year_end = o.gdp_year_end;

    config.criteria.clear();
    for (const std::string& c : o.criteria)
        config.criteria.push_back(parse_criterion(c));
    config.k_values = o.neighbors;
    config.algorithms.clear();
    for (const std::string& a : o.algorithms)
        config.algorithms.push_back(parse_algorithm(a));

    config.grid.n_trees = o.grid_n_trees;
    config.grid.max_depth = o.grid_max_depth;
    config.grid.learning_rate = o.grid_learning_rate;
    if (o.split_criterion == "mae")
        config.grid.split_criterion = SplitCriterion::mae;
    else if (o.split_criterion == "mse")
        config.grid.split_criterion = SplitCriterion::mse;
    else
        throw Error("unknown split criterion '" + o.split_criterion + "' (expected mae|mse)");
    config.grid.bootstrap = !o.no_bootstrap;
    config.grid.feature_subset = parse_feature_subset(o.feature_subset);

    config.seed = o.seed;
    config.jobs = o.jobs;
    config.include_anomalous = o.include_anomalous;
    config.emit_forecasts = !o.no_forecasts;
    config.rank_options.haversine = o.haversine;
    config.rank_options.gdp_normalize = o.gdp_normalize;
    if (o.mase_denominator == "evaluation_window" || o.mase_denominator == "eval")
        config.mase_mode = MaseDenominator::evaluation_window;
    else if (o.mase_denominator == "in_sample" || o.mase_denominator == "insample")
        config.mase_mode = MaseDenominator::in_sample;
    else
        throw Error("unknown mase denominator '" + o.mase_denominator + "'");
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavecast: next-week infectious-disease forecasts using related-city features"};
    app.require_subcommand(1);

    CliOptions options;
    CLI::App* cmd_run = app.add_subcommand("run", "run the experiment and write all report files");
    add_experiment_options(cmd_run, options);
    CLI::App* cmd_validate = app.add_subcommand("validate", "check config and data, print diagnostics");
    add_experiment_options(cmd_validate, options);
    CLI::App* cmd_neighbors =
        app.add_subcommand("neighbors", "rank related cities for one criterion, emit neighbors.csv");
    add_experiment_options(cmd_neighbors, options);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_validate->parsed()) {
            wavecast::ExperimentConfig config;
            try {
                config = to_config(options);
            } catch (const wavecast::Error& e) {
                std::cout << "invalid: " << e.what() << '\n';
                return 1;
            }
            auto diagnostics = wavecast::validate(config);
            for (const std::string& d : diagnostics)
                std::cout << "invalid: " << d << '\n';
            if (diagnostics.empty()) {
                std::cout << "config ok\n";
                return 0;
            }
            return 1;
        }

        wavecast::ExperimentConfig config = to_config(options);
        if (cmd_neighbors->parsed()) {
            auto aug = config.augmentation_criteria();
            if (aug.size() != 1)
                throw wavecast::Error("neighbors: specify exactly one --criterion (geo|gdp|cases)");
            wavecast::export_neighbors(config, aug.front(), &std::cerr);
            return 0;
        }
        auto result = wavecast::run_experiment(config, &std::cerr);
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
