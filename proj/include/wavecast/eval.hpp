#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "wavecast/config.hpp"
#include "wavecast/csv.hpp"
#include "wavecast/error.hpp"
#include "wavecast/learn.hpp"
#include "wavecast/preprocess.hpp"
#include "wavecast/similarity.hpp"

namespace wavecast {

/// Thrown when the seasonal-naive denominator vanishes (constant seasonal
/// pattern over the window). Carries the raw MAE for fallback reporting.
class MaseUndefinedError : public Error {
public:
    explicit MaseUndefinedError(double mae)
        : Error("undefined MASE (constant seasonal pattern); MAE = " + format_number(mae)),
          mae_value(mae) {}

    double mae_value;
};

/// Rolling m-week-back forecast: prediction at index t is values[t - m].
inline std::vector<double> seasonal_naive(const std::vector<double>& values, int m,
                                          const std::vector<long>& eval_indices) {
    if (m < 1)
        throw Error("seasonal_naive: m must be >= 1");
    std::vector<double> out;
    out.reserve(eval_indices.size());
    for (long t : eval_indices) {
        if (t < m || t >= static_cast<long>(values.size()))
            throw Error("seasonal_naive: index " + std::to_string(t) + " has no history at lag " +
                        std::to_string(m));
        out.push_back(values[static_cast<std::size_t>(t - m)]);
    }
    return out;
}

inline double mae(const std::vector<double>& predictions, const std::vector<double>& actuals) {
    if (predictions.size() != actuals.size())
        throw Error("mae: length mismatch");
    if (predictions.empty())
        throw Error("mae: empty input");
    double sum = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        sum += std::abs(predictions[i] - actuals[i]);
    return sum / static_cast<double>(predictions.size());
}

/// Which window feeds the seasonal-naive denominator. The evaluation
/// window is the default so that MASE < 1 means "beats the naive forecast
/// on exactly these points"; in_sample is the classical variant using the
/// history before the window.
enum class MaseDenominator { evaluation_window, in_sample };

/// Mean absolute scaled error over the last actuals.size() points of
/// history. The evaluation-window form is computed as a plain ratio of
/// sums (the 1/J factors cancel), which keeps the naive forecaster at
/// exactly 1.0.
inline double mase(const std::vector<double>& predictions, const std::vector<double>& actuals,
                   const std::vector<double>& history, int m,
                   MaseDenominator mode = MaseDenominator::evaluation_window) {
    if (m < 1)
        throw Error("mase: m must be >= 1");
    if (predictions.size() != actuals.size())
        throw Error("mase: length mismatch");
    if (predictions.empty())
        throw Error("mase: empty evaluation window");
    const std::size_t window = actuals.size();
    if (history.size() < window)
        throw Error("mase: history shorter than evaluation window");
    const std::size_t offset = history.size() - window;
    for (std::size_t j = 0; j < window; ++j)
        if (history[offset + j] != actuals[j])
            throw Error("mase: history must end with the evaluation window");
    if (offset < static_cast<std::size_t>(m))
        throw Error("mase: history does not reach m weeks before the window");

    double num_sum = 0;
    for (std::size_t j = 0; j < window; ++j)
        num_sum += std::abs(predictions[j] - actuals[j]);
    double mae_value = num_sum / static_cast<double>(window);

    if (mode == MaseDenominator::evaluation_window) {
        double den_sum = 0;
        for (std::size_t j = 0; j < window; ++j)
            den_sum += std::abs(history[offset + j] - history[offset + j - static_cast<std::size_t>(m)]);
        if (den_sum == 0)
            throw MaseUndefinedError(mae_value);
        return num_sum / den_sum;
    }

    const std::size_t t_end = offset; // history before the evaluation window
    if (t_end <= static_cast<std::size_t>(m))
        throw Error("mase: in-sample denominator needs history longer than m");
    double den_sum = 0;
    for (std::size_t t = static_cast<std::size_t>(m); t < t_end; ++t)
        den_sum += std::abs(history[t] - history[t - static_cast<std::size_t>(m)]);
    if (den_sum == 0)
        throw MaseUndefinedError(mae_value);
    double denom = den_sum / static_cast<double>(t_end - static_cast<std::size_t>(m));
    return mae_value / denom;
}

/// Per-city outcome of one (algorithm, criterion, k) run. MAE values are
/// de-normalized back to raw case units via the split scale; MASE is
/// scale-free. An absent MASE means the denominator vanished.
struct EvalReport {
    CityId city;
    std::string disease;
    Criterion criterion = Criterion::none;
    int k_neighbors = 0;
    HyperParams params;
    bool anomalous = false;
    double train_mae = 0;
    double test_mae = 0;
    std::optional<double> train_mase;
    std::optional<double> test_mase;
    double scale = 1;
};

struct ReportContext {
    CityId city;
    std::string disease;
    Criterion criterion = Criterion::none;
    int k_neighbors = 0;
    bool anomalous = false;
};

/// Scores a fitted ensemble in-sample and on the hold-out rows. Train
/// metrics use the training window; test metrics use the concatenated
/// train+test history so the seasonal lookback can cross the boundary.
inline EvalReport evaluate_city(const TreeEnsemble& ensemble, const SupervisedDataset& train_dataset,
                                const SupervisedDataset& test_dataset, const SplitSeries& split,
                                const DiseaseConfig& config, const ReportContext& ctx = {},
                                MaseDenominator mode = MaseDenominator::evaluation_window) {
    EvalReport report;
    report.city = ctx.city;
    report.disease = ctx.disease.empty() ? config.disease : ctx.disease;
    report.criterion = ctx.criterion;
    report.k_neighbors = ctx.k_neighbors;
    report.anomalous = ctx.anomalous;
    report.params = ensemble.params;
    report.scale = split.scale;

    const int m = config.effective_seasonal_m();

    auto train_preds = predict(ensemble, train_dataset);
    double train_mae_norm = mae(train_preds, train_dataset.targets);
    report.train_mae = train_mae_norm * split.scale;
    try {
        report.train_mase = mase(train_preds, train_dataset.targets, split.train, m, mode);
    } catch (const MaseUndefinedError&) {
        report.train_mase.reset();
    }

    std::vector<double> history = split.train;
    history.insert(history.end(), split.test.begin(), split.test.end());
    auto test_preds = predict(ensemble, test_dataset);
    double test_mae_norm = mae(test_preds, test_dataset.targets);
    report.test_mae = test_mae_norm * split.scale;
    try {
        report.test_mase = mase(test_preds, test_dataset.targets, history, m, mode);
    } catch (const MaseUndefinedError&) {
        report.test_mase.reset();
    }
    return report;
}

/// One row of the cross-city summary (Table III / Fig. 2 shape).
struct SummaryRow {
    std::string disease;
    Algorithm algorithm = Algorithm::random_forest;
    Criterion criterion = Criterion::none;
    int k_neighbors = 0;
    std::string stratum; // "z<4" or "all"
    double mean_test_mase = 0;
    double std_test_mase = 0;
    double mean_train_mase = 0;
    double std_train_mase = 0;
    std::size_t n_cities = 0;
};

namespace detail {

inline std::pair<double, double> mean_and_std(const std::vector<double>& xs) {
    if (xs.empty())
        return {std::nan(""), std::nan("")};
    double mean = 0;
    for (double x : xs)
        mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs)
        var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    return {mean, std::sqrt(var)};
}

} // namespace detail

/// Groups reports by (disease, algorithm, criterion, k) and, when
/// stratified, splits each group into the z<4 stratum (anomalous cities
/// excluded) and the "all" stratum. Mean/std are over the defined MASE
/// values; n_cities counts the stratum's reports. Deterministic order by
/// group key; strata that end up empty are omitted.
inline std::vector<SummaryRow> aggregate(const std::vector<EvalReport>& reports, bool stratify) {
    using Key = std::tuple<std::string, int, int, int>;
    std::map<Key, std::vector<const EvalReport*>> groups;
    for (const EvalReport& r : reports)
        groups[{r.disease, static_cast<int>(r.params.algorithm), static_cast<int>(r.criterion),
                r.k_neighbors}]
            .push_back(&r);

    std::vector<std::string> strata = stratify ? std::vector<std::string>{"z<4", "all"}
                                               : std::vector<std::string>{"all"};
    std::vector<SummaryRow> out;
    for (const auto& [key, members] : groups) {
        for (const std::string& stratum : strata) {
            std::vector<double> test_vals, train_vals;
            std::size_t n = 0;
            for (const EvalReport* r : members) {
                if (stratum == "z<4" && r->anomalous)
                    continue;
                ++n;
                if (r->test_mase)
                    test_vals.push_back(*r->test_mase);
                if (r->train_mase)
                    train_vals.push_back(*r->train_mase);
            }
            if (n == 0)
                continue;
            SummaryRow row;
            row.disease = std::get<0>(key);
            row.algorithm = static_cast<Algorithm>(std::get<1>(key));
            row.criterion = static_cast<Criterion>(std::get<2>(key));
            row.k_neighbors = std::get<3>(key);
            row.stratum = stratum;
            std::tie(row.mean_test_mase, row.std_test_mase) = detail::mean_and_std(test_vals);
            std::tie(row.mean_train_mase, row.std_train_mase) = detail::mean_and_std(train_vals);
            row.n_cities = n;
            out.push_back(std::move(row));
        }
    }
    return out;
}

// --- report files ---------------------------------------------------------

inline void write_reports_csv(std::ostream& os, const std::vector<EvalReport>& reports) {
    os << "city_id,disease,algorithm,criterion,k,anomalous,train_mae,train_mase,test_mae,test_mase,"
          "scale,params\n";
    for (const EvalReport& r : reports) {
        os << csv_escape(r.city) << ',' << csv_escape(r.disease) << ',' << to_string(r.params.algorithm)
           << ',' << to_string(r.criterion) << ',' << r.k_neighbors << ','
           << (r.anomalous ? "true" : "false") << ',' << format_number(r.train_mae) << ','
           << (r.train_mase ? format_number(*r.train_mase) : "nan") << ','
           << format_number(r.test_mae) << ','
           << (r.test_mase ? format_number(*r.test_mase) : "nan") << ',' << format_number(r.scale)
           << ',' << csv_escape(r.params.describe()) << '\n';
    }
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "disease,algorithm,criterion,k,stratum,mean_test_mase,std_test_mase,mean_train_mase,"
          "std_train_mase,n_cities\n";
    for (const SummaryRow& r : rows) {
        os << csv_escape(r.disease) << ',' << to_string(r.algorithm) << ',' << to_string(r.criterion)
           << ',' << r.k_neighbors << ',' << csv_escape(r.stratum) << ','
           << format_number(r.mean_test_mase) << ',' << format_number(r.std_test_mase) << ','
           << format_number(r.mean_train_mase) << ',' << format_number(r.std_train_mase) << ','
           << r.n_cities << '\n';
    }
}

/// Fig. 2-shaped long format: test-MASE mean/std per (criterion, k,
/// stratum) for whichever algorithm the caller selected.
inline void write_plotdata_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "disease,criterion,k,stratum,mean_mase,std_mase\n";
    for (const SummaryRow& r : rows) {
        os << csv_escape(r.disease) << ',' << to_string(r.criterion) << ',' << r.k_neighbors << ','
           << csv_escape(r.stratum) << ',' << format_number(r.mean_test_mase) << ','
           << format_number(r.std_test_mase) << '\n';
    }
}

struct ForecastPoint {
    CityId city;
    EpiWeek week;
    double actual = 0;
    double predicted = 0;
};

inline void write_forecasts_csv(std::ostream& os, const std::vector<ForecastPoint>& points) {
    os << "city_id,week,actual,predicted\n";
    for (const ForecastPoint& p : points)
        os << csv_escape(p.city) << ',' << to_string(p.week) << ',' << format_number(p.actual) << ','
           << format_number(p.predicted) << '\n';
}

} // namespace wavecast
