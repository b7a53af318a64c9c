#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "wavecast/config.hpp"
#include "wavecast/error.hpp"
#include "wavecast/ingest.hpp"

namespace wavecast {

/// A city's series split by date and max-normalized. The divisor is the
/// training-segment maximum (never the test segment, which would leak).
/// Raw segments are kept so de-normalization is exact; multiplying the
/// normalized values back by `scale` can be off by one ulp.
struct SplitSeries {
    std::vector<double> train; // normalized
    std::vector<double> test;  // normalized
    double scale = 1.0;
    std::vector<double> raw_train;
    std::vector<double> raw_test;
};

inline SplitSeries split_and_normalize(const WeeklySeries& series, const DiseaseConfig& config) {
    SplitSeries out;
    out.raw_train = series.slice(config.train_range);
    out.raw_test = series.slice(config.test_range);
    double max_train = *std::max_element(out.raw_train.begin(), out.raw_train.end());
    out.scale = max_train > 0 ? max_train : 1.0;
    out.train.reserve(out.raw_train.size());
    out.test.reserve(out.raw_test.size());
    for (double v : out.raw_train)
        out.train.push_back(v / out.scale);
    for (double v : out.raw_test)
        out.test.push_back(v / out.scale);
    return out;
}

/// Dense row-major matrix; all feature handling is std::vector based, the
/// datasets here are far too small to justify a linear algebra dependency.
struct Matrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : n_rows(rows), n_cols(cols), data(rows * cols, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * n_cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * n_cols + c]; }
    const double* row(std::size_t r) const { return data.data() + r * n_cols; }
};

/// Identifies a feature column: which city's series it came from and the
/// lag, where lag 1 is the most recent value usable for the forecast.
struct ColumnLabel {
    CityId city;
    int lag = 0;

    friend bool operator==(const ColumnLabel&, const ColumnLabel&) = default;
};

/// Lagged feature matrix plus aligned targets. row_weeks[i] is the index of
/// row i's target within the series the dataset was built from.
struct SupervisedDataset {
    Matrix features;
    std::vector<double> targets;
    std::vector<ColumnLabel> column_labels;
    std::vector<long> row_weeks;

    std::size_t n_rows() const { return features.n_rows; }
    std::size_t n_cols() const { return features.n_cols; }
};

namespace detail {

// Writes one city's lag block for target index t: values
// y[t-h-L+1 .. t-h], oldest first.
inline void fill_lag_block(const std::vector<double>& values, long t, int lags, int horizon,
                           double* dest) {
    long oldest = t - horizon - lags + 1;
    for (int j = 0; j < lags; ++j)
        dest[j] = values[static_cast<std::size_t>(oldest + j)];
}

inline void append_lag_labels(std::vector<ColumnLabel>& labels, const CityId& city, int lags) {
    for (int j = 0; j < lags; ++j)
        labels.push_back({city, lags - j}); // oldest column carries the largest lag
}

} // namespace detail

/// Builds the single-series supervised dataset: one row per target index
/// t in [L+h-1, n-1], features ordered oldest to newest.
inline SupervisedDataset make_lag_dataset(const std::vector<double>& values, int lags, int horizon,
                                          const CityId& source = "self") {
    if (lags < 1 || horizon < 1)
        throw Error("make_lag_dataset: lags and horizon must be >= 1");
    long n = static_cast<long>(values.size());
    long first_target = lags + horizon - 1;
    if (n < lags + horizon)
        throw Error("insufficient history: need at least " + std::to_string(lags + horizon) +
                    " values, got " + std::to_string(n));

    SupervisedDataset ds;
    ds.features = Matrix(static_cast<std::size_t>(n - first_target), static_cast<std::size_t>(lags));
    detail::append_lag_labels(ds.column_labels, source, lags);
    for (long t = first_target; t < n; ++t) {
        std::size_t r = static_cast<std::size_t>(t - first_target);
        detail::fill_lag_block(values, t, lags, horizon, &ds.features.at(r, 0));
        ds.targets.push_back(values[static_cast<std::size_t>(t)]);
        ds.row_weeks.push_back(t);
    }
    return ds;
}

/// True iff some hold-out value sits above the training distribution by
/// more than z_threshold (one-sided; the anomaly of interest is a surge).
/// A zero-variance train flags any test value different from the mean.
inline bool flag_anomalous(const std::vector<double>& train, const std::vector<double>& test,
                           double z_threshold) {
    if (train.empty())
        throw Error("flag_anomalous: empty training segment");
    double mean = 0;
    for (double v : train)
        mean += v;
    mean /= static_cast<double>(train.size());
    double var = 0;
    for (double v : train)
        var += (v - mean) * (v - mean);
    var /= static_cast<double>(train.size());
    double sd = std::sqrt(var);
    for (double v : test) {
        if (sd == 0) {
            if (v != mean)
                return true;
        } else if ((v - mean) / sd > z_threshold) {
            return true;
        }
    }
    return false;
}

struct SeriesStats {
    double mean = 0;
    double std = 0;
    double max = 0;
    double skewness = 0;
};

/// Mean, population standard deviation, maximum and Fisher-Pearson moment
/// skewness g1 = m3 / m2^(3/2) (0 for constant input).
inline SeriesStats series_stats(const std::vector<double>& values) {
    if (values.empty())
        throw Error("series_stats: empty input");
    SeriesStats st;
    double n = static_cast<double>(values.size());
    for (double v : values)
        st.mean += v;
    st.mean /= n;
    st.max = *std::max_element(values.begin(), values.end());
    double m2 = 0, m3 = 0;
    for (double v : values) {
        double d = v - st.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    st.std = std::sqrt(m2);
    st.skewness = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
    return st;
}

} // namespace wavecast
