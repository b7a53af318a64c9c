#pragma once

#include <map>
#include <vector>

#include "wavecast/config.hpp"
#include "wavecast/error.hpp"
#include "wavecast/preprocess.hpp"

namespace wavecast {

/// Builds the target city's train and test supervised datasets, with the
/// target's L lags followed by each neighbor's L lags per row. Neighbor
/// features are lagged the same way as the target's own, so the model
/// stays strictly causal. Test rows are built over the concatenated
/// train+test history, letting early test rows reach back into training
/// weeks.
inline std::pair<SupervisedDataset, SupervisedDataset>
augment_dataset(const CityId& target_city, const std::map<CityId, SplitSeries>& splits,
                const std::vector<CityId>& neighbors, const DiseaseConfig& config) {
    auto split_of = [&](const CityId& id) -> const SplitSeries& {
        auto it = splits.find(id);
        if (it == splits.end())
            throw Error("augment_dataset: no split series for city '" + id + "'");
        return it->second;
    };

    const SplitSeries& target = split_of(target_city);
    const long train_len = static_cast<long>(target.train.size());
    const long test_len = static_cast<long>(target.test.size());
    const int lags = config.lags;
    const int horizon = config.horizon;
    if (train_len < lags + horizon)
        throw Error("insufficient history: training segment of '" + target_city + "' has " +
                    std::to_string(train_len) + " weeks, need at least " +
                    std::to_string(lags + horizon));

    std::vector<const SplitSeries*> sources{&target};
    for (const CityId& id : neighbors) {
        if (id == target_city)
            throw Error("augment_dataset: neighbor equals target '" + id + "'");
        const SplitSeries& s = split_of(id);
        if (static_cast<long>(s.train.size()) != train_len ||
            static_cast<long>(s.test.size()) != test_len)
            throw Error("augment_dataset: series of '" + id + "' misaligned with target '" +
                        target_city + "'");
        sources.push_back(&s);
    }

    std::vector<CityId> source_ids{target_city};
    source_ids.insert(source_ids.end(), neighbors.begin(), neighbors.end());

    // Concatenated normalized histories, one per source city.
    std::vector<std::vector<double>> full;
    full.reserve(sources.size());
    for (const SplitSeries* s : sources) {
        std::vector<double> h = s->train;
        h.insert(h.end(), s->test.begin(), s->test.end());
        full.push_back(std::move(h));
    }

    const std::size_t n_cols = static_cast<std::size_t>(lags) * sources.size();
    auto build = [&](long t_begin, long t_end) {
        SupervisedDataset ds;
        ds.features = Matrix(static_cast<std::size_t>(t_end - t_begin), n_cols);
        for (std::size_t s = 0; s < source_ids.size(); ++s)
            detail::append_lag_labels(ds.column_labels, source_ids[s], lags);
        for (long t = t_begin; t < t_end; ++t) {
            std::size_t r = static_cast<std::size_t>(t - t_begin);
            double* row = &ds.features.at(r, 0);
            for (std::size_t s = 0; s < full.size(); ++s)
                detail::fill_lag_block(full[s], t, lags, horizon, row + s * static_cast<std::size_t>(lags));
            ds.targets.push_back(full[0][static_cast<std::size_t>(t)]);
            ds.row_weeks.push_back(t);
        }
        return ds;
    };

    SupervisedDataset train_ds = build(lags + horizon - 1, train_len);
    SupervisedDataset test_ds = build(train_len, train_len + test_len);
    return {std::move(train_ds), std::move(test_ds)};
}

} // namespace wavecast
