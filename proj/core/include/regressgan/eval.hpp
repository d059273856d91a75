#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regressgan/datasets.hpp"
#include "regressgan/gp.hpp"
#include "regressgan/models.hpp"

namespace regressgan {

// mean |y_i - yhat_i|
double mae(std::span<const double> y, std::span<const double> yhat);

struct RelativeMae {
    double value = 0.0;
    std::size_t excluded = 0;  // rows with y_i == 0
};

// mean over rows with y_i != 0 of |(y_i - yhat_i) / y_i|. All-zero targets
// leave the metric undefined -> NumericError.
RelativeMae relative_mae(std::span<const double> y, std::span<const double> yhat);

struct MetricsReport {
    std::string dataset;
    std::string model;
    std::string split;
    std::size_t n = 0;
    double mae = 0.0;
    std::optional<double> relative_mae;
    std::size_t excluded_zero_rows = 0;
    std::uint64_t seed = 0;
    std::string config_hash;

    static std::string csv_header();
    std::string csv_row() const;
};

struct ReportMeta {
    std::string dataset;
    std::string model;
    std::uint64_t seed = 0;
    std::string config_hash;
};

using PredictFn = std::function<std::vector<double>(const Matrix&)>;

// Runs the predictor over the chosen split of ds and fills a report. The
// relative metric is guarded: when every target is zero it stays empty.
MetricsReport evaluate_predictor(const PredictFn& predict, const TabularDataset& ds, SplitName split,
                                 const ReportMeta& meta);

MetricsReport evaluate_model(const GeneratorNet& gen, const TabularDataset& ds, SplitName split,
                             std::size_t k_samples, RngStream& rng, const ReportMeta& meta);
MetricsReport evaluate_model(const FnnRegressor& fnn, const TabularDataset& ds, SplitName split,
                             const ReportMeta& meta);
MetricsReport evaluate_model(const GpModel& gp, const TabularDataset& ds, SplitName split,
                             const ReportMeta& meta);

}  // namespace regressgan
