#include "regressgan/eval.hpp"

#include <cmath>
#include <cstdio>

#include "regressgan/errors.hpp"

namespace regressgan {

double mae(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size() || y.empty()) {
        throw ShapeError("mae: lengths " + std::to_string(y.size()) + " vs " +
                         std::to_string(yhat.size()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::fabs(y[i] - yhat[i]);
    return s / static_cast<double>(y.size());
}

RelativeMae relative_mae(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size() || y.empty()) {
        throw ShapeError("relative_mae: lengths " + std::to_string(y.size()) + " vs " +
                         std::to_string(yhat.size()));
    }
    RelativeMae out;
    double s = 0.0;
    std::size_t kept = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) {
            ++out.excluded;
            continue;
        }
        s += std::fabs((y[i] - yhat[i]) / y[i]);
        ++kept;
    }
    if (kept == 0) throw NumericError("relative_mae: undefined, every target is zero");
    out.value = s / static_cast<double>(kept);
    return out;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

std::string MetricsReport::csv_header() {
    return "dataset,model,split,n,mae,relative_mae,excluded_zero_rows,seed,config_hash";
}

std::string MetricsReport::csv_row() const {
    std::string row = dataset + "," + model + "," + split + "," + std::to_string(n) + "," +
                      format_double(mae) + ",";
    if (relative_mae) row += format_double(*relative_mae);
    row += "," + std::to_string(excluded_zero_rows) + "," + std::to_string(seed) + "," +
           config_hash;
    return row;
}

MetricsReport evaluate_predictor(const PredictFn& predict, const TabularDataset& ds, SplitName split,
                                 const ReportMeta& meta) {
    const auto idx = ds.split_indices(split);
    if (idx.empty()) throw ContractError("evaluate_predictor: empty split");
    const Matrix x = ds.split_features(split);
    const std::vector<double> y = ds.split_targets(split);
    const std::vector<double> yhat = predict(x);
    if (yhat.size() != y.size()) {
        throw ShapeError("evaluate_predictor: predictor returned " + std::to_string(yhat.size()) +
                         " values for " + std::to_string(y.size()) + " rows");
    }

    MetricsReport report;
    report.dataset = meta.dataset.empty() ? ds.meta.name : meta.dataset;
    report.model = meta.model;
    report.split = split_name_string(split);
    report.n = y.size();
    report.seed = meta.seed;
    report.config_hash = meta.config_hash;
    report.mae = mae(y, yhat);

    bool any_nonzero = false;
    for (double v : y) {
        if (v != 0.0) {
            any_nonzero = true;
            break;
        }
    }
    if (any_nonzero) {
        const RelativeMae rel = relative_mae(y, yhat);
        report.relative_mae = rel.value;
        report.excluded_zero_rows = rel.excluded;
    } else {
        report.excluded_zero_rows = y.size();
    }
    return report;
}

MetricsReport evaluate_model(const GeneratorNet& gen, const TabularDataset& ds, SplitName split,
                             std::size_t k_samples, RngStream& rng, const ReportMeta& meta) {
    return evaluate_predictor(
        [&](const Matrix& x) { return predict_point(gen, x, k_samples, rng); }, ds, split, meta);
}

MetricsReport evaluate_model(const FnnRegressor& fnn, const TabularDataset& ds, SplitName split,
                             const ReportMeta& meta) {
    return evaluate_predictor([&](const Matrix& x) { return fnn.predict_values(x); }, ds, split,
                              meta);
}

MetricsReport evaluate_model(const GpModel& gp, const TabularDataset& ds, SplitName split,
                             const ReportMeta& meta) {
    return evaluate_predictor([&](const Matrix& x) { return gp_predict_mean(gp, x); }, ds, split,
                              meta);
}

}  // namespace regressgan
