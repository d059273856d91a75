#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "regressgan/datasets.hpp"
#include "regressgan/errors.hpp"
#include "regressgan/eval.hpp"

using namespace regressgan;

TEST_CASE("mae: worked examples and invariances") {
    const std::vector<double> y{0.0, 2.0};
    const std::vector<double> yhat{1.0, 1.0};
    CHECK(mae(y, y) == 0.0);
    CHECK(mae(y, yhat) == doctest::Approx(1.0));
    CHECK(mae(y, yhat) == mae(yhat, y));  // symmetry

    // translation invariance
    std::vector<double> ys{1.5, -0.25, 3.0, 10.0};
    std::vector<double> ps{0.5, 0.25, 2.0, 12.0};
    const double base = mae(ys, ps);
    for (auto& v : ys) v += 17.25;
    for (auto& v : ps) v += 17.25;
    CHECK(mae(ys, ps) == doctest::Approx(base));

    // permutation invariance under a common permutation
    std::vector<double> y2{1.0, 2.0, 3.0};
    std::vector<double> p2{0.0, 5.0, 2.0};
    const double before = mae(y2, p2);
    std::swap(y2[0], y2[2]);
    std::swap(p2[0], p2[2]);
    CHECK(mae(y2, p2) == doctest::Approx(before));

    CHECK_THROWS_AS(mae(y, std::vector<double>{1.0}), ShapeError);
}

TEST_CASE("relative_mae: zero guard") {
    {
        const auto r = relative_mae(std::vector<double>{2.0}, std::vector<double>{1.0});
        CHECK(r.value == doctest::Approx(0.5));
        CHECK(r.excluded == 0);
    }
    {
        const auto r = relative_mae(std::vector<double>{0.0, 2.0}, std::vector<double>{5.0, 1.0});
        CHECK(r.value == doctest::Approx(0.5));
        CHECK(r.excluded == 1);
    }
    {
        const std::vector<double> same{1.0, -2.0, 3.5};
        const auto r = relative_mae(same, same);
        CHECK(r.value == 0.0);
        CHECK(r.excluded == 0);
    }
    CHECK_THROWS_AS(relative_mae(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 2.0}),
                    NumericError);
}

TEST_CASE("evaluate_predictor: oracle, counts, and csv row") {
    const auto ds = gen_normal(2000, 13);
    ReportMeta meta;
    meta.dataset = "normal";
    meta.model = "oracle";
    meta.seed = 4;
    meta.config_hash = "cafe";

    // perfect oracle: echo the targets of the test split
    const std::vector<double> y_test = ds.split_targets(SplitName::test);
    std::size_t cursor = 0;
    const auto report = evaluate_predictor(
        [&](const Matrix& x) {
            std::vector<double> out(x.rows());
            for (std::size_t i = 0; i < x.rows(); ++i) out[i] = y_test[cursor + i];
            cursor += x.rows();
            return out;
        },
        ds, SplitName::test, meta);
    CHECK(report.mae == 0.0);
    CHECK(report.n == ds.split.test.size());
    CHECK(report.relative_mae.has_value());
    CHECK(*report.relative_mae == 0.0);
    CHECK(report.split == "test");

    const std::string row = report.csv_row();
    CHECK(row.find("normal,oracle,test,") == 0);
    CHECK(MetricsReport::csv_header() ==
          "dataset,model,split,n,mae,relative_mae,excluded_zero_rows,seed,config_hash");

    // constant-zero model is worse than the noise floor sqrt(2/pi)
    const auto zero_report = evaluate_predictor(
        [&](const Matrix& x) { return std::vector<double>(x.rows(), 0.0); }, ds, SplitName::test,
        meta);
    CHECK(zero_report.mae > 0.7978);
}

TEST_CASE("evaluate_predictor: all-zero targets leave relative_mae empty") {
    TabularDataset ds;
    ds.features = Matrix(10, 1, 0.0);
    ds.targets.assign(10, 0.0);
    ds = split_dataset(std::move(ds), {0.6, 0.2, 0.2}, 2);
    const auto report = evaluate_predictor(
        [&](const Matrix& x) { return std::vector<double>(x.rows(), 1.0); }, ds, SplitName::test,
        {});
    CHECK_FALSE(report.relative_mae.has_value());
    CHECK(report.excluded_zero_rows == report.n);
    // empty relative cell in the csv row
    CHECK(report.csv_row().find(",1,,") != std::string::npos);
}
