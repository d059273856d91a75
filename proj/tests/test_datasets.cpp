#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "regressgan/datasets.hpp"
#include "regressgan/errors.hpp"
#include "regressgan/matrix.hpp"

using namespace regressgan;

namespace {
const std::string kDataDir = REGRESSGAN_TEST_DATA_DIR;
constexpr double kSqrt2OverPi = 0.7978845608028654;
}  // namespace

TEST_CASE("sample_mvn_isotropic: moment and independence checks") {
    RngStream rng(31);
    // variance -> 0 limit: coordinates collapse to 0
    for (double v : sample_mvn_isotropic(25, 1e-20, rng)) CHECK(std::fabs(v) < 1e-9);

    const std::size_t draws = 1000000;
    const std::size_t dim = 25;
    const double variance = 0.1;
    std::vector<double> sum(dim, 0.0), sumsq(dim, 0.0);
    // three representative coordinate pairs for the correlation check
    const std::size_t pairs[3][2] = {{0, 1}, {3, 17}, {12, 24}};
    double cross[3] = {0, 0, 0};
    for (std::size_t i = 0; i < draws; ++i) {
        const auto v = sample_mvn_isotropic(dim, variance, rng);
        for (std::size_t j = 0; j < dim; ++j) {
            sum[j] += v[j];
            sumsq[j] += v[j] * v[j];
        }
        for (int p = 0; p < 3; ++p) cross[p] += v[pairs[p][0]] * v[pairs[p][1]];
    }
    double pooled = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        const double m = sum[j] / draws;
        pooled += sumsq[j] / draws - m * m;
    }
    pooled /= dim;
    CHECK(pooled > 0.098);
    CHECK(pooled < 0.102);
    for (int p = 0; p < 3; ++p) {
        const double rho = (cross[p] / draws) / variance;  // means are ~0
        CHECK(std::fabs(rho) < 0.01);
    }

    CHECK_THROWS_AS(sample_mvn_isotropic(0, 1.0, rng), DomainError);
    CHECK_THROWS_AS(sample_mvn_isotropic(3, 0.0, rng), DomainError);
}

TEST_CASE("generators are pure functions of (n, seed)") {
    const auto a = gen_tweedie(500, 77);
    const auto b = gen_tweedie(500, 77);
    CHECK(a.features.data() == b.features.data());
    CHECK(a.targets == b.targets);
    CHECK(a.split.train == b.split.train);
    const auto c = gen_tweedie(500, 78);
    CHECK(a.targets != c.targets);
}

TEST_CASE("gen_normal: oracle MAE and OLS recovery of beta") {
    const std::size_t n = 100000;
    const auto ds = gen_normal(n, 3);
    REQUIRE(ds.n_features() == 25);
    REQUIRE(ds.meta.beta.size() == 25);
    CHECK(ds.split.train.size() == 60000);

    // optimal predictor x.beta achieves E|eps| = sqrt(2/pi) on the test split
    double s = 0.0;
    for (std::size_t i : ds.split.test) {
        double dot = 0.0;
        auto row = ds.features.row(i);
        for (std::size_t j = 0; j < 25; ++j) dot += row[j] * ds.meta.beta[j];
        s += std::fabs(ds.targets[i] - dot);
    }
    const double oracle_mae = s / static_cast<double>(ds.split.test.size());
    CHECK(std::fabs(oracle_mae - kSqrt2OverPi) < 0.02);

    // OLS on the train split recovers beta within 0.02 per coordinate
    Matrix xtx(25, 25, 0.0);
    std::vector<double> xty(25, 0.0);
    for (std::size_t i : ds.split.train) {
        auto row = ds.features.row(i);
        for (std::size_t a = 0; a < 25; ++a) {
            xty[a] += row[a] * ds.targets[i];
            for (std::size_t b = a; b < 25; ++b) xtx.at(a, b) += row[a] * row[b];
        }
    }
    for (std::size_t a = 0; a < 25; ++a)
        for (std::size_t b = 0; b < a; ++b) xtx.at(a, b) = xtx.at(b, a);
    Matrix lower;
    REQUIRE(cholesky_lower(xtx, lower));
    const auto beta_hat = cholesky_solve(lower, xty);
    double max_err = 0.0;
    for (std::size_t j = 0; j < 25; ++j)
        max_err = std::max(max_err, std::fabs(beta_hat[j] - ds.meta.beta[j]));
    CHECK(max_err < 0.02);
}

TEST_CASE("pure-noise targets: best constant predictor 0 has MAE sqrt(2/pi)") {
    RngStream rng(41);
    double s = 0.0;
    const std::size_t n = 200000;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(rng.normal());
    CHECK(std::fabs(s / n - kSqrt2OverPi) < 0.005);
}

TEST_CASE("gen_heteroscedastic: conditional-median oracle MAE near 0.319") {
    const std::size_t n = 200000;
    const auto ds = gen_heteroscedastic(n, 5);
    REQUIRE(ds.n_features() == 1);
    double s = 0.0;
    std::size_t count = 0;
    for (std::size_t i : ds.split.test) {
        const double x = ds.features.at(i, 0);
        const double pred = x + (0.001 + 0.5 * std::fabs(x));  // median of z is 1
        s += std::fabs(ds.targets[i] - pred);
        ++count;
    }
    const double oracle = s / static_cast<double>(count);
    CHECK(oracle > 0.30);
    CHECK(oracle < 0.34);

    // near-zero covariates leave an almost degenerate spike
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        const double x = ds.features.at(i, 0);
        if (std::fabs(x) < 0.01) CHECK(std::fabs(ds.targets[i] - x) < 0.1);
    }
}

TEST_CASE("gen_classification: target domain and balance") {
    const auto ds = gen_classification(100000, 9);
    double s = 0.0;
    for (double y : ds.targets) {
        CHECK((y == 0.0 || y == 1.0));
        s += y;
    }
    const double mean_target = s / static_cast<double>(ds.n_rows());
    CHECK(mean_target > 0.45);
    CHECK(mean_target < 0.55);
}

TEST_CASE("sample_tweedie: closed-form identities at mu=1, p=1.5, phi=1") {
    RngStream rng(55);
    const std::size_t n = 1000000;
    const double mu = 1.0, p = 1.5, phi = 1.0;
    const double lambda = tweedie_zero_rate(mu, p, phi);
    CHECK(lambda == doctest::Approx(2.0));

    double s = 0.0, ss = 0.0;
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = sample_tweedie(mu, p, phi, rng);
        CHECK(y >= 0.0);
        if (y == 0.0) ++zeros;
        s += y;
        ss += y * y;
    }
    const double m = s / n;
    const double v = ss / n - m * m;
    CHECK(std::fabs(m - mu) < 0.01 * mu);                    // mean = mu
    CHECK(std::fabs(v - phi * std::pow(mu, p)) < 0.02);      // variance = phi mu^p
    const double zero_freq = static_cast<double>(zeros) / n;
    CHECK(std::fabs(zero_freq - std::exp(-lambda)) < 0.005);  // P(0) = exp(-lambda)

    CHECK_THROWS_AS(sample_tweedie(1.0, 2.5, 1.0, rng), DomainError);
    CHECK_THROWS_AS(sample_tweedie(-1.0, 1.5, 1.0, rng), DomainError);
    CHECK_THROWS_AS(sample_tweedie(1.0, 1.5, 0.0, rng), DomainError);
}

TEST_CASE("gen_tweedie: zero inflation with a heavy right tail") {
    const auto ds = gen_tweedie(100000, 21);
    std::size_t zeros = 0;
    double maxy = 0.0;
    for (double y : ds.targets) {
        if (y == 0.0) ++zeros;
        maxy = std::max(maxy, y);
    }
    const double zero_frac = static_cast<double>(zeros) / static_cast<double>(ds.n_rows());
    CHECK(zero_frac > 0.05);
    CHECK(zero_frac < 0.5);
    CHECK(maxy > 10.0);  // continuous heavy tail reaches far beyond the bulk
}

TEST_CASE("split_dataset: sizes, determinism, coverage") {
    TabularDataset tiny;
    tiny.features = Matrix(10, 1);
    tiny.targets.assign(10, 0.0);
    const auto s10 = split_dataset(tiny, {0.6, 0.2, 0.2}, 4);
    CHECK(s10.split.train.size() == 6);
    CHECK(s10.split.val.size() == 2);
    CHECK(s10.split.test.size() == 2);

    const auto s10b = split_dataset(tiny, {0.6, 0.2, 0.2}, 4);
    CHECK(s10.split.train == s10b.split.train);
    CHECK(s10.split.test == s10b.split.test);

    TabularDataset big;
    const std::size_t n = 100000;
    big.features = Matrix(n, 1);
    big.targets.assign(n, 0.0);
    const auto sbig = split_dataset(big, {0.6, 0.2, 0.2}, 8);
    std::set<std::size_t> all;
    for (auto i : sbig.split.train) all.insert(i);
    for (auto i : sbig.split.val) all.insert(i);
    for (auto i : sbig.split.test) all.insert(i);
    CHECK(all.size() == n);  // disjoint union covers everything
    CHECK(*all.rbegin() == n - 1);
    CHECK(sbig.split.train.size() + sbig.split.val.size() + sbig.split.test.size() == n);

    CHECK_THROWS_AS(split_dataset(tiny, {0.5, 0.2, 0.2}, 4), DomainError);
}

TEST_CASE("standardize: train statistics, round trip, constant columns") {
    TabularDataset ds;
    const std::size_t n = 1000;
    ds.features = Matrix(n, 3);
    ds.targets.resize(n);
    RngStream rng(61);
    for (std::size_t i = 0; i < n; ++i) {
        ds.features.at(i, 0) = 5.0 + 2.0 * rng.normal();
        ds.features.at(i, 1) = -3.0 + 0.5 * rng.normal();
        ds.features.at(i, 2) = 7.25;  // constant column
        ds.targets[i] = 100.0 + 10.0 * rng.normal();
    }
    ds = split_dataset(std::move(ds), {0.6, 0.2, 0.2}, 1);

    const auto [std_ds, rec] = standardize(ds, StandardizeMode::features_and_target);
    for (std::size_t j = 0; j < 2; ++j) {
        double s = 0.0, ss = 0.0;
        for (std::size_t i : std_ds.split.train) {
            s += std_ds.features.at(i, j);
            ss += std_ds.features.at(i, j) * std_ds.features.at(i, j);
        }
        const double m = s / static_cast<double>(std_ds.split.train.size());
        const double sd = std::sqrt(ss / static_cast<double>(std_ds.split.train.size()) - m * m);
        CHECK(std::fabs(m) < 1e-10);
        CHECK(std::fabs(sd - 1.0) < 1e-10);
    }
    // constant column untouched
    for (std::size_t i = 0; i < n; ++i) CHECK(std_ds.features.at(i, 2) == 7.25);
    // target round trip
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(rec.inverse_target(std_ds.targets[i]) == doctest::Approx(ds.targets[i]).epsilon(1e-12));
        CHECK(rec.inverse_target(rec.forward_target(123.456)) == doctest::Approx(123.456).epsilon(1e-12));
    }
    CHECK(rec.targets_standardized);

    const auto [fo_ds, fo_rec] = standardize(ds, StandardizeMode::features_only);
    CHECK_FALSE(fo_rec.targets_standardized);
    CHECK(fo_ds.targets == ds.targets);
}

TEST_CASE("load_csv_dataset: health insurance fixture") {
    const auto ds = load_csv_dataset(kDataDir + "/insurance_fixture.csv",
                                     CsvSchema::health_insurance);
    CHECK(ds.n_rows() == 12);
    CHECK(ds.n_features() == 8);  // 3 numeric + sex(1) + smoker(1) + region(3)
    REQUIRE(ds.meta.feature_names.size() == 8);
    CHECK(ds.meta.feature_names[0] == "age");
    CHECK(ds.meta.feature_names[3] == "sex_male");
    CHECK(ds.meta.feature_names[4] == "smoker_yes");
    CHECK(ds.meta.feature_names[5] == "region_northwest");

    // first row: 19,female,27.9,0,yes,southwest -> sex_male=0, smoker_yes=1, regions 0,0,1
    CHECK(ds.features.at(0, 0) == doctest::Approx(19));
    CHECK(ds.features.at(0, 3) == 0.0);
    CHECK(ds.features.at(0, 4) == 1.0);
    CHECK(ds.features.at(0, 7) == 1.0);
    CHECK(ds.targets[0] == doctest::Approx(16884.924));

    // 60/20/20 within rounding on 12 rows: (7, 2, 3)
    CHECK(ds.split.train.size() == 7);
    CHECK(ds.split.val.size() == 2);
    CHECK(ds.split.test.size() == 3);
}

TEST_CASE("load_csv_dataset: schema and cell errors carry context") {
    try {
        load_csv_dataset(kDataDir + "/insurance_missing_col.csv", CsvSchema::health_insurance);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("region") != std::string::npos);   // expected column
        CHECK(msg.find("charges") != std::string::npos);  // found columns listed
    }
    try {
        load_csv_dataset(kDataDir + "/insurance_bad_cell.csv", CsvSchema::health_insurance);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":3") != std::string::npos);  // 1-based file line of the bad row
        CHECK(msg.find("oops") != std::string::npos);
    }
}

TEST_CASE("load_csv_dataset: car insurance fixture joins and zero-fills") {
    const auto ds = load_csv_dataset(kDataDir + "/fremtpl", CsvSchema::car_insurance);
    CHECK(ds.n_rows() == 20);
    REQUIRE(ds.meta.feature_names.size() == ds.n_features());

    // policy 1 -> 995.2; policy 25 -> 1500 + 2300.5; policy 5 -> no claims
    const std::size_t exposure_col = 0;  // first numeric feature
    double total = 0.0;
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        total += ds.targets[i];
        if (ds.targets[i] == 0.0) ++zeros;
        CHECK(ds.features.at(i, exposure_col) <= 1.0);  // exposure capped
    }
    // all claims except the orphan severity row (IDpol 9999)
    CHECK(total == doctest::Approx(995.2 + 1128.12 + 1500 + 2300.5 + 600 + 1204));
    CHECK(static_cast<double>(zeros) / static_cast<double>(ds.n_rows()) > 0.5);

    // the same file given directly as the frequency path
    const auto ds2 = load_csv_dataset(kDataDir + "/fremtpl/freMTPL2freq.csv",
                                      CsvSchema::car_insurance);
    CHECK(ds2.n_rows() == ds.n_rows());
    CHECK(ds2.targets == ds.targets);
}

TEST_CASE("export_csv round-trips through the reader") {
    const auto ds = gen_heteroscedastic(50, 3);
    const std::string path = "export_test.csv";
    export_csv(ds, path);
    TabularDataset back;  // lightweight re-read via the csv loader machinery
    // handled in harness tests through gen-data; here check the header layout
    std::FILE* f = std::fopen(path.c_str(), "r");
    REQUIRE(f != nullptr);
    char line[256];
    REQUIRE(std::fgets(line, sizeof(line), f) != nullptr);
    CHECK(std::string(line) == "x_0,y\n");
    std::fclose(f);
    std::remove(path.c_str());
}
