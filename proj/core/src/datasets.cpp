#include "regressgan/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "regressgan/autodiff.hpp"
#include "regressgan/csv.hpp"
#include "regressgan/errors.hpp"

namespace regressgan {

namespace {
constexpr std::size_t kSyntheticDim = 25;
constexpr std::size_t kCarSubsampleRows = 100000;
}  // namespace

std::string split_name_string(SplitName s) {
    switch (s) {
        case SplitName::train: return "train";
        case SplitName::val: return "val";
        case SplitName::test: return "test";
    }
    return "?";
}

std::span<const std::size_t> TabularDataset::split_indices(SplitName s) const {
    switch (s) {
        case SplitName::train: return split.train;
        case SplitName::val: return split.val;
        case SplitName::test: return split.test;
    }
    return {};
}

Matrix TabularDataset::split_features(SplitName s) const {
    return gather_rows(features, split_indices(s));
}

std::vector<double> TabularDataset::split_targets(SplitName s) const {
    return gather(targets, split_indices(s));
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

std::vector<double> sample_mvn_isotropic(std::size_t dim, double variance, RngStream& rng) {
    if (dim < 1 || !(variance > 0.0)) {
        throw DomainError("sample_mvn_isotropic: dim >= 1 and variance > 0 required");
    }
    const double sd = std::sqrt(variance);
    std::vector<double> v(dim);
    for (auto& x : v) x = sd * rng.normal();
    return v;
}

double tweedie_zero_rate(double mu, double p, double phi) {
    return std::pow(mu, 2.0 - p) / ((2.0 - p) * phi);
}

double sample_tweedie(double mu, double p, double phi, RngStream& rng) {
    if (!(p > 1.0 && p < 2.0)) throw DomainError("sample_tweedie: p must be in (1, 2)");
    if (!(mu > 0.0)) throw DomainError("sample_tweedie: mu must be positive");
    if (!(phi > 0.0)) throw DomainError("sample_tweedie: phi must be positive");
    const double lambda = tweedie_zero_rate(mu, p, phi);
    const long n = rng.poisson(lambda);
    if (n == 0) return 0.0;
    const double alpha = (2.0 - p) / (p - 1.0);
    const double theta = phi * (p - 1.0) * std::pow(mu, p - 1.0);
    // Sum of n i.i.d. Gamma(alpha, theta) == Gamma(n * alpha, theta).
    return rng.gamma(static_cast<double>(n) * alpha, theta);
}

// ---------------------------------------------------------------------------
// Synthetic generators
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> numbered_features(std::size_t d) {
    std::vector<std::string> names(d);
    for (std::size_t i = 0; i < d; ++i) names[i] = "x_" + std::to_string(i);
    return names;
}

TabularDataset finish_synthetic(TabularDataset ds, std::string name, std::uint64_t seed,
                                std::string notes, std::vector<double> beta) {
    ds.meta.name = std::move(name);
    ds.meta.seed = seed;
    ds.meta.feature_names = numbered_features(ds.n_features());
    ds.meta.notes = std::move(notes);
    ds.meta.beta = std::move(beta);
    const std::uint64_t split_seed = derive_seed(seed, {ds.meta.name, "split"});
    return split_dataset(std::move(ds), {0.6, 0.2, 0.2}, split_seed);
}

}  // namespace

TabularDataset gen_normal(std::size_t n, std::uint64_t seed) {
    if (n < 1) throw DomainError("gen_normal: n >= 1");
    RngStream beta_rng(derive_seed(seed, {"normal", "beta"}));
    std::vector<double> beta = sample_mvn_isotropic(kSyntheticDim, 0.1, beta_rng);

    RngStream rows(derive_seed(seed, {"normal", "rows"}));
    TabularDataset ds;
    ds.features = Matrix(n, kSyntheticDim);
    ds.targets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = ds.features.row(i);
        double dot = 0.0;
        for (std::size_t j = 0; j < kSyntheticDim; ++j) {
            row[j] = rows.normal();
            dot += row[j] * beta[j];
        }
        ds.targets[i] = dot + rows.normal();
    }
    return finish_synthetic(std::move(ds), "normal", seed,
                            "x ~ N(0, I_25); y = x.beta + eps, eps ~ N(0,1); beta ~ MVN(0, I/10)",
                            std::move(beta));
}

TabularDataset gen_heteroscedastic(std::size_t n, std::uint64_t seed) {
    if (n < 1) throw DomainError("gen_heteroscedastic: n >= 1");
    RngStream rows(derive_seed(seed, {"heteroscedastic", "rows"}));
    TabularDataset ds;
    ds.features = Matrix(n, 1);
    ds.targets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rows.normal();
        const double z = 1.0 + rows.normal();
        const double h = (0.001 + 0.5 * std::fabs(x)) * z;
        ds.features.at(i, 0) = x;
        ds.targets[i] = x + h;
    }
    return finish_synthetic(std::move(ds), "heteroscedastic", seed,
                            "x ~ N(0,1); z ~ N(1,1); y = x + (0.001+0.5|x|) z", {});
}

TabularDataset gen_classification(std::size_t n, std::uint64_t seed) {
    if (n < 1) throw DomainError("gen_classification: n >= 1");
    RngStream beta_rng(derive_seed(seed, {"classification", "beta"}));
    std::vector<double> beta = sample_mvn_isotropic(kSyntheticDim, 0.5, beta_rng);

    RngStream rows(derive_seed(seed, {"classification", "rows"}));
    TabularDataset ds;
    ds.features = Matrix(n, kSyntheticDim);
    ds.targets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = ds.features.row(i);
        double dot = 0.0;
        for (std::size_t j = 0; j < kSyntheticDim; ++j) {
            row[j] = rows.normal();
            dot += row[j] * beta[j];
        }
        const double p = stable_sigmoid(dot);
        ds.targets[i] = rows.bernoulli(p) ? 1.0 : 0.0;
    }
    return finish_synthetic(std::move(ds), "classification", seed,
                            "x ~ N(0, I_25); p = sigmoid(x.beta); y ~ Bernoulli(p); beta ~ MVN(0, I/2)",
                            std::move(beta));
}

TabularDataset gen_tweedie(std::size_t n, std::uint64_t seed) {
    if (n < 1) throw DomainError("gen_tweedie: n >= 1");
    RngStream beta_rng(derive_seed(seed, {"tweedie", "beta"}));
    std::vector<double> beta = sample_mvn_isotropic(kSyntheticDim, 0.1, beta_rng);

    RngStream rows(derive_seed(seed, {"tweedie", "rows"}));
    TabularDataset ds;
    ds.features = Matrix(n, kSyntheticDim);
    ds.targets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = ds.features.row(i);
        double dot = 0.0;
        for (std::size_t j = 0; j < kSyntheticDim; ++j) {
            row[j] = rows.normal();
            dot += row[j] * beta[j];
        }
        // Never binds in practice (|x.beta| sits ~1.6 sd); guards exp overflow
        // under adversarial seeds.
        const double mu = std::exp(std::clamp(dot, -30.0, 30.0));
        ds.targets[i] = sample_tweedie(mu, 1.5, 1.0, rows);
    }
    return finish_synthetic(std::move(ds), "tweedie", seed,
                            "x ~ N(0, I_25); mu = exp(x.beta); y ~ Tweedie(mu, 1.5, 1); beta ~ MVN(0, I/10)",
                            std::move(beta));
}

// ---------------------------------------------------------------------------
// Real datasets
// ---------------------------------------------------------------------------

namespace {

// Appends one-hot columns (first level dropped) for a categorical column.
// Levels are discovered from the data and sorted, so the encoding is stable.
struct OneHotPlan {
    std::string column;
    std::vector<std::string> kept_levels;  // all levels minus the first
};

OneHotPlan plan_one_hot(const CsvTable& t, const std::string& column) {
    const std::size_t c = t.column(column);
    std::set<std::string> levels;
    for (std::size_t r = 0; r < t.rows.size(); ++r) levels.insert(t.cell(r, c));
    OneHotPlan plan;
    plan.column = column;
    bool first = true;
    for (const auto& l : levels) {
        if (first) {
            first = false;
            continue;
        }
        plan.kept_levels.push_back(l);
    }
    return plan;
}

TabularDataset load_health_insurance(const std::string& path) {
    CsvTable t = read_csv(path);
    for (const char* col : {"age", "sex", "bmi", "children", "smoker", "region", "charges"}) {
        t.column(col);  // throws with expected-vs-found on a missing column
    }
    const std::size_t n = t.rows.size();
    const std::vector<std::string> numeric = {"age", "bmi", "children"};
    const std::vector<OneHotPlan> cats = {plan_one_hot(t, "sex"), plan_one_hot(t, "smoker"),
                                          plan_one_hot(t, "region")};
    std::vector<std::string> names = numeric;
    std::size_t d = numeric.size();
    for (const auto& plan : cats) {
        for (const auto& l : plan.kept_levels) {
            names.push_back(plan.column + "_" + l);
            ++d;
        }
    }

    TabularDataset ds;
    ds.features = Matrix(n, d);
    ds.targets.resize(n);
    const std::size_t target_col = t.column("charges");
    for (std::size_t r = 0; r < n; ++r) {
        std::size_t j = 0;
        for (const auto& col : numeric) ds.features.at(r, j++) = t.number_at(r, t.column(col));
        for (const auto& plan : cats) {
            const std::string& v = t.cell(r, t.column(plan.column));
            for (const auto& l : plan.kept_levels) ds.features.at(r, j++) = (v == l) ? 1.0 : 0.0;
        }
        ds.targets[r] = t.number_at(r, target_col);
    }
    ds.meta.name = "health_insurance";
    ds.meta.feature_names = std::move(names);
    ds.meta.notes = "US health insurance; one-hot (drop-first) categoricals; target = charges";
    return ds;
}

std::pair<std::string, std::string> car_insurance_paths(const std::string& path) {
    namespace fs = std::filesystem;
    fs::path p(path);
    if (fs::is_directory(p)) {
        return {(p / "freMTPL2freq.csv").string(), (p / "freMTPL2sev.csv").string()};
    }
    std::string freq = path;
    std::string sev = path;
    const auto pos = sev.rfind("freq");
    if (pos == std::string::npos) {
        throw ParseError("car_insurance: cannot locate severity table next to '" + path +
                         "' (expected a directory or a *freq*.csv path)");
    }
    sev.replace(pos, 4, "sev");
    return {freq, sev};
}

TabularDataset load_car_insurance(const std::string& path, std::uint64_t subsample_seed) {
    const auto [freq_path, sev_path] = car_insurance_paths(path);
    CsvTable freq = read_csv(freq_path);
    CsvTable sev = read_csv(sev_path);

    for (const char* col : {"IDpol", "Exposure", "VehPower", "VehAge", "DrivAge", "BonusMalus",
                            "VehBrand", "VehGas", "Area", "Density", "Region"}) {
        freq.column(col);
    }
    sev.column("IDpol");
    sev.column("ClaimAmount");

    // Total claim amount per policy.
    std::map<std::string, double> claim_total;
    const std::size_t sev_id = sev.column("IDpol");
    const std::size_t sev_amount = sev.column("ClaimAmount");
    for (std::size_t r = 0; r < sev.rows.size(); ++r) {
        claim_total[sev.cell(r, sev_id)] += sev.number_at(r, sev_amount);
    }

    std::vector<std::size_t> keep(freq.rows.size());
    std::iota(keep.begin(), keep.end(), std::size_t{0});
    if (keep.size() > kCarSubsampleRows) {
        RngStream rng(derive_seed(subsample_seed, {"car_insurance", "subsample"}));
        rng.shuffle(keep);
        keep.resize(kCarSubsampleRows);
        std::sort(keep.begin(), keep.end());
    }

    const std::vector<std::string> numeric = {"Exposure", "VehPower",   "VehAge",
                                              "DrivAge",  "BonusMalus", "Density"};
    const std::vector<OneHotPlan> cats = {plan_one_hot(freq, "Area"), plan_one_hot(freq, "VehBrand"),
                                          plan_one_hot(freq, "VehGas"),
                                          plan_one_hot(freq, "Region")};
    std::vector<std::string> names = numeric;
    std::size_t d = numeric.size();
    for (const auto& plan : cats) {
        for (const auto& l : plan.kept_levels) {
            names.push_back(plan.column + "_" + l);
            ++d;
        }
    }

    TabularDataset ds;
    ds.features = Matrix(keep.size(), d);
    ds.targets.resize(keep.size());
    const std::size_t id_col = freq.column("IDpol");
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const std::size_t r = keep[i];
        std::size_t j = 0;
        for (const auto& col : numeric) {
            double v = freq.number_at(r, freq.column(col));
            if (col == "Exposure") v = std::min(v, 1.0);
            ds.features.at(i, j++) = v;
        }
        for (const auto& plan : cats) {
            const std::string& v = freq.cell(r, freq.column(plan.column));
            for (const auto& l : plan.kept_levels) ds.features.at(i, j++) = (v == l) ? 1.0 : 0.0;
        }
        const auto it = claim_total.find(freq.cell(r, id_col));
        ds.targets[i] = it == claim_total.end() ? 0.0 : it->second;
    }
    ds.meta.name = "car_insurance";
    ds.meta.feature_names = std::move(names);
    ds.meta.notes =
        "freMTPL2 freq+sev joined on IDpol; target = total claim amount per policy; exposure "
        "capped at 1";
    return ds;
}

}  // namespace

TabularDataset load_csv_dataset(const std::string& path, CsvSchema schema) {
    constexpr std::uint64_t kLoaderSeed = 20240501;  // fixed: loads are reproducible by contract
    TabularDataset ds;
    switch (schema) {
        case CsvSchema::car_insurance:
            ds = load_car_insurance(path, kLoaderSeed);
            break;
        case CsvSchema::health_insurance:
            ds = load_health_insurance(path);
            break;
    }
    ds.meta.seed = kLoaderSeed;
    const std::uint64_t split_seed = derive_seed(kLoaderSeed, {ds.meta.name, "split"});
    return split_dataset(std::move(ds), {0.6, 0.2, 0.2}, split_seed);
}

// ---------------------------------------------------------------------------
// Split / standardize / export
// ---------------------------------------------------------------------------

TabularDataset split_dataset(TabularDataset ds, std::array<double, 3> ratios, std::uint64_t seed) {
    const double total = ratios[0] + ratios[1] + ratios[2];
    if (std::fabs(total - 1.0) > 1e-9) throw DomainError("split_dataset: ratios must sum to 1");
    const std::size_t n = ds.n_rows();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream rng(seed);
    rng.shuffle(order);
    const std::size_t n_train = static_cast<std::size_t>(std::floor(ratios[0] * static_cast<double>(n)));
    const std::size_t n_val = static_cast<std::size_t>(std::floor(ratios[1] * static_cast<double>(n)));
    ds.split.train.assign(order.begin(), order.begin() + n_train);
    ds.split.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
    ds.split.test.assign(order.begin() + n_train + n_val, order.end());
    return ds;
}

std::pair<TabularDataset, StandardizeRecord> standardize(const TabularDataset& ds,
                                                         StandardizeMode mode) {
    if (ds.split.train.empty()) throw ContractError("standardize: train split is empty");
    const std::size_t d = ds.n_features();
    StandardizeRecord rec;
    rec.feature_mean.assign(d, 0.0);
    rec.feature_scale.assign(d, 1.0);

    const double m = static_cast<double>(ds.split.train.size());
    for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t i : ds.split.train) s += ds.features.at(i, j);
        const double mu = s / m;
        double ss = 0.0;
        for (std::size_t i : ds.split.train) {
            const double dlt = ds.features.at(i, j) - mu;
            ss += dlt * dlt;
        }
        const double sd = std::sqrt(ss / m);
        if (sd > 1e-12) {  // constant columns stay untouched
            rec.feature_mean[j] = mu;
            rec.feature_scale[j] = sd;
        }
    }

    TabularDataset out = ds;
    for (std::size_t i = 0; i < out.n_rows(); ++i) {
        auto row = out.features.row(i);
        for (std::size_t j = 0; j < d; ++j) row[j] = (row[j] - rec.feature_mean[j]) / rec.feature_scale[j];
    }
    out.meta.standardized_features = true;

    if (mode == StandardizeMode::features_and_target) {
        double s = 0.0;
        for (std::size_t i : ds.split.train) s += ds.targets[i];
        const double mu = s / m;
        double ss = 0.0;
        for (std::size_t i : ds.split.train) {
            const double dlt = ds.targets[i] - mu;
            ss += dlt * dlt;
        }
        const double sd = std::sqrt(ss / m);
        rec.targets_standardized = true;
        rec.target_mean = mu;
        rec.target_scale = sd > 1e-12 ? sd : 1.0;
        for (auto& y : out.targets) y = rec.forward_target(y);
        out.meta.standardized_targets = true;
    }
    return {std::move(out), std::move(rec)};
}

void export_csv(const TabularDataset& ds, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ParseError("export_csv: cannot open " + path);
    const std::size_t d = ds.n_features();
    for (std::size_t j = 0; j < d; ++j) f << "x_" << j << ",";
    f << "y\n";
    char buf[40];
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        auto row = ds.features.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            std::snprintf(buf, sizeof(buf), "%.10g", row[j]);
            f << buf << ",";
        }
        std::snprintf(buf, sizeof(buf), "%.10g", ds.targets[i]);
        f << buf << "\n";
    }
    if (!f.good()) throw ParseError("export_csv: write failed for " + path);
}

}  // namespace regressgan
