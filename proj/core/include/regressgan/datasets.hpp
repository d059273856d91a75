#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regressgan/matrix.hpp"
#include "regressgan/rng.hpp"

namespace regressgan {

enum class SplitName { train, val, test };

std::string split_name_string(SplitName s);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

struct DatasetMeta {
    std::string name;
    std::uint64_t seed = 0;
    std::vector<std::string> feature_names;
    bool standardized_features = false;
    bool standardized_targets = false;
    std::string notes;
    // Generating coefficients of the linear synthetic families; empty when
    // not applicable. Kept for oracle evaluation in tests.
    std::vector<double> beta;
};

struct TabularDataset {
    Matrix features;              // [n, d]
    std::vector<double> targets;  // [n]
    SplitIndices split;
    DatasetMeta meta;

    std::size_t n_rows() const { return features.rows(); }
    std::size_t n_features() const { return features.cols(); }

    std::span<const std::size_t> split_indices(SplitName s) const;
    Matrix split_features(SplitName s) const;
    std::vector<double> split_targets(SplitName s) const;
};

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

// i.i.d. normal coordinates, MVN(0, variance * I_dim).
std::vector<double> sample_mvn_isotropic(std::size_t dim, double variance, RngStream& rng);

// Compound Poisson-Gamma draw from Tweedie(mu, p, phi), 1 < p < 2. The N
// gamma summands share a scale, so the sum collapses to one Gamma(N*alpha)
// draw.
double sample_tweedie(double mu, double p, double phi, RngStream& rng);

// Poisson rate of the zero mass: P(y = 0) = exp(-lambda).
double tweedie_zero_rate(double mu, double p, double phi);

// ---------------------------------------------------------------------------
// Synthetic generators. Pure functions of (n, seed): repeated calls are
// bit-identical. Covariates are drawn N(0, I); the choice is recorded in
// meta.notes. All carry a seeded 60/20/20 split.
// ---------------------------------------------------------------------------

TabularDataset gen_normal(std::size_t n, std::uint64_t seed);
TabularDataset gen_heteroscedastic(std::size_t n, std::uint64_t seed);
TabularDataset gen_classification(std::size_t n, std::uint64_t seed);
TabularDataset gen_tweedie(std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Real datasets
// ---------------------------------------------------------------------------

enum class CsvSchema { car_insurance, health_insurance };

// car_insurance: `path` is either a directory holding freMTPL2freq.csv and
// freMTPL2sev.csv or the frequency file itself (the severity file is then
// found next to it by name). Frequency and severity join on IDpol; the target
// is the total claim amount per policy, zero when no claims. Policies are
// subsampled to 100k rows with a fixed seed when the file is larger.
//
// health_insurance: `path` is the single CSV with columns
// age,sex,bmi,children,smoker,region,charges; categoricals are one-hot
// encoded (first level dropped) for 8 features; the target is charges.
TabularDataset load_csv_dataset(const std::string& path, CsvSchema schema);

// ---------------------------------------------------------------------------
// Split / standardize / export
// ---------------------------------------------------------------------------

TabularDataset split_dataset(TabularDataset ds, std::array<double, 3> ratios, std::uint64_t seed);

enum class StandardizeMode { features_only, features_and_target };

// Inverse information for one standardize() call. Constant columns keep
// scale 1 and offset 0 (left untouched).
struct StandardizeRecord {
    std::vector<double> feature_mean;
    std::vector<double> feature_scale;
    bool targets_standardized = false;
    double target_mean = 0.0;
    double target_scale = 1.0;

    double forward_target(double y) const { return (y - target_mean) / target_scale; }
    double inverse_target(double y) const { return y * target_scale + target_mean; }
};

// z-score with TRAIN-split statistics only.
std::pair<TabularDataset, StandardizeRecord> standardize(const TabularDataset& ds,
                                                         StandardizeMode mode);

// Columns x_0..x_{d-1}, y.
void export_csv(const TabularDataset& ds, const std::string& path);

}  // namespace regressgan
