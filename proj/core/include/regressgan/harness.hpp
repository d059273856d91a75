#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regressgan/eval.hpp"
#include "regressgan/training.hpp"

namespace regressgan {

// One sweep: datasets x models x seeds. Parsed from a flat key=value config
// file; unknown keys are errors.
struct ExperimentConfig {
    std::vector<std::string> datasets;  // normal|heteroscedastic|classification|tweedie|car_insurance|health_insurance
    std::vector<std::string> models;    // regressgan|fnn_mse|gp
    std::size_t n_seeds = 5;
    std::uint64_t seed = 1;
    std::size_t n_samples = 100000;  // synthetic dataset size
    std::string out_dir = "results";
    std::string car_insurance_path;
    std::string health_insurance_path;
    std::size_t gp_subsample_cap = 2000;
    std::size_t k_samples = 256;  // generator point-prediction draws at test eval
    std::size_t jobs = 0;         // worker threads; 0 = hardware concurrency
    GanTrainConfig gan;           // gan.* keys

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_text(const std::string& text, const std::string& origin);

    void validate() const;

    // Semantic fields only (no out_dir/jobs/paths); identifies results rows.
    std::string config_hash() const;
};

struct CellOutcome {
    std::string dataset;
    std::string model;  // model name, or model[variant] in ablation sweeps
    std::size_t seed_index = 0;
    bool ok = false;
    std::string error;
    MetricsReport report;
};

// Aggregated table shaped like the benchmark tables: one row per dataset,
// one column per model, mean +- std of the test MAE over seeds, best cell(s)
// per row marked.
struct ResultsTable {
    struct Cell {
        double mean_mae = 0.0;
        double std_mae = 0.0;
        std::size_t n_seeds = 0;
        bool best = false;
        bool failed = false;
        std::string note;
    };
    std::vector<std::string> datasets;
    std::vector<std::string> models;
    std::vector<std::vector<Cell>> cells;  // [dataset][model]

    std::string to_text() const;
    std::string to_csv() const;
};

// Groups reports into a table honoring the given row/column order; cells with
// no surviving seeds are marked failed. Ties on the row minimum all get the
// best marker.
ResultsTable emit_results_table(const std::vector<CellOutcome>& outcomes,
                                const std::vector<std::string>& dataset_order,
                                const std::vector<std::string>& model_order);

// Runs the sweep on a bounded worker pool; each cell owns its dataset, models
// and RNG streams (derived by stable hashing of dataset/model/seed-index), so
// execution order cannot change any output byte. Writes metrics.csv,
// table.txt, table.csv, trainlog_<cell>.csv and checkpoint_<cell> under
// out_dir. A failed cell is recorded and the sweep continues.
ResultsTable run_experiment(const ExperimentConfig& cfg);

// The generator-loss ablation: every (dataset, seed) trained twice, minimax
// and non-saturating, emitting a paired table plus both convergence logs.
ResultsTable run_ablation(const ExperimentConfig& cfg);

// Re-emit a table from a previously written metrics.csv.
ResultsTable report_from_metrics(const std::string& metrics_csv_path);

}  // namespace regressgan
