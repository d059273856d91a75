#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "regressgan/autodiff.hpp"
#include "regressgan/datasets.hpp"
#include "regressgan/models.hpp"

namespace regressgan {

// Every hyperparameter the tables leave unstated, pinned in one place. The
// same protocol (batching, Adam, eval cadence, early stopping) drives both
// the GAN and the FNN-MSE baseline so the comparison stays fair.
struct GanTrainConfig {
    std::size_t batch_size = 256;
    double learning_rate = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    std::size_t d_steps_per_g_step = 1;
    long max_steps = 20000;
    long eval_every = 500;
    std::size_t patience = 10;  // evals without val improvement before stopping
    GeneratorLossKind generator_loss = GeneratorLossKind::minimax;
    std::size_t k_samples_eval = 256;  // point-prediction draws at final evaluation
    std::uint64_t seed = 1;

    // Architecture and eval-cost knobs, also pinned here and hashed.
    std::size_t noise_dim = 10;
    std::vector<std::size_t> hidden = {64, 64, 64};
    std::size_t k_samples_val = 64;   // draws per early-stopping eval
    std::size_t val_eval_rows = 2048;  // 0 = the whole validation split

    void validate() const;

    // Stable hash over every field except the seed, plus the init scheme and
    // point-prediction rule. Reported in metrics and checkpoints.
    std::string config_hash() const;
};

struct TrainLogRecord {
    long step = 0;
    double d_loss_real = std::numeric_limits<double>::quiet_NaN();
    double d_loss_fake = std::numeric_limits<double>::quiet_NaN();
    double g_loss = std::numeric_limits<double>::quiet_NaN();
    double val_mae = std::numeric_limits<double>::quiet_NaN();
    double jsd = std::numeric_limits<double>::quiet_NaN();
};

struct TrainLog {
    std::vector<TrainLogRecord> records;

    // CSV columns: step,d_loss_real,d_loss_fake,g_loss,val_mae,jsd.
    // NaN fields (e.g. adversarial columns of an FNN run) are left empty.
    std::string to_csv() const;
    void write_csv(const std::string& path) const;
};

// Divergence is surfaced, not clamped: the ablation study wants to see it.
class TrainAbortError : public std::runtime_error {
public:
    TrainAbortError(long step, TrainLogRecord last, const std::string& what)
        : std::runtime_error(what), step_(step), last_(last) {}
    long step() const { return step_; }
    const TrainLogRecord& last_record() const { return last_; }

private:
    long step_;
    TrainLogRecord last_;
};

struct JsdEstimate {
    double value = 0.0;     // clamped to [0, ln 2] for reporting
    double value_raw = 0.0; // unclamped (value_fn + log 4) / 2
    double value_fn = 0.0;  // empirical V(D, G)
};

struct GanTrainResult {
    GeneratorNet generator;          // at the best-validation checkpoint
    DiscriminatorNet discriminator;  // final state
    TrainLog log;
    double best_val_mae = 0.0;
    long best_step = 0;
};

struct FnnTrainResult {
    FnnRegressor model;  // at the best-validation checkpoint
    TrainLog log;
    double best_val_mae = 0.0;
    long best_step = 0;
};

// Alternating adversarial training. Discriminator: bce_with_logits on
// real-labeled real pairs plus fake-labeled generated pairs; generator:
// minimax or non-saturating objective. Early stopping on validation MAE of
// predict_point; returns the generator at the best checkpoint.
GanTrainResult train_gan(const TabularDataset& ds, const GanTrainConfig& cfg);

// Same protocol with the MSE objective.
FnnTrainResult train_fnn_mse(const TabularDataset& ds, const GanTrainConfig& cfg);

// Empirical V(D,G) over n_eval validation rows and the induced lower-bound
// JSD estimate (value_fn + log 4) / 2, valid as D approaches its optimum.
JsdEstimate estimate_jsd(const DiscriminatorNet& disc, const GeneratorNet& gen,
                         const TabularDataset& ds, std::size_t n_eval, RngStream& rng);

JsdEstimate estimate_jsd_on(const DiscriminatorNet& disc, const GeneratorNet& gen, const Matrix& x,
                            std::span<const double> y, RngStream& rng);

}  // namespace regressgan
