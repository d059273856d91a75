#include "regressgan/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "regressgan/adam.hpp"
#include "regressgan/errors.hpp"
#include "regressgan/eval.hpp"

namespace regressgan {

void GanTrainConfig::validate() const {
    if (batch_size < 1 || max_steps < 1 || eval_every < 1 || patience < 1 ||
        d_steps_per_g_step < 1 || k_samples_eval < 1 || k_samples_val < 1 || hidden.empty()) {
        throw DomainError("GanTrainConfig: all counts must be positive");
    }
    if (!(learning_rate > 0.0)) throw DomainError("GanTrainConfig: learning_rate must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw DomainError("GanTrainConfig: betas must be in [0, 1)");
    }
}

std::string GanTrainConfig::config_hash() const {
    char buf[64];
    std::string dump;
    auto add = [&dump](const std::string& k, const std::string& v) {
        dump += k + "=" + v + ";";
    };
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    add("batch_size", std::to_string(batch_size));
    add("learning_rate", fmt(learning_rate));
    add("beta1", fmt(beta1));
    add("beta2", fmt(beta2));
    add("d_steps_per_g_step", std::to_string(d_steps_per_g_step));
    add("max_steps", std::to_string(max_steps));
    add("eval_every", std::to_string(eval_every));
    add("patience", std::to_string(patience));
    add("generator_loss",
        generator_loss == GeneratorLossKind::minimax ? "minimax" : "non_saturating");
    add("k_samples_eval", std::to_string(k_samples_eval));
    add("k_samples_val", std::to_string(k_samples_val));
    add("val_eval_rows", std::to_string(val_eval_rows));
    add("noise_dim", std::to_string(noise_dim));
    std::string h;
    for (auto v : hidden) h += std::to_string(v) + ",";
    add("hidden", h);
    add("init", "kaiming_uniform+xavier_uniform,zero_bias");
    add("predict", "median_of_noise_draws");
    std::uint64_t hash = stable_mix(0xcbf29ce484222325ull, dump);
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string TrainLog::to_csv() const {
    std::string out = "step,d_loss_real,d_loss_fake,g_loss,val_mae,jsd\n";
    char buf[40];
    auto cell = [&buf](double v) -> std::string {
        if (std::isnan(v)) return "";
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        return buf;
    };
    for (const auto& r : records) {
        out += std::to_string(r.step) + "," + cell(r.d_loss_real) + "," + cell(r.d_loss_fake) +
               "," + cell(r.g_loss) + "," + cell(r.val_mae) + "," + cell(r.jsd) + "\n";
    }
    return out;
}

void TrainLog::write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw ParseError("TrainLog::write_csv: cannot open " + path);
    f << to_csv();
}

namespace {

struct BatchBuffers {
    Matrix x;
    std::vector<double> y;
};

void fill_batch(const Matrix& features, std::span<const double> targets, std::size_t batch,
                RngStream& rng, BatchBuffers& out) {
    const std::size_t n = features.rows();
    if (out.x.rows() != batch || out.x.cols() != features.cols()) {
        out.x = Matrix(batch, features.cols());
    }
    out.y.resize(batch);
    for (std::size_t i = 0; i < batch; ++i) {
        const std::size_t r = static_cast<std::size_t>(rng.next_u64() % n);
        auto src = features.row(r);
        auto dst = out.x.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
        out.y[i] = targets[r];
    }
}

Matrix draw_noise(std::size_t rows, std::size_t dim, RngStream& rng) {
    Matrix z(rows, dim);
    for (auto& v : z.data()) v = rng.normal();
    return z;
}

// Validation subset used for every early-stopping eval: the whole val split,
// or a seeded subsample when cfg caps it.
struct ValSubset {
    Matrix x;
    std::vector<double> y;
};

ValSubset make_val_subset(const TabularDataset& ds, std::size_t cap, std::uint64_t seed) {
    std::vector<std::size_t> idx(ds.split.val.begin(), ds.split.val.end());
    if (cap > 0 && idx.size() > cap) {
        RngStream rng(derive_seed(seed, {"val", "subset"}));
        rng.shuffle(idx);
        idx.resize(cap);
        std::sort(idx.begin(), idx.end());
    }
    ValSubset v;
    v.x = gather_rows(ds.features, idx);
    v.y = gather(ds.targets, idx);
    return v;
}

void check_loss_finite(double v, long step, const TrainLog& log, const char* what) {
    if (std::isfinite(v)) return;
    TrainLogRecord last = log.records.empty() ? TrainLogRecord{} : log.records.back();
    throw TrainAbortError(step, last,
                          std::string(what) + " became non-finite at step " +
                              std::to_string(step));
}

// Overflow inside an op (non-finite activations reaching a loss) surfaces as
// NumericError; rethrow it as an abort carrying the step and last record.
template <typename Fn>
void guarded_step(long step, const TrainLog& log, Fn&& fn) {
    try {
        fn();
    } catch (const NumericError& e) {
        TrainLogRecord last = log.records.empty() ? TrainLogRecord{} : log.records.back();
        throw TrainAbortError(step, last,
                              std::string(e.what()) + " (non-finite at step " +
                                  std::to_string(step) + ")");
    }
}

}  // namespace

GanTrainResult train_gan(const TabularDataset& ds, const GanTrainConfig& cfg) {
    cfg.validate();
    if (ds.split.train.empty()) throw ContractError("train_gan: train split is empty");
    if (ds.split.val.empty()) throw ContractError("train_gan: val split is empty");

    const std::size_t d = ds.n_features();
    RngStream init_g(derive_seed(cfg.seed, {"gan", "init_g"}));
    RngStream init_d(derive_seed(cfg.seed, {"gan", "init_d"}));
    RngStream batch_rng(derive_seed(cfg.seed, {"gan", "batches"}));
    RngStream noise_rng(derive_seed(cfg.seed, {"gan", "noise"}));
    RngStream eval_rng(derive_seed(cfg.seed, {"gan", "eval"}));

    GeneratorNet gen = GeneratorNet::init(d, cfg.noise_dim, cfg.hidden, init_g);
    DiscriminatorNet disc = DiscriminatorNet::init(d, cfg.hidden, init_d);

    const AdamConfig adam{cfg.learning_rate, cfg.beta1, cfg.beta2, 1e-8};
    AdamOptimizer opt_g(gen.net.parameters(), adam);
    AdamOptimizer opt_d(disc.net.parameters(), adam);

    const Matrix x_train = ds.split_features(SplitName::train);
    const std::vector<double> y_train = ds.split_targets(SplitName::train);
    const ValSubset val = make_val_subset(ds, cfg.val_eval_rows, cfg.seed);

    TrainLog log;
    double best_val = std::numeric_limits<double>::infinity();
    long best_step = 0;
    auto best_snapshot = gen.net.snapshot();
    std::size_t patience_left = cfg.patience;

    BatchBuffers batch;
    const Tensor ones = Tensor::column(std::vector<double>(cfg.batch_size, 1.0));
    const Tensor zeros_t = Tensor::column(std::vector<double>(cfg.batch_size, 0.0));

    double d_loss_real = 0.0, d_loss_fake = 0.0, g_loss_v = 0.0;
    for (long step = 1; step <= cfg.max_steps; ++step) {
        // --- discriminator update(s): real pairs labeled 1, generated pairs 0
        guarded_step(step, log, [&] {
            for (std::size_t k = 0; k < cfg.d_steps_per_g_step; ++k) {
                fill_batch(x_train, y_train, cfg.batch_size, batch_rng, batch);
                const std::vector<double> y_fake = gen.sample_values(batch.x, noise_rng);

                Tape tape;
                const Tensor tx = Tensor::from_matrix(batch.x);
                const Tensor logits_real = disc.forward(tape, tx, Tensor::column(batch.y));
                const Tensor loss_real = bce_with_logits_loss(tape, logits_real, ones);
                const Tensor logits_fake = disc.forward(tape, tx, Tensor::column(y_fake));
                const Tensor loss_fake = bce_with_logits_loss(tape, logits_fake, zeros_t);
                const Tensor d_loss = add(tape, loss_real, loss_fake);
                tape.backward(d_loss);
                opt_d.step();
                opt_d.zero_grad();

                d_loss_real = loss_real.scalar_value();
                d_loss_fake = loss_fake.scalar_value();
                check_loss_finite(d_loss_real + d_loss_fake, step, log, "discriminator loss");
            }

            // --- generator update on a fresh batch and fresh noise
            fill_batch(x_train, y_train, cfg.batch_size, batch_rng, batch);
            Tape tape;
            const Tensor tx = Tensor::from_matrix(batch.x);
            const Tensor tz =
                Tensor::from_matrix(draw_noise(cfg.batch_size, cfg.noise_dim, noise_rng));
            const Tensor y_gen = gen.forward(tape, tx, tz);
            const Tensor logits = disc.forward(tape, tx, y_gen);
            const Tensor g_loss = generator_adversarial_loss(tape, logits, cfg.generator_loss);
            tape.backward(g_loss);
            opt_g.step();
            opt_g.zero_grad();
            opt_d.zero_grad();  // D grads accumulated through the shared tape

            g_loss_v = g_loss.scalar_value();
            check_loss_finite(g_loss_v, step, log, "generator loss");
        });

        if (step % cfg.eval_every == 0 || step == cfg.max_steps) {
            guarded_step(step, log, [&] {
                const std::vector<double> pred =
                    predict_point(gen, val.x, cfg.k_samples_val, eval_rng);
                const double val_mae = mae(val.y, pred);
                check_loss_finite(val_mae, step, log, "validation MAE");
                const JsdEstimate jsd = estimate_jsd_on(disc, gen, val.x, val.y, eval_rng);
                log.records.push_back(
                    {step, d_loss_real, d_loss_fake, g_loss_v, val_mae, jsd.value});
            });
            const double val_mae = log.records.back().val_mae;
            if (val_mae < best_val) {
                best_val = val_mae;
                best_step = step;
                best_snapshot = gen.net.snapshot();
                patience_left = cfg.patience;
            } else if (--patience_left == 0) {
                break;
            }
        }
    }

    gen.net.restore(best_snapshot);
    return {std::move(gen), std::move(disc), std::move(log), best_val, best_step};
}

FnnTrainResult train_fnn_mse(const TabularDataset& ds, const GanTrainConfig& cfg) {
    cfg.validate();
    if (ds.split.train.empty()) throw ContractError("train_fnn_mse: train split is empty");
    if (ds.split.val.empty()) throw ContractError("train_fnn_mse: val split is empty");

    const std::size_t d = ds.n_features();
    RngStream init_rng(derive_seed(cfg.seed, {"fnn", "init"}));
    RngStream batch_rng(derive_seed(cfg.seed, {"fnn", "batches"}));

    FnnRegressor fnn = FnnRegressor::init(d, cfg.hidden, init_rng);
    AdamOptimizer opt(fnn.net.parameters(), {cfg.learning_rate, cfg.beta1, cfg.beta2, 1e-8});

    const Matrix x_train = ds.split_features(SplitName::train);
    const std::vector<double> y_train = ds.split_targets(SplitName::train);
    const ValSubset val = make_val_subset(ds, cfg.val_eval_rows, cfg.seed);

    TrainLog log;
    double best_val = std::numeric_limits<double>::infinity();
    long best_step = 0;
    auto best_snapshot = fnn.net.snapshot();
    std::size_t patience_left = cfg.patience;

    BatchBuffers batch;
    double train_loss = 0.0;
    for (long step = 1; step <= cfg.max_steps; ++step) {
        guarded_step(step, log, [&] {
            fill_batch(x_train, y_train, cfg.batch_size, batch_rng, batch);
            Tape tape;
            const Tensor pred = fnn.forward(tape, Tensor::from_matrix(batch.x));
            const Tensor l = mse_loss(tape, pred, Tensor::column(batch.y));
            tape.backward(l);
            opt.step();
            opt.zero_grad();
            train_loss = l.scalar_value();
            check_loss_finite(train_loss, step, log, "mse loss");
        });

        if (step % cfg.eval_every == 0 || step == cfg.max_steps) {
            const std::vector<double> pred_val = fnn.predict_values(val.x);
            const double val_mae = mae(val.y, pred_val);
            check_loss_finite(val_mae, step, log, "validation MAE");
            TrainLogRecord rec;
            rec.step = step;
            rec.g_loss = train_loss;  // objective column; adversarial cells stay empty
            rec.val_mae = val_mae;
            log.records.push_back(rec);

            if (val_mae < best_val) {
                best_val = val_mae;
                best_step = step;
                best_snapshot = fnn.net.snapshot();
                patience_left = cfg.patience;
            } else if (--patience_left == 0) {
                break;
            }
        }
    }

    fnn.net.restore(best_snapshot);
    return {std::move(fnn), std::move(log), best_val, best_step};
}

JsdEstimate estimate_jsd_on(const DiscriminatorNet& disc, const GeneratorNet& gen, const Matrix& x,
                            std::span<const double> y, RngStream& rng) {
    const std::vector<double> logits_real = disc.logits_values(x, y);
    const std::vector<double> y_fake = gen.sample_values(x, rng);
    const std::vector<double> logits_fake = disc.logits_values(x, y_fake);

    // log sigmoid(z) = -softplus(-z); log(1 - sigmoid(z)) = -softplus(z)
    double real_term = 0.0;
    for (double z : logits_real) real_term -= softplus(-z);
    double fake_term = 0.0;
    for (double z : logits_fake) fake_term -= softplus(z);

    JsdEstimate est;
    est.value_fn = real_term / static_cast<double>(logits_real.size()) +
                   fake_term / static_cast<double>(logits_fake.size());
    est.value_raw = 0.5 * (est.value_fn + std::log(4.0));
    est.value = std::clamp(est.value_raw, 0.0, std::log(2.0));
    return est;
}

JsdEstimate estimate_jsd(const DiscriminatorNet& disc, const GeneratorNet& gen,
                         const TabularDataset& ds, std::size_t n_eval, RngStream& rng) {
    auto idx = ds.split_indices(SplitName::val);
    if (idx.empty()) throw ContractError("estimate_jsd: empty validation split");
    const std::size_t n = std::min(n_eval, idx.size());
    std::vector<std::size_t> take(idx.begin(), idx.begin() + n);
    const Matrix x = gather_rows(ds.features, take);
    const std::vector<double> y = gather(ds.targets, take);
    return estimate_jsd_on(disc, gen, x, y, rng);
}

}  // namespace regressgan
