#include <doctest.h>

#include <cmath>
#include <vector>

#include "regressgan/adam.hpp"
#include "regressgan/datasets.hpp"
#include "regressgan/errors.hpp"
#include "regressgan/eval.hpp"
#include "regressgan/training.hpp"

using namespace regressgan;

namespace {

GanTrainConfig small_config(std::uint64_t seed) {
    GanTrainConfig cfg;
    cfg.batch_size = 128;
    cfg.learning_rate = 1e-3;
    cfg.max_steps = 1500;
    cfg.eval_every = 100;
    cfg.patience = 15;
    cfg.hidden = {32, 32, 32};
    cfg.noise_dim = 4;
    cfg.k_samples_val = 32;
    cfg.val_eval_rows = 512;
    cfg.seed = seed;
    return cfg;
}

TabularDataset constant_zero_dataset(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed);
    TabularDataset ds;
    ds.features = Matrix(n, 2);
    for (auto& v : ds.features.data()) v = rng.normal();
    ds.targets.assign(n, 0.0);
    return split_dataset(std::move(ds), {0.6, 0.2, 0.2}, seed + 1);
}

// Exact linear map, no noise: a realizable target for the MSE net.
TabularDataset noiseless_linear_dataset(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed);
    const std::vector<double> beta{0.8, -1.2, 0.5};
    TabularDataset ds;
    ds.features = Matrix(n, beta.size());
    ds.targets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < beta.size(); ++j) {
            const double x = rng.normal();
            ds.features.at(i, j) = x;
            dot += x * beta[j];
        }
        ds.targets[i] = dot;
    }
    return split_dataset(std::move(ds), {0.6, 0.2, 0.2}, seed + 1);
}

}  // namespace

TEST_CASE("config: validation and seed-independent hash") {
    GanTrainConfig cfg;
    cfg.validate();
    const std::string h = cfg.config_hash();
    GanTrainConfig cfg2 = cfg;
    cfg2.seed = 999;
    CHECK(cfg2.config_hash() == h);  // hash identifies the config, not the seed
    cfg2.learning_rate = 1e-3;
    CHECK(cfg2.config_hash() != h);
    cfg2.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg2.validate(), DomainError);
}

TEST_CASE("generator losses: values at logit zero") {
    Tape tape;
    const Tensor z = Tensor::from_values({2, 1}, {0.0, 0.0});
    const double mm = generator_adversarial_loss(tape, z, GeneratorLossKind::minimax).scalar_value();
    const double ns =
        generator_adversarial_loss(tape, z, GeneratorLossKind::non_saturating).scalar_value();
    CHECK(mm == doctest::Approx(-std::log(2.0)));  // log(1 - sigmoid(0))
    CHECK(ns == doctest::Approx(std::log(2.0)));   // -log sigmoid(0)
}

TEST_CASE("train_gan: constant-zero targets collapse to the constant") {
    const auto ds = constant_zero_dataset(2000, 11);
    GanTrainConfig cfg = small_config(21);
    const GanTrainResult res = train_gan(ds, cfg);
    CHECK(res.best_val_mae < 0.05);
    CHECK_FALSE(res.log.records.empty());
}

TEST_CASE("train_gan: early stopping returns the best logged checkpoint") {
    const auto ds = constant_zero_dataset(1500, 13);
    GanTrainConfig cfg = small_config(23);
    cfg.max_steps = 800;
    const GanTrainResult res = train_gan(ds, cfg);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : res.log.records) {
        CHECK(res.best_val_mae <= r.val_mae);
        best = std::min(best, r.val_mae);
    }
    CHECK(res.best_val_mae == best);
    // records strictly increasing in step
    for (std::size_t i = 1; i < res.log.records.size(); ++i) {
        CHECK(res.log.records[i].step > res.log.records[i - 1].step);
    }
}

TEST_CASE("train_gan / train_fnn_mse: full determinism") {
    const auto ds = constant_zero_dataset(1200, 17);
    GanTrainConfig cfg = small_config(31);
    cfg.max_steps = 400;
    const auto a = train_gan(ds, cfg);
    const auto b = train_gan(ds, cfg);
    CHECK(a.log.to_csv() == b.log.to_csv());
    CHECK(a.best_step == b.best_step);

    const auto fa = train_fnn_mse(ds, cfg);
    const auto fb = train_fnn_mse(ds, cfg);
    CHECK(fa.log.to_csv() == fb.log.to_csv());
}

TEST_CASE("train_fnn_mse: fits an exact linear map to MAE < 0.01") {
    const auto ds = noiseless_linear_dataset(4000, 19);
    GanTrainConfig cfg = small_config(37);
    cfg.batch_size = 128;
    cfg.learning_rate = 2e-3;
    cfg.max_steps = 6000;
    cfg.eval_every = 250;
    cfg.patience = 24;
    cfg.hidden = {64, 64, 64};
    const FnnTrainResult res = train_fnn_mse(ds, cfg);
    const Matrix x_test = ds.split_features(SplitName::test);
    const auto pred = res.model.predict_values(x_test);
    CHECK(mae(ds.split_targets(SplitName::test), pred) < 0.01);
}

TEST_CASE("discriminator step does not increase its loss on a frozen batch") {
    RngStream rng(41);
    const std::size_t batch = 64, d = 3;
    DiscriminatorNet disc = DiscriminatorNet::init(d, {32, 32, 32}, rng);
    AdamOptimizer opt(disc.net.parameters(), {1e-4, 0.5, 0.999, 1e-8});

    Matrix x(batch, d);
    std::vector<double> y(batch), yfake(batch);
    for (auto& v : x.data()) v = rng.normal();
    for (auto& v : y) v = rng.normal() + 1.0;
    for (auto& v : yfake) v = rng.normal() - 1.0;

    const Tensor ones = Tensor::column(std::vector<double>(batch, 1.0));
    const Tensor zeros = Tensor::column(std::vector<double>(batch, 0.0));
    auto loss_on_batch = [&]() {
        Tape tape;
        const Tensor tx = Tensor::from_matrix(x);
        const Tensor lr = bce_with_logits_loss(tape, disc.forward(tape, tx, Tensor::column(y)), ones);
        const Tensor lf =
            bce_with_logits_loss(tape, disc.forward(tape, tx, Tensor::column(yfake)), zeros);
        return add(tape, lr, lf).scalar_value();
    };

    const double before = loss_on_batch();
    {
        Tape tape;
        const Tensor tx = Tensor::from_matrix(x);
        const Tensor lr = bce_with_logits_loss(tape, disc.forward(tape, tx, Tensor::column(y)), ones);
        const Tensor lf =
            bce_with_logits_loss(tape, disc.forward(tape, tx, Tensor::column(yfake)), zeros);
        const Tensor total = add(tape, lr, lf);
        tape.backward(total);
        opt.step();
        opt.zero_grad();
    }
    const double after = loss_on_batch();
    CHECK(after <= before);
}

TEST_CASE("label symmetry: swapped labels + negated objective keep the gradient direction") {
    RngStream rng(43);
    GeneratorNet gen = GeneratorNet::init(2, 3, {16, 16, 16}, rng);
    DiscriminatorNet disc = DiscriminatorNet::init(2, {16, 16, 16}, rng);

    // single sample isolates the per-logit scaling
    Matrix x(1, 2);
    x.at(0, 0) = 0.3;
    x.at(0, 1) = -0.8;
    Matrix z(1, 3);
    z.at(0, 0) = 0.5;
    z.at(0, 1) = -0.1;
    z.at(0, 2) = 1.2;

    auto generator_grads = [&](const DiscriminatorNet& d, bool negated_objective) {
        for (Tensor p : gen.net.parameters()) p.zero_grad();
        Tape tape;
        const Tensor ty = gen.forward(tape, Tensor::from_matrix(x), Tensor::from_matrix(z));
        const Tensor logits = d.forward(tape, Tensor::from_matrix(x), ty);
        // minimax: minimize log(1-sigmoid(l)) = -softplus(l). Under swapped
        // labels the negated objective is -log(1-sigmoid(l')) = softplus(l'),
        // which is bce_with_logits(l', target 0).
        const Tensor l = negated_objective
                             ? bce_with_logits_loss(tape, logits,
                                                    Tensor::from_values(logits.shape(), {0.0}))
                             : generator_adversarial_loss(tape, logits,
                                                          GeneratorLossKind::minimax);
        tape.backward(l);
        std::vector<double> g;
        for (Tensor p : gen.net.parameters()) {
            auto gg = p.ensure_grad();
            g.insert(g.end(), gg.begin(), gg.end());
        }
        return g;
    };

    const auto g1 = generator_grads(disc, false);

    // Deep-copy D, then negate its final layer: the logit flips sign exactly
    // as it would after a label swap retrains it to the mirrored optimum.
    RngStream dummy(1);
    DiscriminatorNet neg = DiscriminatorNet::init(2, {16, 16, 16}, dummy);
    neg.net.restore(disc.net.snapshot());
    auto params = neg.net.parameters();
    Tensor wf = params[params.size() - 2];
    Tensor bf = params[params.size() - 1];
    for (auto& v : wf.values()) v = -v;
    for (auto& v : bf.values()) v = -v;

    const auto g2 = generator_grads(neg, true);
    REQUIRE(g1.size() == g2.size());

    // same direction: g2 = c * g1 with c > 0
    std::size_t ref = 0;
    for (std::size_t i = 0; i < g1.size(); ++i) {
        if (std::fabs(g1[i]) > std::fabs(g1[ref])) ref = i;
    }
    REQUIRE(std::fabs(g1[ref]) > 0.0);
    const double c = g2[ref] / g1[ref];
    CHECK(c > 0.0);
    for (std::size_t i = 0; i < g1.size(); ++i) {
        CHECK(std::fabs(g2[i] - c * g1[i]) <= 1e-9 * std::max(1.0, std::fabs(c * g1[i])));
    }
}

TEST_CASE("estimate_jsd: fixed points of the value function") {
    RngStream rng(47);
    GeneratorNet gen = GeneratorNet::init(1, 2, {8, 8}, rng);
    DiscriminatorNet disc = DiscriminatorNet::init(1, {8, 8}, rng);

    // zero-weight D -> logit 0 everywhere -> V = -log 4 -> jsd = 0
    for (Tensor p : disc.net.parameters()) {
        for (auto& v : p.values()) v = 0.0;
    }
    Matrix x(64, 1, 0.0);
    std::vector<double> y(64, 1.0);
    RngStream z(3);
    const JsdEstimate zero_est = estimate_jsd_on(disc, gen, x, y, z);
    CHECK(zero_est.value_fn == doctest::Approx(-std::log(4.0)));
    CHECK(zero_est.value == doctest::Approx(0.0));

    // perfectly separating D on disjoint supports -> jsd -> ln 2.
    // G emits the constant -5 (zero net, bias -5); real targets sit at +5;
    // a hand-built pass-through D outputs logit 2*y.
    RngStream rng2(49);
    GeneratorNet gconst = GeneratorNet::init(1, 2, {8, 8}, rng2);
    for (Tensor p : gconst.net.parameters()) {
        for (auto& v : p.values()) v = 0.0;
    }
    gconst.net.parameters().back().values()[0] = -5.0;

    DiscriminatorNet dsep = DiscriminatorNet::init(1, {8, 8}, rng2);
    for (Tensor p : dsep.net.parameters()) {
        for (auto& v : p.values()) v = 0.0;
    }
    {
        auto params = dsep.net.parameters();
        // layer0: unit0 = lrelu(y), unit1 = lrelu(-y); y is input column 1
        Tensor w0 = params[0];
        w0.values()[1 * 8 + 0] = 1.0;
        w0.values()[1 * 8 + 1] = -1.0;
        // layer1: keep the pair
        Tensor w1 = params[2];
        w1.values()[0 * 8 + 0] = 1.0;
        w1.values()[1 * 8 + 1] = 1.0;
        // final: logit = a * (h0 - h1); the leaky pairs reproduce 1.2^2 * y
        Tensor wfin = params[4];
        wfin.values()[0] = 2.0;
        wfin.values()[1] = -2.0;
    }
    std::vector<double> yreal(64, 5.0);
    RngStream z2(5);
    const JsdEstimate sep = estimate_jsd_on(dsep, gconst, x, yreal, z2);
    CHECK(sep.value == doctest::Approx(std::log(2.0)).epsilon(0.001));
    CHECK(sep.value <= std::log(2.0));
}

TEST_CASE("train_fnn_mse: exploding learning rate aborts with the step recorded") {
    const auto ds = noiseless_linear_dataset(600, 23);
    GanTrainConfig cfg = small_config(41);
    cfg.learning_rate = 1e100;  // one Adam step overflows the next forward pass
    cfg.max_steps = 200;
    cfg.eval_every = 10;
    try {
        train_fnn_mse(ds, cfg);
        FAIL("expected TrainAbortError");
    } catch (const TrainAbortError& e) {
        CHECK(e.step() >= 1);
        CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
    }
}

TEST_CASE("trainlog csv: adversarial columns stay empty for the FNN") {
    const auto ds = constant_zero_dataset(600, 29);
    GanTrainConfig cfg = small_config(43);
    cfg.max_steps = 100;
    cfg.eval_every = 50;
    const auto res = train_fnn_mse(ds, cfg);
    const std::string csv = res.log.to_csv();
    CHECK(csv.find("step,d_loss_real,d_loss_fake,g_loss,val_mae,jsd") == 0);
    // first record: step 50, empty d_loss cells
    CHECK(csv.find("\n50,,,") != std::string::npos);
}
