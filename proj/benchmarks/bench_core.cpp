// Microbenchmarks for the hot paths: taped dense forward/backward, the
// Tweedie sampler, GP fitting, and one full adversarial training step.

#include <benchmark/benchmark.h>

#include <vector>

#include "regressgan/adam.hpp"
#include "regressgan/autodiff.hpp"
#include "regressgan/datasets.hpp"
#include "regressgan/gp.hpp"
#include "regressgan/models.hpp"
#include "regressgan/training.hpp"

using namespace regressgan;

static void BM_dense_forward_backward(benchmark::State& state) {
    const std::size_t batch = static_cast<std::size_t>(state.range(0));
    RngStream rng(1);
    auto l1 = DenseParams::kaiming_uniform(35, 64, std::sqrt(2.0), rng);
    auto l2 = DenseParams::kaiming_uniform(64, 64, std::sqrt(2.0), rng);
    auto l3 = DenseParams::xavier_uniform(64, 1, rng);
    std::vector<double> xv(batch * 35);
    for (auto& v : xv) v = rng.normal();
    const Tensor x = Tensor::from_values({batch, 35}, xv);
    const Tensor y = Tensor::zeros({batch, 1});

    for (auto _ : state) {
        Tape tape;
        Tensor h = activation(tape, dense_forward(tape, x, l1), Activation::relu());
        h = activation(tape, dense_forward(tape, h, l2), Activation::relu());
        const Tensor l = mse_loss(tape, dense_forward(tape, h, l3), y);
        tape.backward(l);
        benchmark::DoNotOptimize(l.scalar_value());
        for (Tensor p : {l1.weight, l1.bias, l2.weight, l2.bias, l3.weight, l3.bias}) {
            p.zero_grad();
        }
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(batch));
}
BENCHMARK(BM_dense_forward_backward)->Arg(64)->Arg(256);

static void BM_tweedie_sampler(benchmark::State& state) {
    RngStream rng(2);
    double acc = 0.0;
    for (auto _ : state) {
        acc += sample_tweedie(1.0, 1.5, 1.0, rng);
    }
    benchmark::DoNotOptimize(acc);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_tweedie_sampler);

static void BM_gp_fit(benchmark::State& state) {
    const std::size_t m = static_cast<std::size_t>(state.range(0));
    RngStream rng(3);
    Matrix x(m, 5);
    for (auto& v : x.data()) v = rng.normal();
    std::vector<double> y(m);
    for (auto& v : y) v = rng.normal();
    for (auto _ : state) {
        const GpModel model = gp_fit(x, y, {2.0, 1.0, 0.1});
        benchmark::DoNotOptimize(model.log_marginal);
    }
}
BENCHMARK(BM_gp_fit)->Arg(200)->Arg(500);

static void BM_gan_training_step(benchmark::State& state) {
    const auto ds = gen_normal(2000, 5);
    GanTrainConfig cfg;
    cfg.max_steps = 1;
    cfg.eval_every = 1000000;
    cfg.val_eval_rows = 16;
    cfg.k_samples_val = 1;
    for (auto _ : state) {
        // max_steps = 1: one discriminator + one generator update end to end
        const GanTrainResult res = train_gan(ds, cfg);
        benchmark::DoNotOptimize(res.best_step);
    }
}
BENCHMARK(BM_gan_training_step)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
