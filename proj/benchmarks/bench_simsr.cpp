// Microbenchmarks for the hot paths: transport solves, operator sweeps,
// encoder forward/backward, and the full representation update.

#include "simsr/encoder.hpp"
#include "simsr/mdp.hpp"
#include "simsr/metric.hpp"
#include "simsr/rng.hpp"
#include "simsr/simsr_loss.hpp"
#include "simsr/transport.hpp"

#include <benchmark/benchmark.h>

using namespace simsr;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

Vector random_simplex(int n, Rng& rng) {
    Vector p(n);
    for (int i = 0; i < n; ++i) p(i) = -std::log(1.0 - rng.uniform());
    return p / p.sum();
}

void BM_W1Exact(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(1);
    const Vector p = random_simplex(n, rng);
    const Vector q = random_simplex(n, rng);
    Matrix ground(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ground(i, j) = std::abs(i - j) / static_cast<double>(n);
    for (auto _ : state) benchmark::DoNotOptimize(w1_exact(p, q, ground));
}
BENCHMARK(BM_W1Exact)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_OperatorStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto kind = static_cast<OperatorKind>(state.range(1));
    const FiniteMDP mdp = random_mdp(n, 3, 7);
    const Policy policy = uniform_policy(n, 3);
    Rng rng(2);
    Matrix u(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) u(i, j) = rng.uniform();
    u = ((u + u.transpose()) / 2.0).eval();
    for (auto _ : state) benchmark::DoNotOptimize(operator_step(u, mdp, policy, kind));
}
BENCHMARK(BM_OperatorStep)
    ->Args({8, static_cast<int>(OperatorKind::IndependentCoupling)})
    ->Args({16, static_cast<int>(OperatorKind::IndependentCoupling)})
    ->Args({8, static_cast<int>(OperatorKind::WassersteinBisim)})
    ->Args({16, static_cast<int>(OperatorKind::WassersteinBisim)});

void BM_SolveFixedPoint(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const FiniteMDP mdp = random_mdp(n, 3, 11);
    const Policy policy = uniform_policy(n, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            solve_fixed_point(mdp, policy, OperatorKind::IndependentCoupling, 1e-8));
}
BENCHMARK(BM_SolveFixedPoint)->Arg(8)->Arg(16);

void BM_EncodeBatch(benchmark::State& state) {
    const int batch = static_cast<int>(state.range(0));
    const EncoderParams enc = EncoderParams::make(9, 64, 50, 3);
    Rng rng(4);
    const Matrix obs = random_matrix(batch, 9, rng);
    for (auto _ : state) benchmark::DoNotOptimize(encode_batch(enc, obs));
}
BENCHMARK(BM_EncodeBatch)->Arg(32)->Arg(128);

void BM_EncodeBackward(benchmark::State& state) {
    const int batch = static_cast<int>(state.range(0));
    const EncoderParams enc = EncoderParams::make(9, 64, 50, 3);
    Rng rng(5);
    const Matrix obs = random_matrix(batch, 9, rng);
    const Matrix upstream = random_matrix(batch, 50, rng);
    for (auto _ : state) {
        EncodeCache cache;
        benchmark::DoNotOptimize(encode_batch(enc, obs, &cache));
        benchmark::DoNotOptimize(encode_backward(enc, cache, upstream));
    }
}
BENCHMARK(BM_EncodeBackward)->Arg(32)->Arg(128);

void BM_TrainStep(benchmark::State& state) {
    const int batch_size = static_cast<int>(state.range(0));
    TrainConfig cfg;
    cfg.gamma = 0.9;
    cfg.batch_size = batch_size;
    cfg.hidden_dim = 64;
    cfg.latent_dim = 50;
    cfg.ensemble_k = 2;

    Rng rng(6);
    EncoderPair pair = EncoderPair::make(9, cfg.hidden_dim, cfg.latent_dim, 8, cfg.momentum);
    DynamicsEnsemble ensemble =
        DynamicsEnsemble::make(cfg.latent_dim, 4, cfg.hidden_dim, cfg.ensemble_k, 9);

    Batch batch;
    batch.obs = Matrix::Zero(batch_size, 9);
    batch.next_obs = Matrix::Zero(batch_size, 9);
    batch.actions = Matrix::Zero(batch_size, 4);
    batch.rewards = Vector::Zero(batch_size);
    batch.done.assign(batch_size, 0);
    for (int i = 0; i < batch_size; ++i) {
        batch.obs(i, rng.uniform_int(9)) = 1.0;
        batch.next_obs(i, rng.uniform_int(9)) = 1.0;
        const int a = rng.uniform_int(4);
        batch.actions(i, a) = 1.0;
        batch.action_idx.push_back(a);
        batch.rewards(i) = rng.uniform();
    }

    Rng train_rng(10);
    for (auto _ : state)
        benchmark::DoNotOptimize(train_step(batch, pair, &ensemble, cfg, train_rng));
}
BENCHMARK(BM_TrainStep)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
