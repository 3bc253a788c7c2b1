// Serial reference vs production kernels, at the batch and layer sizes the
// training loop uses, plus one full learning phase.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "meet/agent.hpp"
#include "meet/envs.hpp"
#include "meet/kernels.hpp"

namespace k = meet::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

k::DenseShape shape_of(const benchmark::State& state) {
    return {static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)),
            static_cast<std::size_t>(state.range(2))};
}

template <k::Backend B>
void BM_Forward(benchmark::State& state) {
    const auto s = shape_of(state);
    const auto x = random_vec(s.batch * s.in_dim, 1);
    const auto w = random_vec(s.out_dim * s.in_dim, 2);
    const auto b = random_vec(s.out_dim, 3);
    std::vector<double> y(s.batch * s.out_dim);
    for (auto _ : state) {
        k::dense_forward(s, x, w, b, y, B);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(s.batch * s.in_dim * s.out_dim));
}

template <k::Backend B>
void BM_InputGrad(benchmark::State& state) {
    const auto s = shape_of(state);
    const auto g = random_vec(s.batch * s.out_dim, 1);
    const auto w = random_vec(s.out_dim * s.in_dim, 2);
    std::vector<double> gi(s.batch * s.in_dim);
    for (auto _ : state) {
        k::dense_input_grad(s, g, w, gi, B);
        benchmark::DoNotOptimize(gi.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(s.batch * s.in_dim * s.out_dim));
}

template <k::Backend B>
void BM_ParamGrad(benchmark::State& state) {
    const auto s = shape_of(state);
    const auto g = random_vec(s.batch * s.out_dim, 1);
    const auto x = random_vec(s.batch * s.in_dim, 2);
    std::vector<double> gw(s.out_dim * s.in_dim), gb(s.out_dim);
    for (auto _ : state) {
        k::dense_param_grad(s, g, x, gw, gb, B);
        benchmark::DoNotOptimize(gw.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(s.batch * s.in_dim * s.out_dim));
}

void layer_shapes(benchmark::internal::Benchmark* b) {
    b->Args({256, 64, 64})->Args({256, 4, 64})->Args({256, 64, 1})->Args({1024, 256, 256});
}

void BM_LearningPhase(benchmark::State& state) {
    meet::AgentConfig cfg;
    cfg.strategy = static_cast<meet::Strategy>(state.range(0));
    cfg.batch_size = 256;
    meet::PendulumEnv env;
    meet::Agent agent(cfg, env);
    agent.begin(env);
    for (std::size_t t = 1; t <= cfg.batch_size; ++t) {
        if (env.horizon() == t) break;
        agent.train_iteration(env, t);
    }
    while (agent.buffer().size() < cfg.batch_size) agent.train_iteration(env, 1);
    const auto mask = meet::HeadMask::all(cfg.heads);
    for (auto _ : state) {
        auto report = agent.learn(mask);
        benchmark::DoNotOptimize(report.critic_loss);
    }
}

}  // namespace

BENCHMARK(BM_Forward<k::Backend::serial>)->Apply(layer_shapes);
BENCHMARK(BM_Forward<k::Backend::parallel>)->Apply(layer_shapes);
BENCHMARK(BM_InputGrad<k::Backend::serial>)->Apply(layer_shapes);
BENCHMARK(BM_InputGrad<k::Backend::parallel>)->Apply(layer_shapes);
BENCHMARK(BM_ParamGrad<k::Backend::serial>)->Apply(layer_shapes);
BENCHMARK(BM_ParamGrad<k::Backend::parallel>)->Apply(layer_shapes);
BENCHMARK(BM_LearningPhase)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
