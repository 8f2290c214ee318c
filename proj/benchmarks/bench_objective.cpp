// Cost of one FE (a full pass over the 3750 training rows) per topology.

#include "cornn/instance.hpp"
#include "cornn/network.hpp"
#include "cornn/optimizers.hpp"
#include "cornn/stats.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

const cornn::ProblemInstance& instance(cornn::Topology t) {
    static const auto suite = [] {
        std::vector<cornn::ProblemInstance> v;
        for (auto topo : cornn::kAllTopologies) v.push_back(cornn::build_instance(20, topo));
        return v;
    }();
    return suite[static_cast<std::size_t>(t)];
}

void bm_train_loss(benchmark::State& state) {
    const auto t = static_cast<cornn::Topology>(state.range(0));
    const auto& inst = instance(t);
    const auto p = cornn::init_weights(inst.architecture(), 1, cornn::InitScheme::NormalUnit);
    for (auto _ : state) benchmark::DoNotOptimize(inst.train_loss(p));
    state.SetLabel(cornn::to_string(t));
}

void bm_train_loss_and_gradient(benchmark::State& state) {
    const auto t = static_cast<cornn::Topology>(state.range(0));
    const auto& inst = instance(t);
    const auto p = cornn::init_weights(inst.architecture(), 1, cornn::InitScheme::FanInUniform);
    std::vector<double> g(p.size());
    for (auto _ : state) benchmark::DoNotOptimize(inst.train_loss_and_gradient(p, g));
    state.SetLabel(cornn::to_string(t));
}

void bm_cmaes_generation(benchmark::State& state) {
    const std::size_t dim = static_cast<std::size_t>(state.range(0));
    cornn::Cmaes es(std::vector<double>(dim, 0.0), 1.0, cornn::Cmaes::default_lambda(dim), 3);
    std::vector<double> f(es.lambda());
    for (auto _ : state) {
        const auto& xs = es.ask();
        for (std::size_t i = 0; i < xs.size(); ++i) f[i] = xs[i][0] * xs[i][0];
        es.tell(f);
    }
}

void bm_mann_whitney(benchmark::State& state) {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> nd;
    std::vector<double> a(30), b(30);
    for (double& v : a) v = nd(gen);
    for (double& v : b) v = nd(gen) + 0.3;
    for (auto _ : state) benchmark::DoNotOptimize(cornn::mann_whitney(a, b));
}

} // namespace

BENCHMARK(bm_train_loss)->DenseRange(0, 5)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_train_loss_and_gradient)->DenseRange(0, 5)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_cmaes_generation)->Arg(41)->Arg(261)->Arg(481)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_mann_whitney);

BENCHMARK_MAIN();
