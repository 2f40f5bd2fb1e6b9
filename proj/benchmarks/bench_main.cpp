#include <benchmark/benchmark.h>

#include "steinerwl/dataset.hpp"
#include "steinerwl/inference.hpp"
#include "steinerwl/model.hpp"
#include "steinerwl/oracle.hpp"
#include "steinerwl/random.hpp"
#include "steinerwl/tree.hpp"

using namespace steinerwl;

namespace {

std::vector<Net> nets_of_degree(int degree, std::size_t n = 64) {
    SyntheticOptions o;
    o.degrees = {degree, degree};
    std::vector<Net> nets;
    for (std::size_t i = 0; i < n; ++i) nets.push_back(sample_synthetic_net(derive_seed(77, i), o));
    return nets;
}

ModelConfig config_with_layers(int layers) {
    ModelConfig c;
    c.layers = layers;
    return c;
}

void BM_Mst(benchmark::State& state) {
    const auto nets = nets_of_degree(static_cast<int>(state.range(0)));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mst_length(nets[i++ % nets.size()].pins));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Mst)->Arg(5)->Arg(16)->Arg(64);

void BM_HananGraph(benchmark::State& state) {
    const auto nets = nets_of_degree(static_cast<int>(state.range(0)));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(featurize(build_hanan_graph(nets[i++ % nets.size()])));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HananGraph)->Arg(5)->Arg(16)->Arg(64);

void BM_ExactRsmt(benchmark::State& state) {
    const auto nets = nets_of_degree(static_cast<int>(state.range(0)));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact_rsmt(nets[i++ % nets.size()]).wl);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ExactRsmt)->DenseRange(4, 8, 2)->Unit(benchmark::kMicrosecond);

void BM_IteratedOneSteiner(benchmark::State& state) {
    const auto nets = nets_of_degree(static_cast<int>(state.range(0)));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(iterated_one_steiner(nets[i++ % nets.size()]).wl);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_IteratedOneSteiner)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_Forward(benchmark::State& state) {
    const auto nets = nets_of_degree(static_cast<int>(state.range(0)), 16);
    const auto params = init_params<float>(config_with_layers(static_cast<int>(state.range(1))));
    std::vector<GraphBatch<float>> batches;
    for (const Net& n : nets) batches.push_back(make_batch<float>(featurize(build_hanan_graph(n))));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(params, batches[i++ % batches.size()]));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Forward)
    ->ArgsProduct({{5, 16, 40}, {2, 4, 8}})
    ->ArgNames({"degree", "layers"})
    ->Unit(benchmark::kMicrosecond);

void BM_ForwardBackward(benchmark::State& state) {
    const auto nets = nets_of_degree(8, 16);
    const auto params = init_params<float>(config_with_layers(4));
    std::vector<GraphBatch<float>> batches;
    std::vector<std::vector<std::uint8_t>> labels;
    for (const Net& n : nets) {
        const LabeledSample s = label_sample(n);
        batches.push_back(make_batch<float>(featurize(s.graph)));
        std::vector<std::uint8_t> y(s.graph.n_pins, 0);
        y.insert(y.end(), s.labels.labels.begin(), s.labels.labels.end());
        labels.push_back(std::move(y));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        const std::size_t k = i++ % batches.size();
        ForwardCache<float> cache;
        const auto z = forward(params, batches[k], &cache);
        const auto loss = bce_loss(z, labels[k], batches[k].candidate);
        benchmark::DoNotOptimize(backward(params, batches[k], cache, loss.d_logits));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ForwardBackward)->Unit(benchmark::kMicrosecond);

void BM_InferMany(benchmark::State& state) {
    const auto nets = nets_of_degree(8, 512);
    const auto params = init_params<float>(config_with_layers(4));
    InferenceOptions o;
    o.batch_size = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(infer_many(nets, params, o).seconds);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(nets.size()));
}
BENCHMARK(BM_InferMany)->RangeMultiplier(2)->Range(1, 32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
