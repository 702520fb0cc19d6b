#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "glyphrec/dataset.hpp"
#include "glyphrec/features.hpp"
#include "glyphrec/image.hpp"
#include "glyphrec/mlp.hpp"
#include "glyphrec/pipeline.hpp"
#include "glyphrec/svm.hpp"

using namespace glyphrec;

namespace {

const BinaryImage& raw_glyph() {
    static const BinaryImage img = synth_glyphs(1, 1, 0.02, 7).images[0];
    return img;
}

const BinaryImage& normalized_glyph() {
    static const BinaryImage img = normalize(raw_glyph());
    return img;
}

const BinaryImage& thinned_glyph() {
    static const BinaryImage img = thin(normalized_glyph());
    return img;
}

std::vector<double> random_vector(std::mt19937_64& rng, int dim) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> v(dim);
    for (double& x : v) x = unit(rng);
    return v;
}

std::vector<LabeledSample> random_samples(int n, int dim, int classes,
                                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<LabeledSample> data;
    data.reserve(n);
    for (int i = 0; i < n; ++i) {
        auto x = random_vector(rng, dim);
        const int label = i % classes;
        x[label] += 1.5;  // make the classes separable
        data.push_back({std::move(x), label});
    }
    return data;
}

}  // namespace

static void BM_Normalize(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(normalize(raw_glyph()));
}
BENCHMARK(BM_Normalize);

static void BM_Thin(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(thin(normalized_glyph()));
}
BENCHMARK(BM_Thin);

static void BM_ExtractShadow(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(extract_shadow(normalized_glyph()));
}
BENCHMARK(BM_ExtractShadow);

static void BM_ExtractChainHistogram(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(extract_chain_histogram(normalized_glyph()));
}
BENCHMARK(BM_ExtractChainHistogram);

static void BM_ExtractViews(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(extract_views(thinned_glyph()));
}
BENCHMARK(BM_ExtractViews);

static void BM_ExtractLongestRun(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(extract_longest_run(normalized_glyph()));
}
BENCHMARK(BM_ExtractLongestRun);

static void BM_ExtractAll(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(extract_all(raw_glyph()));
}
BENCHMARK(BM_ExtractAll);

static void BM_MlpTrainEpoch(benchmark::State& state) {
    const auto data = random_samples(200, 44, 10, 11);
    MlpConfig cfg;
    cfg.input_dim = 44;
    cfg.hidden_dim = 40;
    cfg.output_dim = 49;
    cfg.epochs = 1;
    cfg.seed = 3;
    for (auto _ : state) benchmark::DoNotOptimize(train_mlp(data, cfg));
}
BENCHMARK(BM_MlpTrainEpoch);

static void BM_MlpForward(benchmark::State& state) {
    MlpConfig cfg;
    cfg.input_dim = 368;
    cfg.hidden_dim = 40;
    cfg.output_dim = 49;
    cfg.seed = 3;
    const MlpModel model = init_mlp(cfg);
    std::mt19937_64 rng(5);
    const auto x = random_vector(rng, 368);
    for (auto _ : state) benchmark::DoNotOptimize(forward(model, x));
}
BENCHMARK(BM_MlpForward);

static void BM_KernelRbf(benchmark::State& state) {
    std::mt19937_64 rng(9);
    const auto a = random_vector(rng, 368);
    const auto b = random_vector(rng, 368);
    const Kernel k{Kernel::Tag::Rbf, default_sigma(368), 2};
    for (auto _ : state) benchmark::DoNotOptimize(kernel_eval(k, a, b));
}
BENCHMARK(BM_KernelRbf);

static void BM_SmoTrainBinary(benchmark::State& state) {
    auto data = random_samples(60, 10, 2, 17);
    for (auto& s : data) s.label = s.label == 0 ? -1 : +1;
    const Kernel k{Kernel::Tag::Rbf, default_sigma(10), 2};
    for (auto _ : state)
        benchmark::DoNotOptimize(train_binary(data, k, 10.0));
}
BENCHMARK(BM_SmoTrainBinary);

static void BM_SvmPredict(benchmark::State& state) {
    const auto data = random_samples(100, 20, 5, 23);
    const Kernel k{Kernel::Tag::Rbf, default_sigma(20), 2};
    const SvmModel model =
        train_multiclass(data, MulticlassScheme::OneVsRest, k, 10.0, 5);
    std::mt19937_64 rng(29);
    const auto x = random_vector(rng, 20);
    for (auto _ : state) benchmark::DoNotOptimize(predict(model, x));
}
BENCHMARK(BM_SvmPredict);

BENCHMARK_MAIN();
