// Microbenchmarks for the training inner loop and its feeders. The sampled
// gradient step dominates wall time in practice, so most cases sweep the
// knobs that change its cost: dimension, negatives, vocabulary.
#include <benchmark/benchmark.h>

#include <vector>

#include "sne/eval.hpp"
#include "sne/model.hpp"
#include "sne/rng.hpp"
#include "sne/synthetic.hpp"
#include "sne/walk.hpp"

namespace {

using namespace sne;

SneModel make_model(std::size_t n, int dim) {
  SneModel m = SneModel::init(n, dim, 1);
  Rng rng(2);
  for (auto& b : m.bias) b = rng.next_uniform(-0.5, 0.5);
  return m;
}

WalkSample make_sample(std::size_t n, std::size_t l) {
  Rng rng(3);
  WalkSample s;
  for (std::size_t i = 0; i < l; ++i) {
    s.path.push_back(static_cast<NodeId>(rng.next_below(n)));
    s.signs.push_back(i % 2 == 0 ? Sign::Positive : Sign::Negative);
  }
  s.target = static_cast<NodeId>(rng.next_below(n));
  return s;
}

SignedGraph make_benchmark_graph(std::uint32_t community) {
  SyntheticConfig cfg;
  cfg.community_size = community;
  cfg.p_intra = 0.05;
  cfg.p_inter = 0.05;
  cfg.seed = 1;
  return make_two_community_graph(cfg);
}

void BM_PredictEmbedding(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const std::size_t l = static_cast<std::size_t>(state.range(1));
  const SneModel m = make_model(1000, dim);
  const WalkSample s = make_sample(1000, l);
  for (auto _ : state) benchmark::DoNotOptimize(predict_embedding(m, s));
}
BENCHMARK(BM_PredictEmbedding)->Args({100, 1})->Args({100, 3})->Args({100, 10});

void BM_SampledGradientStep(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const std::size_t n = 10000;
  SneModel m = make_model(n, dim);
  AdagradState ada = AdagradState::init(m);
  const WalkSample s = make_sample(n, 3);
  SampledSoftmaxConfig cfg;
  cfg.num_samples = k;
  const NegativeSampler sampler = NegativeSampler::uniform(n);
  Rng rng(4);
  for (auto _ : state) {
    LossGrad lg = sampled_softmax_nll_grad(m, s, cfg, sampler, rng);
    adagrad_step(m, ada, lg.grads);
    benchmark::DoNotOptimize(m.src.data());
  }
}
BENCHMARK(BM_SampledGradientStep)
    ->Args({100, 64})
    ->Args({100, 512})
    ->Args({32, 64})
    ->Args({32, 512});

void BM_FullSoftmaxGradient(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const SneModel m = make_model(n, 100);
  const WalkSample s = make_sample(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(full_softmax_nll_grad(m, s));
}
BENCHMARK(BM_FullSoftmaxGradient)->Arg(1000)->Arg(10000);

void BM_NegativeDraws(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const NegativeSampler sampler = NegativeSampler::uniform(100000);
  Rng rng(5);
  std::vector<NodeId> out;
  for (auto _ : state) {
    sampler.draw_distinct(k, 7, rng, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_NegativeDraws)->Arg(64)->Arg(512);

void BM_CorpusGeneration(benchmark::State& state) {
  const SignedGraph g = make_benchmark_graph(static_cast<std::uint32_t>(state.range(0)));
  WalkConfig cfg;
  cfg.walk_length = 40;
  cfg.walks_per_node = 2;
  cfg.window_path_len = 3;
  cfg.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(generate_samples(g, cfg));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(g.num_nodes()) *
                          cfg.walks_per_node);
}
BENCHMARK(BM_CorpusGeneration)->Arg(100)->Arg(400);

void BM_EdgeFeature(benchmark::State& state) {
  const auto op = static_cast<EdgeOperator>(state.range(0));
  Rng rng(6);
  std::vector<double> u(200), v(200);
  for (auto& x : u) x = rng.next_uniform(-1, 1);
  for (auto& x : v) x = rng.next_uniform(-1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(compose_edge_feature(u, v, op));
}
BENCHMARK(BM_EdgeFeature)
    ->Arg(static_cast<int>(EdgeOperator::Average))
    ->Arg(static_cast<int>(EdgeOperator::Hadamard))
    ->Arg(static_cast<int>(EdgeOperator::L1Weight))
    ->Arg(static_cast<int>(EdgeOperator::L2Weight));

}  // namespace

BENCHMARK_MAIN();
