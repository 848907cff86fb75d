#include <memory>

#include <benchmark/benchmark.h>

#include "anomalens/contribution/contribution.hpp"
#include "anomalens/detection/autoencoder_detector.hpp"
#include "anomalens/detection/pca.hpp"
#include "anomalens/eval/roc.hpp"
#include "anomalens/multimodal/mae.hpp"
#include "anomalens/nn/train.hpp"
#include "anomalens/rng.hpp"

using namespace anomalens;

namespace {

Matrix uniform_matrix(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.uniform();
  return m;
}

nn::DenseNetwork bottleneck(Index n, Index hidden, Rng& rng) {
  const Index widths[] = {hidden, n};
  const nn::Activation acts[] = {nn::Activation::kSigmoid, nn::Activation::kSigmoid};
  return nn::DenseNetwork::glorot(n, widths, acts, rng);
}

void BM_Forward(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(1);
  const auto net = bottleneck(n, 10, rng);
  const Vector x = uniform_matrix(rng, n, 1).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(net.output(x));
}
BENCHMARK(BM_Forward)->Arg(100)->Arg(1000);

void BM_GradInput(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(2);
  const auto net = bottleneck(n, 10, rng);
  const Vector x = uniform_matrix(rng, n, 1).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(nn::grad_input(net, x));
}
BENCHMARK(BM_GradInput)->Arg(100)->Arg(1000);

void BM_TrainEpoch(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(3);
  const auto net = bottleneck(n, 10, rng);
  const Dataset data = uniform_matrix(rng, n, 1000);
  const nn::TrainConfig cfg{.epochs = 1, .batch_size = 50, .learning_rate = 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(nn::sgd_train(net, data, cfg));
  state.SetItemsProcessed(state.iterations() * data.cols());
}
BENCHMARK(BM_TrainEpoch)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Contribution(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(4);
  const Dataset train = uniform_matrix(rng, n, 500);
  const Index hidden[] = {10};
  const auto plan = detection::ActivationPlan::uniform(1, nn::Activation::kSigmoid, nn::Activation::kSigmoid);
  const auto det = detection::train_detector(train, hidden, plan, {.epochs = 5, .batch_size = 50, .learning_rate = 0.5});
  Vector x = train.col(0);
  x.head(n / 10).array() += 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(contribution::estimate_contribution(det, x));
}
BENCHMARK(BM_Contribution)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_PcaFit(benchmark::State& state) {
  Rng rng(5);
  const Dataset train = uniform_matrix(rng, state.range(0), 2000);
  for (auto _ : state) benchmark::DoNotOptimize(detection::PcaBaseline::fit(train, 10));
}
BENCHMARK(BM_PcaFit)->Arg(122)->Unit(benchmark::kMillisecond);

void BM_MaeWeightedMse(benchmark::State& state) {
  Rng rng(6);
  multimodal::ModalitySchema s{{{"flow", 32, 6}, {"mib", 16, 4}, {"syslog", 68, 10}}, 8};
  const auto net = multimodal::MaeNetwork::glorot(s, rng);
  const std::vector<Vector> in{uniform_matrix(rng, 32, 1).col(0), uniform_matrix(rng, 16, 1).col(0),
                               uniform_matrix(rng, 68, 1).col(0)};
  const double w[] = {0.2, 0.3, 0.5};
  std::vector<Vector> grad;
  for (auto _ : state) benchmark::DoNotOptimize(net.weighted_mse(in, w, nullptr, &grad));
}
BENCHMARK(BM_MaeWeightedMse);

void BM_Roc(benchmark::State& state) {
  Rng rng(7);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> scores(n);
  std::unique_ptr<bool[]> labels(new bool[n]);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = rng.bernoulli(0.4);
    scores[i] = rng.normal() + (labels[i] ? 1.0 : 0.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(eval::roc_auc(scores, std::span<const bool>(labels.get(), n)));
}
BENCHMARK(BM_Roc)->Arg(22544);

}  // namespace
BENCHMARK_MAIN();
