#include <benchmark/benchmark.h>

#include <random>

#include "structce/classical_estimators.hpp"
#include "structce/structnet.hpp"

using namespace structce;

namespace {

Eigen::MatrixXcd random_channel(int n, Rng& rng) {
  Eigen::MatrixXcd h(n, n);
  for (Eigen::Index j = 0; j < h.size(); ++j) h.data()[j] = complex_gaussian(rng, 1.0);
  return h;
}

std::vector<Eigen::VectorXd> interference_of(int n, Rng& rng) {
  const auto m = init_model(random_channel(n, rng), 0, TrainConfig{}, 1);
  return m.interference;
}

void BM_ModuloForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  const auto h = interference_of(n, rng);
  const Eigen::VectorXd z = Eigen::VectorXd::Random(2 * n) * 5.0;
  for (auto _ : state) benchmark::DoNotOptimize(iil_modulo_forward(z, h, 1e-6));
}
BENCHMARK(BM_ModuloForward)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_ShiftingForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  const auto h = interference_of(n, rng);
  const Eigen::VectorXd z = Eigen::VectorXd::Random(2 * n);
  const std::span<const Eigen::VectorXd> span(h.data(), static_cast<std::size_t>(n - 1));
  for (auto _ : state) benchmark::DoNotOptimize(iil_shifting_forward(z, span, 3));
}
BENCHMARK(BM_ShiftingForward)->Arg(2)->Arg(3)->Arg(4)->Arg(5);

void BM_TrainEpoch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  TrainConfig cfg;
  cfg.iil_kind = state.range(1) == 0 ? IilKind::Modulo : IilKind::Shifting;
  Rng rng(2);
  const Constellation c(16);
  std::uniform_int_distribution<std::size_t> pick(0, c.points().size() - 1);
  const Eigen::MatrixXcd h = random_channel(n, rng);
  std::vector<PilotObservation> obs;
  for (int k = 0; k < 16; ++k) {
    Eigen::VectorXcd x(n);
    for (int t = 0; t < n; ++t) x(t) = c.points()[pick(rng)];
    obs.push_back({x(0).real(), realify_signal(h * x)});
  }
  StructNetModel model = init_model(h, 0, cfg, 3);
  StructNetTrainer trainer(model, make_training_samples(obs, c), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(trainer.run_epoch());
}
BENCHMARK(BM_TrainEpoch)->Args({2, 0})->Args({2, 1})->Args({4, 0})->Args({4, 1})->Args({8, 0});

void BM_LeastSquares(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(4);
  const Eigen::MatrixXcd x = random_channel(n, rng);
  const Eigen::MatrixXcd y = random_channel(n, rng) * x;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_ls(y, x));
}
BENCHMARK(BM_LeastSquares)->Arg(2)->Arg(8);

void BM_LmmseSmoothing(benchmark::State& state) {
  const int n_sc = static_cast<int>(state.range(0));
  Rng rng(5);
  const Eigen::MatrixXcd a = random_channel(n_sc, rng);
  const Eigen::MatrixXcd r = a * a.adjoint() / n_sc;
  const Eigen::VectorXcd h = random_channel(n_sc, rng).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_lmmse(h, r, 0.1, 10.0));
}
BENCHMARK(BM_LmmseSmoothing)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
