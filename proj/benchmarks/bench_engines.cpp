// Microbenchmarks for the per-step costs that dominate long streams: the
// stacked least-squares update (quadratic in d*T), the sparse kernel update
// (quadratic in the dictionary size, set by nu), and a single kernel
// evaluation (linear in d).

#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "mtor/mt_oslssvr.hpp"
#include "mtor/mt_wrls.hpp"
#include "mtor/rng.hpp"
#include "mtor/task_graph.hpp"

namespace {

using namespace mtor;

std::shared_ptr<const TaskGraph> uniform_graph(int tasks, double lambda) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(tasks, tasks, 0.5);
  s.diagonal().setZero();
  return std::make_shared<const TaskGraph>(SimilarityMatrix(s), 1.0, lambda);
}

struct SamplePool {
  std::vector<MtSample> samples;
  std::size_t next = 0;

  SamplePool(int tasks, Eigen::Index d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    for (int i = 0; i < 64; ++i) {
      MtSample smp;
      smp.task = i % tasks;
      smp.x = Eigen::VectorXd::NullaryExpr(d, [&](Eigen::Index) { return standard_normal(gen); });
      smp.y = standard_normal(gen);
      samples.push_back(std::move(smp));
    }
  }

  const MtSample& draw() {
    const MtSample& s = samples[next];
    next = (next + 1) % samples.size();
    return s;
  }
};

void BM_StackedLeastSquaresStep(benchmark::State& state) {
  const int tasks = static_cast<int>(state.range(0));
  const Eigen::Index d = 10;
  MtWrlsModel model(uniform_graph(tasks, 1.0), d, 1.0);
  SamplePool pool(tasks, d, 42);
  for (auto _ : state) {
    const MtSample& s = pool.draw();
    benchmark::DoNotOptimize(model.step(s.task, s.x, s.y));
  }
  state.counters["stacked_dim"] = static_cast<double>(tasks) * static_cast<double>(d);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StackedLeastSquaresStep)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_SparseKernelStep(benchmark::State& state) {
  const double nu = std::pow(10.0, -static_cast<double>(state.range(0)));
  const int tasks = 5;
  const Eigen::Index d = 10;
  OslssvrState model(uniform_graph(tasks, 1.0), 1.0, nu, 2048);
  SamplePool pool(tasks, d, 43);
  for (int i = 0; i < 300; ++i) {  // reach the dictionary's steady state
    const MtSample& s = pool.draw();
    model.step(s.task, s.x, s.y);
  }
  for (auto _ : state) {
    const MtSample& s = pool.draw();
    benchmark::DoNotOptimize(model.step(s.task, s.x, s.y));
  }
  state.counters["dictionary"] = model.dictionary().size();
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SparseKernelStep)->Arg(1)->Arg(2)->Arg(3);  // nu = 1e-1, 1e-2, 1e-3

void BM_KernelEval(benchmark::State& state) {
  const Eigen::Index d = state.range(0);
  const auto graph = uniform_graph(5, 1.0);
  std::mt19937_64 gen(44);
  const Eigen::VectorXd a =
      Eigen::VectorXd::NullaryExpr(d, [&](Eigen::Index) { return standard_normal(gen); });
  const Eigen::VectorXd b =
      Eigen::VectorXd::NullaryExpr(d, [&](Eigen::Index) { return standard_normal(gen); });
  for (auto _ : state) {
    benchmark::DoNotOptimize(mt_kernel_eval(a, 1, b, 3, *graph));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_KernelEval)->Arg(8)->Arg(64)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
