#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "mtor/errors.hpp"
#include "mtor/evaluate.hpp"
#include "mtor/grid_search.hpp"
#include "mtor/rng.hpp"
#include "support/oracles.hpp"

using namespace mtor;

namespace {

EmbeddedStream learnable_stream(std::uint64_t seed, int tasks, int d, Eigen::Index rows) {
  std::mt19937_64 gen(seed);
  EmbeddedStream s;
  Eigen::MatrixXd W = Eigen::MatrixXd::NullaryExpr(
      d, tasks, [&](Eigen::Index, Eigen::Index) { return standard_normal(gen); });
  for (int t = 0; t < tasks; ++t) {
    Eigen::MatrixXd X = Eigen::MatrixXd::NullaryExpr(
        rows, d, [&](Eigen::Index, Eigen::Index) { return standard_normal(gen); });
    Eigen::VectorXd y = X * W.col(t);
    for (Eigen::Index i = 0; i < rows; ++i) y(i) += 0.05 * standard_normal(gen);
    s.X.push_back(std::move(X));
    s.y.push_back(std::move(y));
  }
  return s;
}

}  // namespace

TEST_CASE("method names round trip, unknown names are rejected") {
  for (const char* name : {"mt-wrls", "mt-oslssvr", "wrls", "oslssvr", "mogd", "persistence"}) {
    CHECK(method_name(method_from_name(name)) == name);
  }
  CHECK_THROWS_AS(method_from_name("gbdt"), InvalidInputError);
  CHECK_THROWS_AS(method_from_name(""), InvalidInputError);
}

TEST_CASE("default grids: documented axes and sizes") {
  CHECK(default_grid(MethodKind::MtWrls).size() == 66);      // 6 sigma x 11 lambda
  CHECK(default_grid(MethodKind::StlWrls).size() == 66);
  CHECK(default_grid(MethodKind::MtOslssvr).size() == 33);   // 11 lambda x 3 nu
  CHECK(default_grid(MethodKind::StlOslssvr).size() == 33);
  CHECK(default_grid(MethodKind::Mogd).size() == 55);        // 5 eta0 x 11 lambda
  CHECK(default_grid(MethodKind::Persistence).size() == 1);  // nothing to tune

  // First axis is outermost: the wrls grid walks sigma slowest.
  const auto wrls = default_grid(MethodKind::MtWrls);
  CHECK(wrls[0].sigma == 0.01);
  CHECK(wrls[0].lambda == 1e-10);
  CHECK(wrls[1].sigma == 0.01);
  CHECK(wrls[1].lambda == 1e-4);
  CHECK(wrls[11].sigma == 0.2);
  CHECK(wrls.back().sigma == 1.0);
  CHECK(wrls.back().lambda == 1e10);

  const auto osl = default_grid(MethodKind::MtOslssvr);
  CHECK(osl[0].lambda == 1e-10);
  CHECK(osl[0].nu == 1e-3);
  CHECK(osl[2].nu == 1e-1);
  CHECK(osl[3].lambda == 1e-4);
}

TEST_CASE("grid overrides: custom axes replace only what they name") {
  GridAxes axes;
  axes.lambda = std::vector<double>{0.5, 2.0};
  const auto grid = build_grid(MethodKind::MtWrls, axes);
  CHECK(grid.size() == 12);  // 6 sigma x 2 lambda
  CHECK(grid[0].lambda == 0.5);
  CHECK(grid[1].lambda == 2.0);

  GridAxes empty_axis;
  empty_axis.sigma = std::vector<double>{};
  CHECK_THROWS_AS(build_grid(MethodKind::MtWrls, empty_axis), InvalidInputError);
}

TEST_CASE("selection: lowest training error wins, ties go to the earlier candidate") {
  const EmbeddedStream stream = learnable_stream(3, 2, 3, 60);
  const SimilarityMatrix sims = SimilarityMatrix::edgeless(2);

  SUBCASE("a singleton grid selects its only member") {
    std::vector<HyperParams> grid(1);
    grid[0].sigma = 1.0;
    grid[0].lambda = 0.5;
    const GridSearchResult r =
        grid_search(MethodKind::MtWrls, stream, 40, sims, 1.0, grid, 512);
    CHECK(r.best.lambda == 0.5);
    CHECK(r.scored.size() == 1);
    CHECK(std::isfinite(r.best_rmse));
  }

  SUBCASE("duplicate candidates: the first of the equals is returned") {
    std::vector<HyperParams> grid(2);
    grid[0].sigma = 1.0;
    grid[0].lambda = 2.0;
    grid[1] = grid[0];
    const GridSearchResult r =
        grid_search(MethodKind::MtWrls, stream, 40, sims, 1.0, grid, 512);
    CHECK(r.scored[0].second == r.scored[1].second);
    CHECK(r.best.lambda == grid[0].lambda);
    CHECK(r.best_rmse == r.scored[0].second);
  }

  SUBCASE("a frozen-shrinkage candidate loses to a learnable one") {
    std::vector<HyperParams> grid(2);
    grid[0].sigma = 1.0;
    grid[0].lambda = 1e10;  // predicts ~0 forever
    grid[1].sigma = 1.0;
    grid[1].lambda = 1.0;
    const GridSearchResult r =
        grid_search(MethodKind::MtWrls, stream, 40, sims, 1.0, grid, 512);
    CHECK(r.best.lambda == 1.0);
    CHECK(r.scored[1].second < r.scored[0].second);
  }
}

TEST_CASE("selection: failed candidates score infinity; all failing raises") {
  const EmbeddedStream stream = learnable_stream(5, 2, 3, 30);
  const SimilarityMatrix sims = SimilarityMatrix::edgeless(2);
  std::vector<HyperParams> grid(2);
  grid[0].sigma = 1.0;
  grid[0].lambda = -1.0;  // invalid: the model refuses to construct
  grid[1].sigma = 1.0;
  grid[1].lambda = 1.0;
  const GridSearchResult r =
      grid_search(MethodKind::MtWrls, stream, 20, sims, 1.0, grid, 512);
  CHECK(std::isinf(r.scored[0].second));
  CHECK(r.best.lambda == 1.0);

  std::vector<HyperParams> hopeless(2);
  hopeless[0].lambda = -1.0;
  hopeless[1].lambda = -2.0;
  CHECK_THROWS_AS(grid_search(MethodKind::MtWrls, stream, 20, sims, 1.0, hopeless, 512),
                  NumericalBreakdownError);
}

TEST_CASE("factories build the method they name") {
  const EmbeddedStream stream = learnable_stream(7, 2, 3, 40);
  const SimilarityMatrix sims = SimilarityMatrix::edgeless(2);
  HyperParams p;
  p.sigma = 1.0;
  p.lambda = 1.0;
  p.nu = 1e-2;
  p.eta0 = 0.1;
  for (MethodKind kind :
       {MethodKind::MtWrls, MethodKind::MtOslssvr, MethodKind::StlWrls,
        MethodKind::StlOslssvr, MethodKind::Mogd, MethodKind::Persistence}) {
    const ModelFactory f = make_factory(kind, p, sims, 1.0, stream.dim(), 512);
    auto model = f();
    REQUIRE(model != nullptr);
    // Every method observes the same contract: finite prediction per step.
    const double pred = model->step(0, stream.X[0].row(0).transpose(), stream.y[0](0));
    CHECK(std::isfinite(pred));
    if (kind == MethodKind::Persistence) CHECK(pred == 0.0);
  }
}

TEST_CASE("grid search runs each candidate on a fresh model over the training prefix") {
  // The same search twice gives identical scores: no state bleeds between
  // candidates or repetitions.
  const EmbeddedStream stream = learnable_stream(11, 2, 3, 50);
  const SimilarityMatrix sims = SimilarityMatrix::edgeless(2);
  const auto grid = build_grid(MethodKind::Mogd, GridAxes{});
  const GridSearchResult r1 =
      grid_search(MethodKind::Mogd, stream, 35, sims, 1.0, grid, 512);
  const GridSearchResult r2 =
      grid_search(MethodKind::Mogd, stream, 35, sims, 1.0, grid, 512);
  REQUIRE(r1.scored.size() == r2.scored.size());
  for (std::size_t i = 0; i < r1.scored.size(); ++i) {
    CHECK(r1.scored[i].second == r2.scored[i].second);
  }
  CHECK(r1.best_rmse == r2.best_rmse);
}
