#include <Eigen/Dense>
#include <cmath>
#include <nlohmann/json.hpp>
#include <random>

#include "doctest.h"
#include "mtor/errors.hpp"
#include "mtor/feature_maps.hpp"
#include "mtor/rng.hpp"

using namespace mtor;

TEST_CASE("differencing: adjacent deltas, invertible given the first value") {
  Eigen::VectorXd series(3);
  series << 1, 3, 6;
  const Eigen::VectorXd d = difference(series);
  CHECK(d.size() == 2);
  CHECK(d(0) == 2.0);
  CHECK(d(1) == 3.0);
  CHECK((undifference(d, series(0)) - series).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::VectorXd constant = Eigen::VectorXd::Constant(5, 4.2);
  CHECK(difference(constant).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(difference(Eigen::VectorXd::Ones(1)), InvalidInputError);
}

TEST_CASE("autoregressive embedding: lagged window plus intercept") {
  Eigen::VectorXd series(4);
  series << 1, 2, 3, 4;
  const ArEmbedding emb = ar_embed(series, 2);
  REQUIRE(emb.X.rows() == 2);
  REQUIRE(emb.X.cols() == 3);
  // Row for target y[2] = 3: most recent value first, then the bias.
  CHECK(emb.X(0, 0) == 2.0);
  CHECK(emb.X(0, 1) == 1.0);
  CHECK(emb.X(0, 2) == 1.0);
  CHECK(emb.y(0) == 3.0);
  CHECK(emb.X(1, 0) == 3.0);
  CHECK(emb.X(1, 1) == 2.0);
  CHECK(emb.y(1) == 4.0);

  CHECK_THROWS_AS(ar_embed(series, 0), InvalidInputError);
  CHECK_THROWS_AS(ar_embed(series, 4), InvalidInputError);  // needs lag + 1 points
}

TEST_CASE("autoregressive embedding: row count bookkeeping at the working sizes") {
  std::mt19937_64 gen(3);
  const Eigen::VectorXd series =
      Eigen::VectorXd::NullaryExpr(400, [&](Eigen::Index) { return standard_normal(gen); });
  // Differencing drops one point; a lag-9 embedding of the remaining 399
  // leaves 390 supervised rows.
  const ArEmbedding emb = ar_embed(difference(series), 9);
  CHECK(emb.X.rows() == 390);
  CHECK(emb.X.cols() == 10);
}

TEST_CASE("autoregressive embedding: a linear recurrence is fit exactly") {
  // y[i] = i satisfies y[i] = 2 y[i-1] - y[i-2], so the lag-2 embedding
  // admits a perfect linear predictor.
  Eigen::VectorXd series(20);
  for (int i = 0; i < 20; ++i) series(i) = i;
  const ArEmbedding emb = ar_embed(series, 2);
  const Eigen::VectorXd w = emb.X.colPivHouseholderQr().solve(emb.y);
  CHECK((emb.X * w - emb.y).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("random feature map: bias plus squashed random projections") {
  const ElmMap elm(2, 5, 42);
  CHECK(elm.input_dim() == 2);
  CHECK(elm.hidden() == 5);
  CHECK(elm.output_dim() == 6);

  // The zero input hits tanh at the origin: all non-bias features vanish.
  const Eigen::VectorXd at_zero = elm.map(Eigen::Vector2d(0, 0));
  CHECK(at_zero(0) == 1.0);
  CHECK(at_zero.tail(5).cwiseAbs().maxCoeff() == 0.0);

  // All hidden weights are drawn from (-1, 1), so features stay in (-1, 1).
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::VectorXd x =
        Eigen::VectorXd::NullaryExpr(2, [&](Eigen::Index) { return standard_normal(gen); });
    const Eigen::VectorXd f = elm.map(x);
    CHECK(f(0) == 1.0);
    CHECK(f.tail(5).cwiseAbs().maxCoeff() < 1.0);
  }
  CHECK(elm.weights().cwiseAbs().maxCoeff() < 1.0);

  CHECK_THROWS_AS(elm.map(Eigen::Vector3d(1, 2, 3)), InvalidInputError);
  CHECK_THROWS_AS(ElmMap(0, 5, 1), InvalidInputError);
  CHECK_THROWS_AS(ElmMap(2, 0, 1), InvalidInputError);
}

TEST_CASE("random feature map: a known single-neuron projection") {
  // One hidden unit: feature = tanh(v . x). Pin the arithmetic by reading
  // the generated weight back out.
  const ElmMap elm(2, 1, 9);
  const Eigen::VectorXd v = elm.weights().row(0).transpose();
  const Eigen::VectorXd x = Eigen::Vector2d(0.5, -1.25);
  const Eigen::VectorXd f = elm.map(x);
  CHECK(f(1) == doctest::Approx(std::tanh(v.dot(x))).epsilon(1e-15));
  CHECK(std::tanh(0.5) == doctest::Approx(0.46211715726000974).epsilon(1e-15));
}

TEST_CASE("random feature map: same seed, same weights, bitwise") {
  const ElmMap a(4, 20, 1234);
  const ElmMap b(4, 20, 1234);
  CHECK((a.weights() - b.weights()).cwiseAbs().maxCoeff() == 0.0);
  const ElmMap c(4, 20, 1235);
  CHECK((a.weights() - c.weights()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("random feature map: row mapping matches per-row mapping") {
  std::mt19937_64 gen(11);
  const ElmMap elm(3, 7, 5);
  const Eigen::MatrixXd X = Eigen::MatrixXd::NullaryExpr(
      6, 3, [&](Eigen::Index, Eigen::Index) { return standard_normal(gen); });
  const Eigen::MatrixXd F = elm.map_rows(X);
  REQUIRE(F.rows() == 6);
  REQUIRE(F.cols() == 8);
  for (Eigen::Index i = 0; i < 6; ++i) {
    CHECK((F.row(i).transpose() - elm.map(X.row(i).transpose())).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("random feature map: json round trip restores the exact map") {
  const ElmMap elm(3, 4, 99);
  const nlohmann::json j = nlohmann::json::parse(elm.to_json().dump());
  const ElmMap back = ElmMap::from_json(j);
  CHECK(back.seed() == elm.seed());
  CHECK((back.weights() - elm.weights()).cwiseAbs().maxCoeff() == 0.0);
  std::mt19937_64 gen(13);
  const Eigen::VectorXd x =
      Eigen::VectorXd::NullaryExpr(3, [&](Eigen::Index) { return standard_normal(gen); });
  CHECK((back.map(x) - elm.map(x)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random feature map composed with a linear model is an expressive contract") {
  // Whatever weights follow the map, the model is linear in the mapped
  // features: the map itself never looks at targets, so two probes mapping
  // to the same features are indistinguishable downstream.
  const ElmMap elm(1, 3, 21);
  const Eigen::VectorXd f1 = elm.map(Eigen::VectorXd::Constant(1, 0.7));
  const Eigen::VectorXd f2 = elm.map(Eigen::VectorXd::Constant(1, 0.7));
  CHECK((f1 - f2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standardizer: training-column moments, constant columns passed through") {
  Eigen::MatrixXd X(4, 2);
  X << 1, 5,
       2, 5,
       3, 5,
       4, 5;
  Standardizer st;
  CHECK_THROWS_AS(st.transform(X), InvalidInputError);  // must fit first
  st.fit(X);
  const Eigen::MatrixXd Z = st.transform(X);
  CHECK(Z.col(0).mean() == doctest::Approx(0.0).epsilon(1e-12));
  const double var = (Z.col(0).array() - Z.col(0).mean()).square().sum() / 3.0;
  CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
  // The constant column is left alone rather than divided by ~0.
  CHECK((Z.col(1) - X.col(1)).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::VectorXd probe = Eigen::Vector2d(2.5, 5.0);
  const Eigen::VectorXd z = st.transform(probe);
  CHECK(z(0) == doctest::Approx((2.5 - 2.5) / std::sqrt(5.0 / 3.0)).epsilon(1e-12));

  const Eigen::VectorXd wrong_size = Eigen::Vector3d(1, 2, 3);
  CHECK_THROWS_AS(st.transform(wrong_size), InvalidInputError);
  Standardizer empty;
  CHECK_THROWS_AS(empty.fit(Eigen::MatrixXd::Ones(1, 2)), InvalidInputError);
}
