#include "mtor/feature_maps.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <random>
#include <string>

#include "mtor/errors.hpp"
#include "mtor/rng.hpp"

namespace mtor {

Eigen::VectorXd difference(const Eigen::VectorXd& series) {
  if (series.size() < 2) {
    throw InvalidInputError("differencing needs at least 2 values, got " +
                            std::to_string(series.size()));
  }
  return series.tail(series.size() - 1) - series.head(series.size() - 1);
}

Eigen::VectorXd undifference(const Eigen::VectorXd& diffs, double initial) {
  Eigen::VectorXd out(diffs.size() + 1);
  out(0) = initial;
  for (Eigen::Index i = 0; i < diffs.size(); ++i) {
    out(i + 1) = out(i) + diffs(i);
  }
  return out;
}

ArEmbedding ar_embed(const Eigen::VectorXd& series, int lag) {
  if (lag < 1) {
    throw InvalidInputError("embedding lag must be >= 1, got " + std::to_string(lag));
  }
  const Eigen::Index n = series.size();
  if (n < lag + 1) {
    throw InvalidInputError("series of length " + std::to_string(n) +
                            " is too short for lag " + std::to_string(lag));
  }
  ArEmbedding emb;
  emb.X.resize(n - lag, lag + 1);
  emb.y.resize(n - lag);
  for (Eigen::Index i = lag; i < n; ++i) {
    const Eigen::Index row = i - lag;
    for (int j = 0; j < lag; ++j) {
      emb.X(row, j) = series(i - 1 - j);
    }
    emb.X(row, lag) = 1.0;
    emb.y(row) = series(i);
  }
  return emb;
}

ElmMap::ElmMap(int input_dim, int hidden, std::uint64_t seed) : seed_(seed) {
  if (input_dim < 1 || hidden < 1) {
    throw InvalidInputError("feature map needs input_dim >= 1 and hidden >= 1");
  }
  std::mt19937_64 gen(seed);
  V_.resize(hidden, input_dim);
  for (int i = 0; i < hidden; ++i) {
    for (int j = 0; j < input_dim; ++j) {
      V_(i, j) = uniform_in(gen, -1.0, 1.0);
    }
  }
}

Eigen::VectorXd ElmMap::map(const Eigen::VectorXd& x) const {
  if (x.size() != V_.cols()) {
    throw InvalidInputError("feature map expects dimension " + std::to_string(V_.cols()) +
                            ", got " + std::to_string(x.size()));
  }
  Eigen::VectorXd out(V_.rows() + 1);
  out(0) = 1.0;
  out.tail(V_.rows()) = (V_ * x).array().tanh();
  return out;
}

Eigen::MatrixXd ElmMap::map_rows(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd out(X.rows(), output_dim());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out.row(i) = map(X.row(i).transpose()).transpose();
  }
  return out;
}

nlohmann::json ElmMap::to_json() const {
  nlohmann::json j;
  j["hidden"] = hidden();
  j["input_dim"] = input_dim();
  j["seed"] = seed_;
  auto& rows = j["weights"] = nlohmann::json::array();
  for (int i = 0; i < V_.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < V_.cols(); ++c) {
      row.push_back(V_(i, c));
    }
    rows.push_back(std::move(row));
  }
  return j;
}

ElmMap ElmMap::from_json(const nlohmann::json& j) {
  ElmMap map;
  map.seed_ = j.at("seed").get<std::uint64_t>();
  const int hidden = j.at("hidden").get<int>();
  const int input_dim = j.at("input_dim").get<int>();
  const auto& rows = j.at("weights");
  if (static_cast<int>(rows.size()) != hidden) {
    throw InvalidInputError("feature map snapshot has inconsistent row count");
  }
  map.V_.resize(hidden, input_dim);
  for (int i = 0; i < hidden; ++i) {
    const auto& row = rows.at(i);
    if (static_cast<int>(row.size()) != input_dim) {
      throw InvalidInputError("feature map snapshot has inconsistent column count");
    }
    for (int c = 0; c < input_dim; ++c) {
      map.V_(i, c) = row.at(c).get<double>();
    }
  }
  return map;
}

void Standardizer::fit(const Eigen::MatrixXd& X) {
  if (X.rows() < 2) {
    throw InvalidInputError("standardizer needs at least 2 rows to fit");
  }
  mean_ = X.colwise().mean();
  Eigen::VectorXd var =
      (X.rowwise() - mean_.transpose()).array().square().colwise().sum() / (X.rows() - 1);
  scale_.resize(var.size());
  for (Eigen::Index j = 0; j < var.size(); ++j) {
    const double sd = std::sqrt(var(j));
    if (sd < 1e-12) {
      // Leave spread-free columns (e.g. the intercept) untouched.
      mean_(j) = 0.0;
      scale_(j) = 1.0;
    } else {
      scale_(j) = sd;
    }
  }
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& X) const {
  if (!fitted()) {
    throw InvalidInputError("standardizer used before fit");
  }
  if (X.cols() != mean_.size()) {
    throw InvalidInputError("standardizer fitted on dimension " + std::to_string(mean_.size()) +
                            ", got " + std::to_string(X.cols()));
  }
  return (X.rowwise() - mean_.transpose()).array().rowwise() /
         scale_.transpose().array();
}

Eigen::VectorXd Standardizer::transform(const Eigen::VectorXd& x) const {
  if (!fitted()) {
    throw InvalidInputError("standardizer used before fit");
  }
  if (x.size() != mean_.size()) {
    throw InvalidInputError("standardizer fitted on dimension " + std::to_string(mean_.size()) +
                            ", got " + std::to_string(x.size()));
  }
  return (x - mean_).cwiseQuotient(scale_);
}

}  // namespace mtor
