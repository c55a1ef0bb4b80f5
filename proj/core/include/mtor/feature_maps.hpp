#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>

namespace mtor {

/// First differences: out[i] = series[i+1] - series[i], length n - 1.
Eigen::VectorXd difference(const Eigen::VectorXd& series);

/// Inverse of difference given the first raw value; returns length n + 1.
Eigen::VectorXd undifference(const Eigen::VectorXd& diffs, double initial);

/// Autoregressive design matrix paired with its targets.
struct ArEmbedding {
  Eigen::MatrixXd X;  // rows: (y[i-1], ..., y[i-lag], 1)
  Eigen::VectorXd y;  // y[i] for i = lag .. n-1
};

/// Embeds a series with the given lag; each row carries the lag most recent
/// values newest-first plus a trailing constant 1 for the intercept.
ArEmbedding ar_embed(const Eigen::VectorXd& series, int lag);

/// Random-feature map: a fixed hidden layer of tanh units with weights drawn
/// uniformly from [-1, 1]. Output is (1, tanh(v_1 . x), ..., tanh(v_H . x)),
/// so mapped inputs have dimension hidden + 1. The draw order (row by row,
/// left to right, via the portable generator) makes a seed reproducible
/// across platforms.
class ElmMap {
 public:
  ElmMap(int input_dim, int hidden, std::uint64_t seed);

  Eigen::VectorXd map(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd map_rows(const Eigen::MatrixXd& X) const;

  int input_dim() const { return static_cast<int>(V_.cols()); }
  int hidden() const { return static_cast<int>(V_.rows()); }
  int output_dim() const { return hidden() + 1; }
  std::uint64_t seed() const { return seed_; }
  const Eigen::MatrixXd& weights() const { return V_; }

  nlohmann::json to_json() const;
  /// Restores from a snapshot; the stored weights are authoritative, the
  /// seed is kept for bookkeeping only.
  static ElmMap from_json(const nlohmann::json& j);

 private:
  ElmMap() = default;
  std::uint64_t seed_ = 0;
  Eigen::MatrixXd V_;
};

/// Per-column affine normalization fitted on training rows only. Columns
/// with (near-)zero spread pass through untouched so constant intercept
/// columns survive.
class Standardizer {
 public:
  void fit(const Eigen::MatrixXd& X);
  Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;
  Eigen::VectorXd transform(const Eigen::VectorXd& x) const;
  bool fitted() const { return mean_.size() > 0; }

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;
};

}  // namespace mtor
