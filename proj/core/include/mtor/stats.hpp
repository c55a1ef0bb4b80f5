#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mtor {

/// Outcome of the rank-based method comparison. Ranks are assigned within
/// each dataset row (lower score = better = rank 1, ties averaged); the
/// Friedman chi-square tests whether the mean ranks differ at all, and the
/// Fisher LSD pairwise calls are only issued when that omnibus test is
/// significant at alpha.
struct FriedmanFisherResult {
  double statistic = 0.0;
  double p_value = 1.0;
  Eigen::MatrixXd rank_table;  // datasets x methods, per-row average ranks
  Eigen::VectorXd mean_ranks;  // per method
  bool significant = false;    // p_value <= alpha
  double lsd = 0.0;            // least significant rank-mean difference
  // calls(i, j): +1 when method i significantly beats j (lower mean rank),
  // -1 when it significantly loses, 0 when no call is made.
  Eigen::MatrixXi calls;
  std::vector<int> victories;
  std::vector<int> defeats;
  double alpha = 0.05;
};

/// scores: one row per dataset, one column per method, lower = better.
/// Needs at least 2 rows and 2 columns.
FriedmanFisherResult friedman_fisher(const Eigen::MatrixXd& scores, double alpha = 0.05);

}  // namespace mtor
