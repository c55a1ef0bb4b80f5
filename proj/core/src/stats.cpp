#include "mtor/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <string>

#include "mtor/errors.hpp"
#include "mtor/similarity.hpp"

namespace mtor {

FriedmanFisherResult friedman_fisher(const Eigen::MatrixXd& scores, double alpha) {
  const Eigen::Index k = scores.rows();  // datasets (blocks)
  const Eigen::Index M = scores.cols();  // methods (treatments)
  if (k < 2 || M < 2) {
    throw InvalidInputError("rank comparison needs >= 2 datasets and >= 2 methods, got " +
                            std::to_string(k) + " x " + std::to_string(M));
  }
  if (!scores.allFinite()) {
    throw InvalidInputError("rank comparison scores must be finite");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInputError("significance level must lie in (0, 1)");
  }

  FriedmanFisherResult res;
  res.alpha = alpha;
  res.rank_table.resize(k, M);
  for (Eigen::Index i = 0; i < k; ++i) {
    res.rank_table.row(i) = average_ranks(scores.row(i).transpose()).transpose();
  }
  res.mean_ranks = res.rank_table.colwise().mean();

  // Chi-square statistic 12k/(M(M+1)) * sum_j (mean_rank_j - (M+1)/2)^2 with
  // M-1 degrees of freedom. With average ranks every row sums to M(M+1)/2,
  // so the grand mean is exactly (M+1)/2.
  const double center = 0.5 * static_cast<double>(M + 1);
  const double spread = (res.mean_ranks.array() - center).square().sum();
  res.statistic = 12.0 * static_cast<double>(k) /
                  (static_cast<double>(M) * static_cast<double>(M + 1)) * spread;
  const boost::math::chi_squared chi2(static_cast<double>(M - 1));
  res.p_value = boost::math::cdf(boost::math::complement(chi2, res.statistic));
  res.significant = res.p_value <= alpha;

  res.calls = Eigen::MatrixXi::Zero(M, M);
  res.victories.assign(static_cast<std::size_t>(M), 0);
  res.defeats.assign(static_cast<std::size_t>(M), 0);

  if (res.significant) {
    // Randomized-block ANOVA on the ranks: block effects vanish (constant
    // row sums), so the error sum of squares is total minus treatment.
    const double ss_total = (res.rank_table.array() - center).square().sum();
    const double ss_treat = static_cast<double>(k) * spread;
    const double df_error = static_cast<double>((k - 1) * (M - 1));
    const double mse = std::max(0.0, ss_total - ss_treat) / df_error;
    const boost::math::students_t t_dist(df_error);
    const double t_crit = boost::math::quantile(t_dist, 1.0 - alpha / 2.0);
    res.lsd = t_crit * std::sqrt(2.0 * mse / static_cast<double>(k));

    for (Eigen::Index i = 0; i < M; ++i) {
      for (Eigen::Index j = 0; j < M; ++j) {
        if (i == j) continue;
        const double diff = res.mean_ranks(j) - res.mean_ranks(i);
        if (diff > res.lsd) {
          res.calls(i, j) = 1;  // i has the lower mean rank by more than LSD
          ++res.victories[static_cast<std::size_t>(i)];
          ++res.defeats[static_cast<std::size_t>(j)];
        } else if (-diff > res.lsd) {
          res.calls(i, j) = -1;
        }
      }
    }
  }
  return res;
}

}  // namespace mtor
