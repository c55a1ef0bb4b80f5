#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace mtor {

/// 1-based ascending ranks of the values; tied values share the mean of the
/// positions they occupy.
Eigen::VectorXd average_ranks(const Eigen::VectorXd& values);

/// Spearman rank correlation of two equal-length series (average ranks on
/// ties), clamped to [0, 1] as max(0, rho).
///
/// Throws InvalidInputError on length mismatch or length < 3 and
/// UndefinedCorrelationError when either series is constant.
double spearman_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// T x T pairwise task similarities. Entries lie in [0, 1], the diagonal is
/// exactly zero, and asymmetry is allowed: entry (t, j) is the influence of
/// task j on task t and need not match entry (j, t). An entry > 0 marks an
/// edge of the task graph.
class SimilarityMatrix {
 public:
  /// Validates and adopts an arbitrary user-provided matrix (asymmetric
  /// graphs enter through here).
  explicit SimilarityMatrix(Eigen::MatrixXd entries);

  /// All-zero (edgeless) graph over `tasks` tasks.
  static SimilarityMatrix edgeless(int tasks);

  /// Symmetric similarities from per-task series: entry (t, j) = clamped
  /// Spearman correlation of series t and j. Undefined correlations
  /// (constant series) are substituted with 0.
  static SimilarityMatrix from_series(const std::vector<Eigen::VectorXd>& series);

  static SimilarityMatrix load_csv(const std::string& path);
  void save_csv(const std::string& path) const;

  int tasks() const { return static_cast<int>(entries_.rows()); }
  double operator()(int t, int j) const { return entries_(t, j); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  bool is_symmetric(double tol = 1e-12) const;

 private:
  Eigen::MatrixXd entries_;
};

}  // namespace mtor
