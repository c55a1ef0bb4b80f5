#pragma once

#include <Eigen/Dense>

#include "mtor/similarity.hpp"

namespace mtor {

/// Interaction matrix of the graph regularizer: diagonal entries
/// gamma + row-sum of similarities, off-diagonal (t, j) = -sim(t, j).
/// No normalization is applied. Throws InvalidInputError for gamma < 0.
Eigen::MatrixXd build_interaction_matrix(const SimilarityMatrix& sims, double gamma);

/// Factorization-based inverse with a condition estimate. Rejects inputs with
/// estimated condition number above 1e12, or whose inverse cannot reach
/// max-norm residual 1e-10, with a SingularMatrixError advising a larger
/// gamma. The returned inverse satisfies ||A * A_inv - I||_max <= 1e-10.
Eigen::MatrixXd invert_interaction_matrix(const Eigen::MatrixXd& A);

/// Task-relationship structure shared by both recursive learners: the
/// similarities, the penalty weights (lambda for the structural term, gamma
/// for general shrinkage), the interaction matrix A and its inverse.
/// Immutable after construction and safe to share read-only across threads.
class TaskGraph {
 public:
  TaskGraph(SimilarityMatrix sims, double gamma, double lambda);

  int tasks() const { return sims_.tasks(); }
  double gamma() const { return gamma_; }
  double lambda() const { return lambda_; }
  const SimilarityMatrix& sims() const { return sims_; }
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::MatrixXd& A_inv() const { return A_inv_; }

  /// Estimated 2-norm condition number of A, recorded at construction.
  double condition_estimate() const { return cond_; }

  void check_task(int task) const;  // throws InvalidInputError when out of range

 private:
  SimilarityMatrix sims_;
  double gamma_;
  double lambda_;
  Eigen::MatrixXd A_;
  Eigen::MatrixXd A_inv_;
  double cond_ = 0.0;
};

}  // namespace mtor
