#include "mtor/task_graph.hpp"

#include <Eigen/SVD>
#include <limits>
#include <string>

#include "mtor/errors.hpp"

namespace mtor {

Eigen::MatrixXd build_interaction_matrix(const SimilarityMatrix& sims, double gamma) {
  if (!(gamma >= 0.0)) throw InvalidInputError("interaction matrix: gamma must be >= 0");
  const int T = sims.tasks();
  Eigen::MatrixXd A = -sims.entries();
  for (int t = 0; t < T; ++t) {
    A(t, t) = gamma + sims.entries().row(t).sum();
  }
  return A;
}

Eigen::MatrixXd invert_interaction_matrix(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() < 1) {
    throw InvalidInputError("invert: matrix must be square");
  }
  const Eigen::Index T = A.rows();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(T - 1);
  if (smin <= 0.0 || smax / smin > 1e12) {
    throw SingularMatrixError(
        "interaction matrix is singular or too ill-conditioned (cond > 1e12); "
        "increase gamma");
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::MatrixXd inv = lu.inverse();

  // Newton refinement: X <- X + X(I - AX). Squares the residual each pass.
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(T, T);
  double resid = (A * inv - I).cwiseAbs().maxCoeff();
  for (int pass = 0; pass < 3 && resid > 1e-12; ++pass) {
    const Eigen::MatrixXd R = I - A * inv;
    const Eigen::MatrixXd refined = inv + inv * R;
    const double next = (A * refined - I).cwiseAbs().maxCoeff();
    if (next >= resid) break;
    inv = refined;
    resid = next;
  }
  if (resid > 1e-10) {
    throw SingularMatrixError(
        "interaction matrix inverse residual " + std::to_string(resid) +
        " exceeds 1e-10; increase gamma");
  }
  return inv;
}

TaskGraph::TaskGraph(SimilarityMatrix sims, double gamma, double lambda)
    : sims_(std::move(sims)), gamma_(gamma), lambda_(lambda) {
  if (!(gamma >= 0.0)) throw InvalidInputError("TaskGraph: gamma must be >= 0");
  if (!(lambda >= 0.0)) throw InvalidInputError("TaskGraph: lambda must be >= 0");
  A_ = build_interaction_matrix(sims_, gamma_);
  A_inv_ = invert_interaction_matrix(A_);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A_);
  const double smin = svd.singularValues()(A_.rows() - 1);
  cond_ = smin > 0.0 ? svd.singularValues()(0) / smin : std::numeric_limits<double>::infinity();
}

void TaskGraph::check_task(int task) const {
  if (task < 0 || task >= tasks()) {
    throw InvalidInputError("task index " + std::to_string(task) + " out of range [0, " +
                            std::to_string(tasks()) + ")");
  }
}

}  // namespace mtor
