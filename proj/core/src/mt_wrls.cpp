#include "mtor/mt_wrls.hpp"

#include <Eigen/Cholesky>
#include <string>

#include "mtor/errors.hpp"

namespace mtor {

Eigen::VectorXd StackedInput::stacked(int tasks) const {
  if (task < 0 || task >= tasks) throw InvalidInputError("StackedInput: task out of range");
  const Eigen::Index d = x.size();
  Eigen::VectorXd s = Eigen::VectorXd::Zero(d * tasks);
  s.segment(task * d, d) = x;
  return s;
}

Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& M, Eigen::Index d) {
  const Eigen::Index T = M.rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(T * d, T * d);
  for (Eigen::Index s = 0; s < T; ++s) {
    for (Eigen::Index t = 0; t < T; ++t) {
      if (M(s, t) != 0.0) {
        K.block(s * d, t * d, d, d) = M(s, t) * Eigen::MatrixXd::Identity(d, d);
      }
    }
  }
  return K;
}

MtWrlsModel::MtWrlsModel(std::shared_ptr<const TaskGraph> graph, Eigen::Index d, double sigma,
                         Eigen::Index stacked_cap)
    : graph_(std::move(graph)), d_(d) {
  if (!graph_) throw InvalidInputError("MtWrlsModel: null graph");
  if (d < 1) throw InvalidInputError("MtWrlsModel: input dimension must be positive");
  if (!(graph_->lambda() > 0.0)) {
    throw InvalidInputError("MtWrlsModel: lambda must be > 0, P(0) is undefined otherwise");
  }
  const Eigen::Index D = d * graph_->tasks();
  if (D > stacked_cap) {
    throw CapacityError("MtWrlsModel: stacked dimension " + std::to_string(D) +
                        " exceeds cap " + std::to_string(stacked_cap));
  }
  const Eigen::MatrixXd P0 = kron_identity(graph_->A_inv(), d) / graph_->lambda();
  core_ = wrls_init(D, P0, Eigen::VectorXd::Zero(D), sigma);
}

double MtWrlsModel::step(int task, const Eigen::VectorXd& x, double y) {
  graph_->check_task(task);
  if (x.size() != d_) throw InvalidInputError("MtWrlsModel::step: input dimension mismatch");
  return wrls_step_block(core_, static_cast<Eigen::Index>(task) * d_, x, y);
}

double MtWrlsModel::predict(int task, const Eigen::VectorXd& x) const {
  graph_->check_task(task);
  if (x.size() != d_) throw InvalidInputError("MtWrlsModel::predict: input dimension mismatch");
  return core_.w.segment(static_cast<Eigen::Index>(task) * d_, d_).dot(x);
}

Eigen::VectorXd MtWrlsModel::task_weights(int task) const {
  graph_->check_task(task);
  return core_.w.segment(static_cast<Eigen::Index>(task) * d_, d_);
}

Eigen::VectorXd mt_batch_oracle(const std::vector<MtSample>& samples, const TaskGraph& graph) {
  if (samples.empty()) throw InvalidInputError("mt_batch_oracle: no samples");
  const Eigen::Index d = samples.front().x.size();
  const Eigen::Index D = d * graph.tasks();

  Eigen::MatrixXd normal = graph.lambda() * kron_identity(graph.A(), d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(D);
  for (const MtSample& s : samples) {
    graph.check_task(s.task);
    if (s.x.size() != d) throw InvalidInputError("mt_batch_oracle: inconsistent input dims");
    const Eigen::Index off = static_cast<Eigen::Index>(s.task) * d;
    normal.block(off, off, d, d).noalias() += s.x * s.x.transpose();
    rhs.segment(off, d).noalias() += s.y * s.x;
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  if (!lu.isInvertible()) {
    throw SingularMatrixError("mt_batch_oracle: stacked normal system is singular");
  }
  return lu.solve(rhs);
}

double mt_objective(const std::vector<MtSample>& samples, const TaskGraph& graph,
                    const Eigen::VectorXd& w_stacked) {
  const Eigen::Index T = graph.tasks();
  if (w_stacked.size() % T != 0) throw InvalidInputError("mt_objective: w size not divisible by T");
  const Eigen::Index d = w_stacked.size() / T;

  double loss = 0.0;
  for (const MtSample& s : samples) {
    graph.check_task(s.task);
    const double err = s.y - w_stacked.segment(static_cast<Eigen::Index>(s.task) * d, d).dot(s.x);
    loss += err * err;
  }

  // lambda * w'(A kron I_d)w without forming the Kronecker product.
  double reg = 0.0;
  for (Eigen::Index s = 0; s < T; ++s) {
    for (Eigen::Index t = 0; t < T; ++t) {
      const double a = graph.A()(s, t);
      if (a != 0.0) {
        reg += a * w_stacked.segment(s * d, d).dot(w_stacked.segment(t * d, d));
      }
    }
  }
  return loss + graph.lambda() * reg;
}

}  // namespace mtor
