#include "mtor/contenders.hpp"

#include <cmath>
#include <string>

#include "mtor/errors.hpp"
#include "mtor/similarity.hpp"

namespace mtor {

MogdState::MogdState(std::shared_ptr<const TaskGraph> graph, int input_dim, double eta0)
    : graph_(std::move(graph)), eta0_(eta0) {
  if (!graph_) {
    throw InvalidInputError("gradient model requires a task graph");
  }
  if (input_dim < 1) {
    throw InvalidInputError("input dimension must be >= 1, got " + std::to_string(input_dim));
  }
  if (!(eta0_ > 0.0)) {
    throw InvalidInputError("learning rate eta0 must be > 0, got " + std::to_string(eta0_));
  }
  W_ = Eigen::MatrixXd::Zero(input_dim, graph_->tasks());
}

double MogdState::predict(int task, const Eigen::VectorXd& x) const {
  graph_->check_task(task);
  if (x.size() != W_.rows()) {
    throw InvalidInputError("expected input dimension " + std::to_string(W_.rows()) + ", got " +
                            std::to_string(x.size()));
  }
  return W_.col(task).dot(x);
}

double MogdState::step(int task, const Eigen::VectorXd& x, double y) {
  const double prediction = predict(task, x);
  ++iter_;
  const double eta = eta0_ / std::sqrt(static_cast<double>(iter_));
  const Eigen::MatrixXd& A = graph_->A();
  // Gradient of (y - x.w_t)^2 + lambda * sum_{s,j} A(s,j) w_s.w_j in w_t;
  // the coupling term differentiates to sum_j (A(t,j) + A(j,t)) w_j.
  Eigen::VectorXd grad = -2.0 * (y - prediction) * x;
  for (int j = 0; j < graph_->tasks(); ++j) {
    const double c = A(task, j) + A(j, task);
    if (c != 0.0) {
      grad += graph_->lambda() * c * W_.col(j);
    }
  }
  W_.col(task) -= eta * grad;
  return prediction;
}

StlWrls::StlWrls(int tasks, int input_dim, double sigma, double init_scale) {
  if (tasks < 1) {
    throw InvalidInputError("need at least 1 task, got " + std::to_string(tasks));
  }
  if (!(init_scale > 0.0)) {
    throw InvalidInputError("init_scale must be > 0, got " + std::to_string(init_scale));
  }
  const Eigen::MatrixXd P0 =
      init_scale * Eigen::MatrixXd::Identity(input_dim, input_dim);
  const Eigen::VectorXd w0 = Eigen::VectorXd::Zero(input_dim);
  states_.reserve(tasks);
  for (int t = 0; t < tasks; ++t) {
    states_.push_back(wrls_init(input_dim, P0, w0, sigma));
  }
}

const WrlsState& StlWrls::state(int task) const {
  if (task < 0 || task >= tasks()) {
    throw InvalidInputError("task index " + std::to_string(task) + " out of range [0, " +
                            std::to_string(tasks()) + ")");
  }
  return states_[task];
}

double StlWrls::step(int task, const Eigen::VectorXd& x, double y) {
  state(task);  // range check
  return wrls_step(states_[task], x, y);
}

double StlWrls::predict(int task, const Eigen::VectorXd& x) const {
  const WrlsState& s = state(task);
  if (x.size() != s.w.size()) {
    throw InvalidInputError("expected input dimension " + std::to_string(s.w.size()) + ", got " +
                            std::to_string(x.size()));
  }
  return s.w.dot(x);
}

namespace {

std::shared_ptr<const TaskGraph> single_task_graph(double lambda) {
  return std::make_shared<TaskGraph>(SimilarityMatrix::edgeless(1), 1.0, lambda);
}

}  // namespace

StlOslssvr::StlOslssvr(int tasks, double lambda, double nu, int dictionary_cap) {
  if (tasks < 1) {
    throw InvalidInputError("need at least 1 task, got " + std::to_string(tasks));
  }
  states_.reserve(tasks);
  const auto graph = single_task_graph(lambda);
  for (int t = 0; t < tasks; ++t) {
    states_.emplace_back(graph, lambda, nu, dictionary_cap);
  }
}

const OslssvrState& StlOslssvr::state(int task) const {
  if (task < 0 || task >= tasks()) {
    throw InvalidInputError("task index " + std::to_string(task) + " out of range [0, " +
                            std::to_string(tasks()) + ")");
  }
  return states_[task];
}

double StlOslssvr::step(int task, const Eigen::VectorXd& x, double y) {
  state(task);  // range check
  return states_[task].step(0, x, y);
}

double StlOslssvr::predict(int task, const Eigen::VectorXd& x) const {
  return state(task).predict(0, x);
}

}  // namespace mtor
