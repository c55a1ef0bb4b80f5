#include "mtor/mt_oslssvr.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "mtor/errors.hpp"

namespace mtor {

namespace {

// Pivot/denominator magnitudes below this (relative to the quantities that
// formed them) mean the recursion can no longer be continued reliably.
constexpr double kBreakdownTol = 1e-12;

void check_sample(const Eigen::VectorXd& x, double y) {
  if (x.size() == 0) {
    throw InvalidInputError("oslssvr: empty input vector");
  }
  if (!x.allFinite() || !std::isfinite(y)) {
    throw InvalidInputError("oslssvr: sample contains a non-finite value");
  }
}

}  // namespace

double mt_kernel_eval(const Eigen::VectorXd& x, int s, const Eigen::VectorXd& x2, int t,
                      const TaskGraph& graph) {
  graph.check_task(s);
  graph.check_task(t);
  if (x.size() != x2.size()) {
    throw InvalidInputError("mt_kernel_eval: input dimensions differ (" +
                            std::to_string(x.size()) + " vs " + std::to_string(x2.size()) + ")");
  }
  return x.dot(x2) * graph.A_inv()(s, t);
}

KernelDictionary::KernelDictionary(std::shared_ptr<const TaskGraph> graph, double nu)
    : graph_(std::move(graph)), nu_(nu) {
  if (!graph_) {
    throw InvalidInputError("kernel dictionary requires a task graph");
  }
  if (!(nu_ >= 0.0)) {
    throw InvalidInputError("sparsity threshold nu must be >= 0, got " + std::to_string(nu_));
  }
}

AldResult KernelDictionary::ald_test(const Eigen::VectorXd& x, int task) const {
  AldResult result;
  const int m = size();
  result.k_vec.resize(m);
  for (int i = 0; i < m; ++i) {
    result.k_vec(i) = mt_kernel_eval(atoms_[i].x, atoms_[i].task, x, task, *graph_);
  }
  result.k_nn = mt_kernel_eval(x, task, x, task, *graph_);
  kernel_evals_ += static_cast<std::uint64_t>(m) + 1;
  if (m == 0) {
    result.delta = result.k_nn;
    return result;
  }
  result.coeffs = K_inv_ * result.k_vec;
  // One refinement pass on the reconstruction solve: the coefficients feed
  // every downstream update, so their accuracy bounds the whole recursion's.
  result.coeffs += K_inv_ * (result.k_vec - K_ * result.coeffs);
  const Eigen::VectorXd residual = result.k_vec - K_ * result.coeffs;
  const double raw = result.k_nn - result.k_vec.dot(result.coeffs);
  // The reconstruction error can only be resolved down to the rounding of
  // the quantities it is computed from: the inner products of the residual
  // formula plus the solve's remaining residual seen through the
  // coefficients. A raw value inside that band is indistinguishable from an
  // exactly representable input and must not count as novelty: admitting it
  // would extend the kernel matrix with a numerically zero pivot, after
  // which every later sample looks novel too and the dictionary blows up.
  const Eigen::VectorXd abs_a = result.coeffs.cwiseAbs();
  const double noise =
      16.0 * std::numeric_limits<double>::epsilon() *
          (std::abs(result.k_nn) + 2.0 * result.k_vec.cwiseAbs().dot(abs_a) +
           abs_a.dot(K_.cwiseAbs() * abs_a)) +
      result.coeffs.norm() * residual.norm();
  result.delta = raw > noise ? raw : 0.0;
  return result;
}

void KernelDictionary::admit(const Eigen::VectorXd& x, int task, const AldResult& result) {
  graph_->check_task(task);
  if (!atoms_.empty() && x.size() != atoms_.front().x.size()) {
    throw InvalidInputError("dictionary atoms must share one input dimension");
  }
  const int m = size();
  if (result.delta <= 0.0) {
    throw NumericalBreakdownError(
        "cannot admit an atom with zero reconstruction residual; it is already "
        "representable by the dictionary");
  }

  Eigen::MatrixXd K_next(m + 1, m + 1);
  K_next.topLeftCorner(m, m) = K_;
  K_next.topRightCorner(m, 1) = result.k_vec;
  K_next.bottomLeftCorner(1, m) = result.k_vec.transpose();
  K_next(m, m) = result.k_nn;

  // Block inverse through the Schur complement delta = k_nn - k' K_inv k.
  Eigen::MatrixXd K_inv_next(m + 1, m + 1);
  if (m == 0) {
    K_inv_next(0, 0) = 1.0 / result.k_nn;
  } else {
    const Eigen::VectorXd& a = result.coeffs;
    K_inv_next.topLeftCorner(m, m) = K_inv_ + a * a.transpose() / result.delta;
    K_inv_next.topRightCorner(m, 1) = -a / result.delta;
    K_inv_next.bottomLeftCorner(1, m) = -a.transpose() / result.delta;
    K_inv_next(m, m) = 1.0 / result.delta;
  }
  K_ = std::move(K_next);
  K_inv_ = 0.5 * (K_inv_next + K_inv_next.transpose());
  atoms_.push_back({x, task});
}

OslssvrState::OslssvrState(std::shared_ptr<const TaskGraph> graph, double lambda, double nu,
                           int dictionary_cap)
    : dict_(graph, nu), lambda_(lambda), cap_(dictionary_cap) {
  if (!(lambda_ > 0.0)) {
    throw InvalidInputError("regularizer lambda must be > 0, got " + std::to_string(lambda_));
  }
  if (cap_ < 1) {
    throw InvalidInputError("dictionary capacity must be >= 1, got " + std::to_string(cap_));
  }
  const Eigen::MatrixXd& A = graph->A();
  const double skew = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (skew > 1e-10 * std::max(1.0, A.cwiseAbs().maxCoeff())) {
    throw InvalidInputError(
        "oslssvr needs a symmetric interaction matrix; the multi-task kernel is "
        "undefined for asymmetric similarity graphs");
  }
  B_.resize(0, 0);
  M_.resize(0, 0);
  M_inv_.resize(0, 0);
  r_.resize(0);
  alpha_.resize(0);
}

double OslssvrState::step(int task, const Eigen::VectorXd& x, double y) {
  check_sample(x, y);
  const AldResult ald = dict_.ald_test(x, task);
  const double prediction = dict_.size() > 0 ? alpha_.dot(ald.k_vec) : 0.0;

  if (ald.delta > dict_.nu()) {
    admit_sample(x, task, y, ald);
  } else if (dict_.size() > 0) {
    absorb_sample(y, ald);
  }
  // An empty dictionary with delta <= nu leaves nothing to update: the
  // sample's feature image is within the sparsity budget of the origin.
  ++samples_seen_;
  return prediction;
}

void OslssvrState::admit_sample(const Eigen::VectorXd& x, int task, double y,
                                const AldResult& ald) {
  const int m = dict_.size();
  if (m + 1 > cap_) {
    throw CapacityError("dictionary would exceed its capacity of " + std::to_string(cap_) +
                        " atoms; raise the cap or use a larger nu");
  }

  // New system row/column before the dictionary grows: with B_next =
  // diag(B, 1) and the extended kernel matrix, M_next = B_next K_next +
  // lambda I picks up column B k_vec and row k_vec'.
  const double corner = ald.k_nn + lambda_;
  Eigen::MatrixXd M_next(m + 1, m + 1);
  Eigen::MatrixXd M_inv_next(m + 1, m + 1);
  if (m == 0) {
    M_next(0, 0) = corner;
    M_inv_next(0, 0) = 1.0 / corner;
  } else {
    const Eigen::VectorXd u = B_ * ald.k_vec;
    const Eigen::VectorXd Minv_u = M_inv_ * u;
    const Eigen::VectorXd MinvT_v = M_inv_.transpose() * ald.k_vec;
    const double schur = corner - ald.k_vec.dot(Minv_u);
    if (!(schur > kBreakdownTol * std::max(1.0, corner))) {
      throw NumericalBreakdownError(
          "dictionary extension hit a non-positive pivot (" + std::to_string(schur) +
          "); use a larger nu or lambda");
    }
    M_next.topLeftCorner(m, m) = M_;
    M_next.topRightCorner(m, 1) = u;
    M_next.bottomLeftCorner(1, m) = ald.k_vec.transpose();
    M_next(m, m) = corner;

    M_inv_next.topLeftCorner(m, m) = M_inv_ + Minv_u * MinvT_v.transpose() / schur;
    M_inv_next.topRightCorner(m, 1) = -Minv_u / schur;
    M_inv_next.bottomLeftCorner(1, m) = -MinvT_v.transpose() / schur;
    M_inv_next(m, m) = 1.0 / schur;
  }

  dict_.admit(x, task, ald);

  Eigen::MatrixXd B_next = Eigen::MatrixXd::Zero(m + 1, m + 1);
  B_next.topLeftCorner(m, m) = B_;
  B_next(m, m) = 1.0;
  B_ = std::move(B_next);

  r_.conservativeResize(m + 1);
  r_(m) = y;

  M_ = std::move(M_next);
  M_inv_ = std::move(M_inv_next);
  refresh_alpha();
}

void OslssvrState::absorb_sample(double y, const AldResult& ald) {
  const Eigen::VectorXd& a = ald.coeffs;
  // B gains a a', so M = B K + lambda I gains a (K a)'.
  const Eigen::VectorXd v = dict_.kernel_matrix() * a;
  const Eigen::VectorXd Minv_a = M_inv_ * a;
  const double denom = 1.0 + v.dot(Minv_a);
  if (std::abs(denom) < kBreakdownTol) {
    throw NumericalBreakdownError(
        "rank-one update denominator vanished (" + std::to_string(denom) +
        "); use a larger nu or lambda");
  }
  const Eigen::VectorXd MinvT_v = M_inv_.transpose() * v;
  B_ += a * a.transpose();
  r_ += y * a;
  M_ += a * v.transpose();
  M_inv_ -= Minv_a * MinvT_v.transpose() / denom;
  refresh_alpha();
}

void OslssvrState::refresh_alpha() {
  const Eigen::Index m = M_.rows();
  if (++updates_since_polish_ >= 16 && m > 0) {
    // Long runs of rank-one updates slowly corrupt the maintained inverse.
    // M itself is maintained exactly (additively), so a fresh factorization
    // re-anchors the inverse; amortized over 16 steps the O(m^3) cost stays
    // below the O(m^2) work of the updates themselves.
    M_inv_ = M_.partialPivLu().inverse();
    updates_since_polish_ = 0;
  }
  alpha_ = M_inv_ * r_;
  // Iterative refinement drives alpha to the stationary point of the
  // compressed problem even when the inverse carries rounding; each pass
  // shrinks the residual by the inverse's relative error.
  const double r_scale = m > 0 ? r_.cwiseAbs().maxCoeff() : 0.0;
  for (int pass = 0; pass < 4; ++pass) {
    const Eigen::VectorXd residual = r_ - M_ * alpha_;
    const double scale =
        r_scale + M_.cwiseAbs().rowwise().sum().maxCoeff() * alpha_.cwiseAbs().maxCoeff();
    if (residual.cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, scale)) break;
    alpha_ += M_inv_ * residual;
  }
}

double OslssvrState::predict(int task, const Eigen::VectorXd& x) const {
  double out = 0.0;
  const auto& atoms = dict_.atoms();
  for (int i = 0; i < dict_.size(); ++i) {
    out += alpha_(i) * mt_kernel_eval(atoms[i].x, atoms[i].task, x, task, dict_.graph());
  }
  return out;
}

Eigen::VectorXd OslssvrState::effective_stacked_weights() const {
  if (dict_.size() == 0) {
    return Eigen::VectorXd();
  }
  const int T = dict_.graph().tasks();
  const auto d = dict_.atoms().front().x.size();
  const Eigen::MatrixXd& A_inv = dict_.graph().A_inv();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(T * d);
  for (int i = 0; i < dict_.size(); ++i) {
    const DictAtom& atom = dict_.atoms()[i];
    for (int t = 0; t < T; ++t) {
      w.segment(t * d, d) += alpha_(i) * A_inv(t, atom.task) * atom.x;
    }
  }
  return w;
}

void OslssvrState::export_dictionary_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw InvalidInputError("cannot open dictionary export path: " + path);
  }
  out << std::setprecision(17);
  const auto d = dict_.size() > 0 ? dict_.atoms().front().x.size() : 0;
  out << "task,alpha";
  for (Eigen::Index j = 0; j < d; ++j) {
    out << ",x" << j;
  }
  out << "\n";
  for (int i = 0; i < dict_.size(); ++i) {
    const DictAtom& atom = dict_.atoms()[i];
    out << atom.task << "," << alpha_(i);
    for (Eigen::Index j = 0; j < d; ++j) {
      out << "," << atom.x(j);
    }
    out << "\n";
  }
}

Eigen::VectorXd lssvr_batch_oracle(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                                   double lambda) {
  if (K.rows() != K.cols() || K.rows() != y.size()) {
    throw InvalidInputError("lssvr oracle needs a square kernel matrix matching the targets");
  }
  if (K.size() > 0) {
    const double skew = (K - K.transpose()).cwiseAbs().maxCoeff();
    if (skew > 1e-8 * std::max(1.0, K.cwiseAbs().maxCoeff())) {
      throw InvalidInputError("lssvr oracle needs a symmetric kernel matrix");
    }
  }
  if (!(lambda >= 0.0)) {
    throw InvalidInputError("regularizer lambda must be >= 0, got " + std::to_string(lambda));
  }
  Eigen::MatrixXd system = K;
  system.diagonal().array() += lambda;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) {
    throw SingularMatrixError("regularized kernel system is singular; increase lambda");
  }
  return lu.solve(y);
}

}  // namespace mtor
