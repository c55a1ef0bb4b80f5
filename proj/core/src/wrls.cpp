#include "mtor/wrls.hpp"

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

#include "mtor/errors.hpp"

namespace mtor {

namespace {

// Shared tail of the recursion once Px = P*x, xPx = x'Px and the a-priori
// prediction are known. Relies on P being symmetric so that x'P = (Px)'.
double step_core(WrlsState& state, const Eigen::VectorXd& Px, double xPx, double prediction,
                 double y) {
  const double denom = state.sigma + xPx;
  if (!(denom > 0.0)) {
    throw NumericalBreakdownError("wrls: gain denominator sigma + x'Px is not positive");
  }
  const Eigen::VectorXd k = Px / denom;
  const double apriori = y - prediction;
  state.w.noalias() += apriori * k;
  state.P.noalias() -= k * Px.transpose();
  state.P /= state.sigma;
  state.P = 0.5 * (state.P + state.P.transpose()).eval();
  ++state.n;
  return prediction;
}

}  // namespace

WrlsState wrls_init(Eigen::Index dim, const Eigen::MatrixXd& P0, const Eigen::VectorXd& w0,
                    double sigma) {
  if (dim < 1) throw InvalidInputError("wrls_init: dimension must be positive");
  if (P0.rows() != dim || P0.cols() != dim || w0.size() != dim) {
    throw InvalidInputError("wrls_init: P0/w0 dimensions disagree");
  }
  if (!(sigma > 0.0 && sigma <= 1.0)) {
    throw InvalidInputError("wrls_init: sigma must lie in (0, 1]");
  }
  const double scale = std::max(1.0, P0.cwiseAbs().maxCoeff());
  if ((P0 - P0.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InvalidInputError("wrls_init: P0 must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(P0);
  if (llt.info() != Eigen::Success) {
    throw InvalidInputError("wrls_init: P0 must be positive definite");
  }
  WrlsState state;
  state.w = w0;
  state.P = 0.5 * (P0 + P0.transpose());
  state.sigma = sigma;
  state.n = 0;
  return state;
}

double wrls_step(WrlsState& state, const Eigen::VectorXd& x, double y) {
  if (x.size() != state.dim()) throw InvalidInputError("wrls_step: input dimension mismatch");
  if (!x.allFinite() || !std::isfinite(y)) throw InvalidInputError("wrls_step: non-finite input");
  const Eigen::VectorXd Px = state.P * x;
  return step_core(state, Px, x.dot(Px), state.w.dot(x), y);
}

double wrls_step_block(WrlsState& state, Eigen::Index offset, const Eigen::VectorXd& block,
                       double y) {
  const Eigen::Index d = block.size();
  if (offset < 0 || d < 1 || offset + d > state.dim()) {
    throw InvalidInputError("wrls_step_block: block out of range");
  }
  if (!block.allFinite() || !std::isfinite(y)) {
    throw InvalidInputError("wrls_step_block: non-finite input");
  }
  const Eigen::VectorXd Px = state.P.middleCols(offset, d) * block;
  const double xPx = block.dot(Px.segment(offset, d));
  const double prediction = state.w.segment(offset, d).dot(block);
  return step_core(state, Px, xPx, prediction, y);
}

Eigen::VectorXd wrls_batch_oracle(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const Eigen::MatrixXd& P0, double sigma) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (y.size() != n) throw InvalidInputError("wrls_batch_oracle: X/y row mismatch");
  if (P0.rows() != d || P0.cols() != d) throw InvalidInputError("wrls_batch_oracle: P0 shape");
  if (!(sigma > 0.0 && sigma <= 1.0)) throw InvalidInputError("wrls_batch_oracle: sigma range");

  Eigen::LLT<Eigen::MatrixXd> llt(P0);
  if (llt.info() != Eigen::Success) {
    throw InvalidInputError("wrls_batch_oracle: P0 must be positive definite");
  }
  Eigen::MatrixXd phi = llt.solve(Eigen::MatrixXd::Identity(d, d));  // P0^{-1}
  double weight = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) weight *= sigma;
  phi *= weight;

  Eigen::VectorXd psi = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    double w = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) w *= sigma;
    phi.noalias() += w * X.row(i).transpose() * X.row(i);
    psi.noalias() += w * y(i) * X.row(i).transpose();
  }

  Eigen::LDLT<Eigen::MatrixXd> solver(0.5 * (phi + phi.transpose()));
  if (solver.info() != Eigen::Success || !solver.isPositive()) {
    throw SingularMatrixError("wrls_batch_oracle: normal matrix is singular");
  }
  return solver.solve(psi);
}

nlohmann::json wrls_to_json(const WrlsState& state) {
  nlohmann::json j;
  j["sigma"] = state.sigma;
  j["n"] = state.n;
  j["w"] = std::vector<double>(state.w.data(), state.w.data() + state.w.size());
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < state.P.rows(); ++r) {
    rows.push_back(std::vector<double>(state.P.row(r).begin(), state.P.row(r).end()));
  }
  j["P"] = std::move(rows);
  return j;
}

WrlsState wrls_from_json(const nlohmann::json& j) {
  WrlsState state;
  state.sigma = j.at("sigma").get<double>();
  state.n = j.at("n").get<long>();
  const auto w = j.at("w").get<std::vector<double>>();
  state.w = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  const auto& P = j.at("P");
  const Eigen::Index d = static_cast<Eigen::Index>(P.size());
  state.P.resize(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const auto row = P.at(r).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != d) {
      throw InvalidInputError("wrls_from_json: ragged P");
    }
    for (Eigen::Index c = 0; c < d; ++c) state.P(r, c) = row[c];
  }
  if (state.w.size() != d) throw InvalidInputError("wrls_from_json: w/P dimension mismatch");
  return state;
}

}  // namespace mtor
