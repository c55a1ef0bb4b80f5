#include "mtor/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mtor/errors.hpp"

namespace mtor {

Eigen::VectorXd average_ranks(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index i, Eigen::Index j) { return v(i) < v(j); });

  Eigen::VectorXd ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && v(order[j + 1]) == v(order[i])) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (Eigen::Index k = i; k <= j; ++k) ranks(order[k]) = shared;
    i = j + 1;
  }
  return ranks;
}

double spearman_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw InvalidInputError("spearman: series length mismatch");
  if (a.size() < 3) throw InvalidInputError("spearman: need at least 3 points");
  if (!a.allFinite() || !b.allFinite()) throw InvalidInputError("spearman: non-finite values");

  // Pearson correlation of the rank vectors; with average ranks this reduces
  // to 1 - 6*sum(d^2)/(n(n^2-1)) when there are no ties.
  const Eigen::VectorXd ra = average_ranks(a);
  const Eigen::VectorXd rb = average_ranks(b);

  const Eigen::VectorXd da = ra.array() - ra.mean();
  const Eigen::VectorXd db = rb.array() - rb.mean();
  const double va = da.squaredNorm();
  const double vb = db.squaredNorm();
  if (va == 0.0 || vb == 0.0) {
    throw UndefinedCorrelationError("spearman: constant series has no rank variance");
  }

  const double rho = da.dot(db) / std::sqrt(va * vb);
  return std::max(0.0, rho);
}

SimilarityMatrix::SimilarityMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
    throw InvalidInputError("SimilarityMatrix: must be square and non-empty");
  }
  for (Eigen::Index t = 0; t < entries_.rows(); ++t) {
    if (entries_(t, t) != 0.0) {
      throw InvalidInputError("SimilarityMatrix: diagonal must be exactly zero");
    }
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      const double v = entries_(t, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InvalidInputError("SimilarityMatrix: entries must lie in [0, 1]");
      }
    }
  }
}

SimilarityMatrix SimilarityMatrix::edgeless(int tasks) {
  if (tasks < 1) throw InvalidInputError("SimilarityMatrix: tasks must be >= 1");
  return SimilarityMatrix(Eigen::MatrixXd::Zero(tasks, tasks));
}

SimilarityMatrix SimilarityMatrix::from_series(const std::vector<Eigen::VectorXd>& series) {
  const int T = static_cast<int>(series.size());
  if (T < 1) throw InvalidInputError("from_series: no series given");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(T, T);
  for (int t = 0; t < T; ++t) {
    for (int j = t + 1; j < T; ++j) {
      double s;
      try {
        s = spearman_similarity(series[t], series[j]);
      } catch (const UndefinedCorrelationError&) {
        s = 0.0;
      }
      m(t, j) = s;
      m(j, t) = s;
    }
  }
  return SimilarityMatrix(std::move(m));
}

bool SimilarityMatrix::is_symmetric(double tol) const {
  return (entries_ - entries_.transpose()).cwiseAbs().maxCoeff() <= tol;
}

SimilarityMatrix SimilarityMatrix::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open similarity CSV: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    long col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("similarity CSV: non-numeric cell", lineno, col);
      }
    }
    rows.push_back(std::move(row));
  }
  const std::size_t T = rows.size();
  if (T == 0) throw ParseError("similarity CSV: empty file");
  Eigen::MatrixXd m(T, T);
  for (std::size_t t = 0; t < T; ++t) {
    if (rows[t].size() != T) {
      throw ParseError("similarity CSV: expected square matrix", static_cast<long>(t + 1),
                       static_cast<long>(rows[t].size()));
    }
    for (std::size_t j = 0; j < T; ++j) m(t, j) = rows[t][j];
  }
  return SimilarityMatrix(std::move(m));
}

void SimilarityMatrix::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write similarity CSV: " + path);
  out.precision(17);
  for (Eigen::Index t = 0; t < entries_.rows(); ++t) {
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      if (j) out << ',';
      out << entries_(t, j);
    }
    out << '\n';
  }
}

}  // namespace mtor
