#include "mtor/dataset.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "mtor/errors.hpp"
#include "mtor/rng.hpp"

namespace mtor {

namespace {

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    cells.emplace_back();
  }
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) {
    return false;
  }
  // Reject trailing garbage; tolerate surrounding whitespace.
  while (*end == ' ' || *end == '\t') {
    ++end;
  }
  return *end == '\0' && std::isfinite(out);
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  return line;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

/// One AR(2) path with standard-normal innovations, standardized over the
/// kept window after discarding the burn-in.
Eigen::VectorXd ar2_standardized(std::mt19937_64& gen, Eigen::Index n) {
  constexpr double kPhi1 = 1.6;
  constexpr double kPhi2 = -0.64;
  constexpr Eigen::Index kBurnIn = 100;
  double prev2 = 0.0;
  double prev1 = 0.0;
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < kBurnIn + n; ++i) {
    const double value = kPhi1 * prev1 + kPhi2 * prev2 + standard_normal(gen);
    prev2 = prev1;
    prev1 = value;
    if (i >= kBurnIn) {
      out(i - kBurnIn) = value;
    }
  }
  const double mean = out.mean();
  const double sd = std::sqrt((out.array() - mean).square().sum() / (n - 1));
  return (out.array() - mean) / (sd > 1e-12 ? sd : 1.0);
}

}  // namespace

MultiTaskDataset load_csv_tasks(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInputError("cannot open dataset file: " + path);
  }
  std::vector<std::vector<double>> columns;
  std::string line;
  long row = 0;
  bool saw_data = false;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (is_blank(line)) {
      continue;
    }
    const std::vector<std::string> cells = split_cells(line);
    std::vector<double> values(cells.size());
    bool numeric = true;
    long bad_col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], values[c])) {
        numeric = false;
        bad_col = static_cast<long>(c) + 1;
        break;
      }
    }
    if (!saw_data) {
      if (!numeric) {
        continue;  // header row
      }
      saw_data = true;
      columns.resize(cells.size());
    } else if (!numeric) {
      throw ParseError("non-numeric or missing cell", row, bad_col);
    }
    if (cells.size() != columns.size()) {
      throw ParseError("row has " + std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(columns.size()),
                       row, static_cast<long>(std::min(cells.size(), columns.size())) + 1);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      columns[c].push_back(values[c]);
    }
  }
  if (!saw_data) {
    throw ParseError("file contains no numeric data rows", row, 1);
  }
  MultiTaskDataset ds;
  ds.source = path;
  ds.series.reserve(columns.size());
  for (const auto& col : columns) {
    ds.series.push_back(Eigen::Map<const Eigen::VectorXd>(col.data(), col.size()));
  }
  return ds;
}

void write_csv_tasks(const std::string& path, const MultiTaskDataset& dataset) {
  if (dataset.tasks() == 0) {
    throw InvalidInputError("refusing to write an empty dataset");
  }
  std::ofstream out(path);
  if (!out) {
    throw InvalidInputError("cannot open output file: " + path);
  }
  out << std::setprecision(17);
  for (int t = 0; t < dataset.tasks(); ++t) {
    out << (t ? "," : "") << "task_" << t;
  }
  out << "\n";
  for (Eigen::Index i = 0; i < dataset.length(); ++i) {
    for (int t = 0; t < dataset.tasks(); ++t) {
      out << (t ? "," : "") << dataset.series[t](i);
    }
    out << "\n";
  }
}

MultiTaskDataset synth_generate(int tasks, Eigen::Index n, double coupling, std::uint64_t seed) {
  if (tasks < 2) {
    throw InvalidInputError("synthetic generation needs >= 2 tasks, got " +
                            std::to_string(tasks));
  }
  if (n < 50) {
    throw InvalidInputError("synthetic generation needs length >= 50, got " + std::to_string(n));
  }
  if (!(coupling >= 0.0 && coupling <= 1.0)) {
    throw InvalidInputError("coupling must lie in [0, 1], got " + std::to_string(coupling));
  }
  std::mt19937_64 gen(seed);
  // Fixed draw order (shared path, then each private path, then noise
  // task-by-task) keeps a seed reproducible.
  const Eigen::VectorXd shared = ar2_standardized(gen, n);
  std::vector<Eigen::VectorXd> privates;
  privates.reserve(tasks);
  for (int t = 0; t < tasks; ++t) {
    privates.push_back(ar2_standardized(gen, n));
  }
  MultiTaskDataset ds;
  ds.source = "synth(tasks=" + std::to_string(tasks) + ",n=" + std::to_string(n) +
              ",coupling=" + std::to_string(coupling) + ",seed=" + std::to_string(seed) + ")";
  ds.series.reserve(tasks);
  for (int t = 0; t < tasks; ++t) {
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      y(i) = coupling * shared(i) + (1.0 - coupling) * privates[t](i) +
             0.05 * standard_normal(gen);
    }
    ds.series.push_back(std::move(y));
  }
  return ds;
}

MultiTaskDataset sample_window(const MultiTaskDataset& dataset, Eigen::Index len,
                               std::uint64_t seed) {
  if (dataset.tasks() == 0 || len < 1 || len > dataset.length()) {
    throw InvalidInputError("window length " + std::to_string(len) +
                            " does not fit the dataset length " +
                            std::to_string(dataset.length()));
  }
  std::mt19937_64 gen(seed);
  const Eigen::Index range = dataset.length() - len + 1;
  const Eigen::Index start =
      std::min<Eigen::Index>(range - 1, static_cast<Eigen::Index>(uniform01(gen) * range));
  MultiTaskDataset out;
  out.source = dataset.source + "[window " + std::to_string(start) + ":" +
               std::to_string(start + len) + "]";
  out.series.reserve(dataset.tasks());
  for (const auto& s : dataset.series) {
    out.series.push_back(s.segment(start, len));
  }
  return out;
}

}  // namespace mtor
