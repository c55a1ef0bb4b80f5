#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace mtor {

/// A bundle of equal-length scalar series, one per task. Column order of the
/// source file defines task indices.
struct MultiTaskDataset {
  std::vector<Eigen::VectorXd> series;
  std::string source;  // file path or a synth descriptor, for manifests

  int tasks() const { return static_cast<int>(series.size()); }
  Eigen::Index length() const { return series.empty() ? 0 : series.front().size(); }
};

/// Reads a one-column-per-task CSV. A first row with any non-numeric cell is
/// treated as a header and skipped. Ragged rows, blank cells, and
/// non-numeric cells raise ParseError carrying the 1-based (row, col).
MultiTaskDataset load_csv_tasks(const std::string& path);

/// Writes the dataset with a task_0,task_1,... header; deterministic output
/// for identical inputs.
void write_csv_tasks(const std::string& path, const MultiTaskDataset& dataset);

/// Synthetic benchmark data: each task mixes one shared AR(2) latent with a
/// private AR(2) component, y_t = coupling * z + (1 - coupling) * u_t +
/// 0.05 * noise, components standardized after burn-in so coupling alone
/// sets the cross-task correlation. Deterministic given the seed.
MultiTaskDataset synth_generate(int tasks, Eigen::Index n, double coupling, std::uint64_t seed);

/// Cuts one contiguous window of the given length per task (the same window
/// across tasks), with the start position drawn from the seed.
MultiTaskDataset sample_window(const MultiTaskDataset& dataset, Eigen::Index len,
                               std::uint64_t seed);

}  // namespace mtor
