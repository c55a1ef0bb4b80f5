#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "mtor/dataset.hpp"
#include "mtor/errors.hpp"
#include "mtor/similarity.hpp"

using namespace mtor;

namespace {

std::filesystem::path write_temp(const char* name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << body;
  return path;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("csv loading: columns become task series") {
  const auto path = write_temp("plain.csv", "1,4,7\n2,5,8\n3,6,9\n");
  const MultiTaskDataset d = load_csv_tasks(path.string());
  CHECK(d.tasks() == 3);
  CHECK(d.length() == 3);
  CHECK(d.series[0](0) == 1.0);
  CHECK(d.series[1](2) == 6.0);
  CHECK(d.series[2](1) == 8.0);
  CHECK(d.source == path.string());
  std::filesystem::remove(path);
}

TEST_CASE("csv loading: header row is detected and skipped") {
  const auto path = write_temp("header.csv", "load_a,load_b\r\n1,2\n3,4\n");
  const MultiTaskDataset d = load_csv_tasks(path.string());
  CHECK(d.tasks() == 2);
  CHECK(d.length() == 2);
  CHECK(d.series[0](0) == 1.0);
  CHECK(d.series[1](1) == 4.0);
  std::filesystem::remove(path);
}

TEST_CASE("csv loading: malformed files report row and column") {
  const auto blank = write_temp("blank_cell.csv", "1,2\n3,\n5,6\n");
  try {
    load_csv_tasks(blank.string());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(e.col() == 2);
  }
  std::filesystem::remove(blank);

  const auto ragged = write_temp("ragged.csv", "1,2\n3,4,5\n");
  CHECK_THROWS_AS(load_csv_tasks(ragged.string()), ParseError);
  std::filesystem::remove(ragged);

  const auto alpha = write_temp("mid_text.csv", "1,2\n3,x7\n");
  try {
    load_csv_tasks(alpha.string());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(e.col() == 2);
  }
  std::filesystem::remove(alpha);

  const auto empty = write_temp("empty.csv", "");
  CHECK_THROWS_AS(load_csv_tasks(empty.string()), ParseError);
  std::filesystem::remove(empty);

  // A path that cannot be opened is an input problem, not a parse problem.
  CHECK_THROWS_AS(load_csv_tasks("/nonexistent/nowhere.csv"), InvalidInputError);
}

TEST_CASE("csv write/load round trip preserves values exactly") {
  MultiTaskDataset d;
  Eigen::VectorXd a(3), b(3);
  a << 0.1, -2.000000000000001, 3e-17;
  b << 1.0 / 3.0, 2.0 / 7.0, -1e300;
  d.series = {a, b};
  const auto path = std::filesystem::temp_directory_path() / "roundtrip.csv";
  write_csv_tasks(path.string(), d);
  const MultiTaskDataset back = load_csv_tasks(path.string());
  REQUIRE(back.tasks() == 2);
  CHECK((back.series[0] - a).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.series[1] - b).cwiseAbs().maxCoeff() == 0.0);
  // Writing the same content twice is byte-identical.
  const std::string first = slurp(path);
  write_csv_tasks(path.string(), back);
  CHECK(slurp(path) == first);
  std::filesystem::remove(path);
}

TEST_CASE("synthetic generator: deterministic in the seed") {
  const MultiTaskDataset a = synth_generate(3, 80, 0.5, 42);
  const MultiTaskDataset b = synth_generate(3, 80, 0.5, 42);
  const MultiTaskDataset c = synth_generate(3, 80, 0.5, 43);
  REQUIRE(a.tasks() == 3);
  REQUIRE(a.length() == 80);
  for (int t = 0; t < 3; ++t) {
    CHECK((a.series[t] - b.series[t]).cwiseAbs().maxCoeff() == 0.0);
  }
  double diff = 0.0;
  for (int t = 0; t < 3; ++t) diff += (a.series[t] - c.series[t]).cwiseAbs().maxCoeff();
  CHECK(diff > 0.0);
  CHECK(a.source.find("synth") != std::string::npos);
}

TEST_CASE("synthetic generator: coupling drives cross-task correlation") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const MultiTaskDataset indep = synth_generate(4, 400, 0.0, seed);
    const MultiTaskDataset coupled = synth_generate(4, 400, 1.0, seed);
    const SimilarityMatrix s_indep = SimilarityMatrix::from_series(indep.series);
    const SimilarityMatrix s_coupled = SimilarityMatrix::from_series(coupled.series);
    // Independent integrated series still show some spurious rank
    // correlation, so the independent side gets a loose bound and the
    // discriminating check is the per-pair gap.
    double mean_indep = 0.0;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (i == j) continue;
        mean_indep += s_indep(i, j) / 12.0;
        CHECK(s_indep(i, j) < 0.6);
        CHECK(s_coupled(i, j) > 0.8);  // shared driver dominates, weak noise remains
        CHECK(s_coupled(i, j) > s_indep(i, j) + 0.4);
      }
    }
    CHECK(mean_indep < 0.35);
  }
}

TEST_CASE("synthetic generator: argument validation") {
  CHECK_THROWS_AS(synth_generate(1, 80, 0.5, 1), InvalidInputError);
  CHECK_THROWS_AS(synth_generate(3, 49, 0.5, 1), InvalidInputError);
  CHECK_THROWS_AS(synth_generate(3, 80, -0.1, 1), InvalidInputError);
  CHECK_THROWS_AS(synth_generate(3, 80, 1.1, 1), InvalidInputError);
}

TEST_CASE("window sampling: a contiguous aligned slice of every task") {
  const MultiTaskDataset full = synth_generate(3, 200, 0.5, 7);
  const MultiTaskDataset win = sample_window(full, 60, 11);
  REQUIRE(win.tasks() == 3);
  REQUIRE(win.length() == 60);
  // Locate the window through task 0, then demand the same offset everywhere.
  Eigen::Index start = -1;
  for (Eigen::Index s = 0; s + 60 <= 200; ++s) {
    if ((full.series[0].segment(s, 60) - win.series[0]).cwiseAbs().maxCoeff() == 0.0) {
      start = s;
      break;
    }
  }
  REQUIRE(start >= 0);
  for (int t = 1; t < 3; ++t) {
    CHECK((full.series[t].segment(start, 60) - win.series[t]).cwiseAbs().maxCoeff() == 0.0);
  }
  // Determinism in the seed.
  const MultiTaskDataset again = sample_window(full, 60, 11);
  CHECK((again.series[1] - win.series[1]).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(sample_window(full, 201, 1), InvalidInputError);
  CHECK_THROWS_AS(sample_window(full, 0, 1), InvalidInputError);
  const MultiTaskDataset same_len = sample_window(full, 200, 3);
  CHECK((same_len.series[0] - full.series[0]).cwiseAbs().maxCoeff() == 0.0);
}
