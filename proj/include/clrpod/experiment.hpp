#pragma once

// Grid of random instances solved end to end by a pool of workers, with
// per-cell success rate, reduction, iteration and timing statistics.

#include <cstdint>
#include <string>
#include <vector>

#include "clrpod/framework.hpp"

namespace clrpod::experiment {

struct GridSpec {
  std::vector<int> n_d;
  std::vector<int> n_t;
  int n_v = 2;
  int count = 10;
  std::uint64_t seed = 1;
  int jobs = 1;
  framework::SolveConfig solve;
};

struct InstanceRow {
  int n_d = 0;
  int n_t = 0;
  int index = 0;
  std::uint64_t seed = 0;
  bool solved = false;
  std::string outcome;
  double initial_emleo = 0.0;
  double final_emleo = 0.0;
  double reduction_pct = 0.0;
  int iterations = 0;
  double wall_s = 0.0;
  bool monotone = true;
  /// Exception text when the solve threw.
  std::string error;
};

struct Stat {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct CellSummary {
  int n_d = 0;
  int n_t = 0;
  int count = 0;
  int solved = 0;
  double success_pct = 0.0;
  /// Over solved instances only; zero when none solved.
  Stat reduction_pct;
  Stat iterations;
  Stat wall_s;
};

/// Seed of the index-th instance of a cell; stable across grids.
std::uint64_t instance_seed(std::uint64_t base, int n_d, int n_t, int index);

/// Rows come back in (n_d, n_t, index) order whatever the worker timing.
std::vector<InstanceRow> run_grid(const GridSpec& spec);

std::vector<CellSummary> summarize(const std::vector<InstanceRow>& rows);

std::string rows_csv(const std::vector<InstanceRow>& rows);
std::string summary_csv(const std::vector<CellSummary>& cells);

}  // namespace clrpod::experiment
