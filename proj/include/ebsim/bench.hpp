#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "ebsim/polarizer.hpp"

namespace ebsim {

/// rational: θ_m = arcsin√(m/M), so sin²θ_m is rational.
/// uniform:  θ_m = mπ/(2M).
enum class GridKind { rational, uniform };

std::string_view to_string(GridKind grid);
GridKind grid_kind_from_string(std::string_view name);

struct BenchConfig {
  ProcessorKind kind{ProcessorKind::dlm};
  std::uint64_t grid_resolution{100};  // M
  std::vector<std::uint64_t> n_list{100, 1000, 10000, 100000, 1000000};
  GridKind grid{GridKind::rational};
  double alpha{0.9995};
  /// Discarded events before counting; DLM kinds only.
  std::uint64_t warmup{10000};
  std::uint64_t seed{0};
  unsigned threads{0};

  /// Throws std::invalid_argument for M = 0 or an empty/unsorted N list.
  void validate() const;
};

/// M+1 input angles from 0 to π/2 inclusive.
std::vector<double> angle_grid(GridKind grid, std::uint64_t resolution);

struct BenchRow {
  std::uint64_t n;
  double error;  // e(N), radians
};

struct BenchResult {
  std::vector<BenchRow> rows;
};

struct GridPointError {
  std::uint64_t n;
  std::uint64_t m;
  double theta;
  double estimate;
  /// (θ_m − θ'_m)²
  double squared_error;
};

/// For every (m, N) a fresh processor seeded with seed + m sees N events at
/// θ_m (after the warmup for DLM kinds). The count K of channel-S events
/// gives θ'_m = arcsin√(K/N). Rows are ordered by N, then m.
std::vector<GridPointError> benchmark_detail(const BenchConfig& config);

/// e(N) = √(Σ_m (θ_m − θ'_m)² / (M+1)) for each N.
BenchResult run_benchmark(const BenchConfig& config);

/// Reduces a detail table to e(N) rows.
BenchResult summarize(const std::vector<GridPointError>& detail, std::uint64_t resolution);

/// Per-m errors on the uniform grid. Throws std::invalid_argument if the
/// config uses another grid.
std::vector<GridPointError> uniform_grid_degradation(const BenchConfig& config);

/// Columns kind,grid,alpha,M,N,e_of_N.
void write_bench_csv(std::ostream& out, const BenchConfig& config, const BenchResult& result);
/// Columns kind,grid,alpha,M,N,m,theta,estimate,squared_error.
void write_bench_detail_csv(std::ostream& out, const BenchConfig& config, const std::vector<GridPointError>& detail);

}  // namespace ebsim
