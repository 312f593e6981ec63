#include "ebsim/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ebsim/io.hpp"
#include "ebsim/parallel.hpp"

namespace ebsim {

std::string_view to_string(GridKind grid) { return grid == GridKind::rational ? "rational" : "uniform"; }

GridKind grid_kind_from_string(std::string_view name) {
  if (name == "rational") return GridKind::rational;
  if (name == "uniform") return GridKind::uniform;
  throw std::invalid_argument("unknown grid '" + std::string(name) + "'");
}

void BenchConfig::validate() const {
  if (grid_resolution == 0) {
    throw std::invalid_argument("grid resolution M must be at least 1");
  }
  if (n_list.empty() || !std::is_sorted(n_list.begin(), n_list.end()) || n_list.front() == 0) {
    throw std::invalid_argument("N list must be non-empty, positive and ascending");
  }
  if (kind != ProcessorKind::bernoulli && !(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0,1)");
  }
}

std::vector<double> angle_grid(GridKind grid, std::uint64_t resolution) {
  if (resolution == 0) {
    throw std::invalid_argument("grid resolution M must be at least 1");
  }
  std::vector<double> out;
  out.reserve(resolution + 1);
  const double big_m = static_cast<double>(resolution);
  for (std::uint64_t m = 0; m <= resolution; ++m) {
    const double md = static_cast<double>(m);
    out.push_back(grid == GridKind::rational ? std::asin(std::sqrt(md / big_m))
                                             : md * std::numbers::pi / (2.0 * big_m));
  }
  return out;
}

std::vector<GridPointError> benchmark_detail(const BenchConfig& config) {
  config.validate();
  const auto grid = angle_grid(config.grid, config.grid_resolution);
  const std::size_t points = grid.size();
  const std::size_t ns = config.n_list.size();
  std::vector<GridPointError> detail(points * ns);
  const std::uint64_t warmup = config.kind == ProcessorKind::bernoulli ? 0 : config.warmup;

  parallel_for(
      points * ns,
      [&](std::size_t cell) {
        const std::size_t ni = cell / points;
        const std::size_t m = cell % points;
        const std::uint64_t n = config.n_list[ni];
        const double theta = grid[m];
        const UnitVector2 y = UnitVector2::from_angle(theta);
        Processor proc(config.kind, config.alpha, config.seed + m);
        for (std::uint64_t i = 0; i < warmup; ++i) proc.step(y);
        std::uint64_t ones = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
          ones += static_cast<std::uint64_t>(proc.step(y).theta_bit);
        }
        const double estimate = std::asin(std::sqrt(static_cast<double>(ones) / static_cast<double>(n)));
        detail[cell] = {n, m, theta, estimate, (theta - estimate) * (theta - estimate)};
      },
      config.threads);
  return detail;
}

BenchResult summarize(const std::vector<GridPointError>& detail, std::uint64_t resolution) {
  BenchResult result;
  const std::size_t points = resolution + 1;
  for (std::size_t start = 0; start + points <= detail.size(); start += points) {
    double sum = 0.0;
    for (std::size_t m = 0; m < points; ++m) sum += detail[start + m].squared_error;
    result.rows.push_back({detail[start].n, std::sqrt(sum / static_cast<double>(points))});
  }
  return result;
}

BenchResult run_benchmark(const BenchConfig& config) {
  return summarize(benchmark_detail(config), config.grid_resolution);
}

std::vector<GridPointError> uniform_grid_degradation(const BenchConfig& config) {
  if (config.grid != GridKind::uniform) {
    throw std::invalid_argument("uniform_grid_degradation needs the uniform grid");
  }
  return benchmark_detail(config);
}

void write_bench_csv(std::ostream& out, const BenchConfig& config, const BenchResult& result) {
  out << "kind,grid,alpha,M,N,e_of_N\n";
  for (const auto& row : result.rows) {
    out << to_string(config.kind) << ',' << to_string(config.grid) << ',' << fmt_real(config.alpha) << ','
        << config.grid_resolution << ',' << row.n << ',' << fmt_real(row.error) << '\n';
  }
}

void write_bench_detail_csv(std::ostream& out, const BenchConfig& config, const std::vector<GridPointError>& detail) {
  out << "kind,grid,alpha,M,N,m,theta,estimate,squared_error\n";
  for (const auto& d : detail) {
    out << to_string(config.kind) << ',' << to_string(config.grid) << ',' << fmt_real(config.alpha) << ','
        << config.grid_resolution << ',' << d.n << ',' << d.m << ',' << fmt_real(d.theta) << ','
        << fmt_real(d.estimate) << ',' << fmt_real(d.squared_error) << '\n';
  }
}

}  // namespace ebsim
