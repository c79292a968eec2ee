#ifndef BELIEFVAR_EXPERIMENT_HPP
#define BELIEFVAR_EXPERIMENT_HPP

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "beliefvar/adjustments.hpp"
#include "beliefvar/benchmarks.hpp"
#include "beliefvar/oracle.hpp"

namespace beliefvar {

/// One (benchmark, m, query) cell of an experiment run: all estimators, the
/// oracle, scaled errors, and optional per-method wall times.
struct ResultRow {
  std::string bench;
  double m = 0.0;
  std::string query_id;
  double q0 = 0.0, q1 = 0.0, q2 = 0.0, q3 = 0.0, q4 = 0.0;
  double v0 = 0.0, v1 = 0.0, v2 = 0.0, v3 = 0.0, v4 = 0.0;
  double se_q0 = 0.0, se_v0 = 0.0;
  double eq1 = 0.0, eq2 = 0.0, eq3 = 0.0, eq4 = 0.0;  // m (qj - q0)
  double ev1 = 0.0, ev2 = 0.0, ev3 = 0.0, ev4 = 0.0;  // m (vj - v0) / v0
  double t_delta = 0.0, t_double = 0.0;
  FixedPointResult v3_solve, v4_solve;
};

/// Canonical textual id of a query ("A=v0|B=v1;C=v0", ';'-separated evidence
/// so the id stays a single CSV field).
inline std::string query_id(const Network& net, const Query& q) {
  std::string id;
  bool first = true;
  for (const auto& [var, value] : q.hypothesis.items()) {
    if (!first) id += ';';
    first = false;
    id += net.variable(var).name() + "=" + net.variable(var).domain()[static_cast<std::size_t>(value)];
  }
  id += '|';
  first = true;
  for (const auto& [var, value] : q.evidence.items()) {
    if (!first) id += ';';
    first = false;
    id += net.variable(var).name() + "=" + net.variable(var).domain()[static_cast<std::size_t>(value)];
  }
  return id;
}

namespace detail {

/// Per-cell oracle seed, a pure function of the cell identity so any cell
/// recomputed in isolation reproduces its batch value.
inline std::uint64_t cell_seed(std::uint64_t master, const std::string& bench,
                               double m, const std::string& qid) {
  std::uint64_t s = master;
  s ^= fnv1a(bench) * 0x9e3779b97f4a7c15ULL;
  s ^= std::bit_cast<std::uint64_t>(m) * 0xc2b2ae3d27d4eb4fULL;
  s ^= fnv1a(qid) * 0x165667b19e3779f9ULL;
  splitmix64(s);
  return s;
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace detail

/// Runs every query of a benchmark over its m grid: full estimate bundle,
/// oracle, scaled errors. Cells are independent and may be computed by
/// `threads` workers; row order in the result is fixed (m-major, then query)
/// regardless of scheduling. With `timings` false the t_delta/t_double
/// columns are zero and the run is bit-reproducible.
inline std::vector<ResultRow> run_error_table(const Benchmark& bench,
                                              const OracleConfig& oracle_cfg,
                                              bool timings = false,
                                              int threads = 1) {
  struct Cell {
    double m;
    std::size_t query_index;
  };
  std::vector<Cell> cells;
  for (double m : bench.m_grid)
    for (std::size_t qi = 0; qi < bench.queries.size(); ++qi)
      cells.push_back({m, qi});

  if (oracle_cfg.sample_count < 10000)
    std::cerr << "warning: oracle k = " << oracle_cfg.sample_count
              << " is below the recommended 1e4\n";
  for (double m : bench.m_grid)
    if (static_cast<double>(oracle_cfg.sample_count) < m * m)
      std::cerr << "warning: oracle k = " << oracle_cfg.sample_count
                << " < m^2 for m = " << m
                << "; the oracle will not out-resolve the approximations\n";

  // One network/doubled network pair per m, shared read-only by workers.
  std::map<double, std::pair<Network, DoubledNetwork>> nets;
  for (double m : bench.m_grid) {
    Network net = bench.network_for(m);
    DoubledNetwork dbl(net);
    nets.emplace(m, std::pair<Network, DoubledNetwork>(std::move(net),
                                                       std::move(dbl)));
  }

  std::vector<ResultRow> rows(cells.size());
  const auto run_cell = [&](std::size_t i) {
    const auto& cell = cells[i];
    const auto& [net, dbl] = nets.at(cell.m);
    const Query& q = bench.queries[cell.query_index];

    ResultRow row;
    row.bench = bench.name;
    row.m = cell.m;
    row.query_id = query_id(net, q);

    EstimateBundle bundle;
    if (timings) {
      const auto t0 = std::chrono::steady_clock::now();
      row.v1 = variance_v1(net, q);
      row.t_delta = detail::seconds_since(t0);
      const auto t1 = std::chrono::steady_clock::now();
      const auto d = doubled_query_estimates(dbl, q);
      row.t_double = detail::seconds_since(t1);
      (void)d;
    }
    bundle = full_bundle(net, dbl, q);

    OracleConfig cell_cfg = oracle_cfg;
    cell_cfg.seed = detail::cell_seed(oracle_cfg.seed, bench.name, cell.m,
                                      row.query_id);
    cell_cfg.threads = 1;  // parallelism lives at the cell level
    const OracleResult oracle = mc_estimates(net, q, cell_cfg);

    row.q0 = oracle.q0;
    row.v0 = oracle.v0;
    row.se_q0 = oracle.se_mean;
    row.se_v0 = oracle.se_var;
    row.q1 = bundle.q1;
    row.q2 = bundle.q2;
    row.q3 = bundle.q3;
    row.q4 = bundle.q4;
    row.v1 = bundle.v1;
    row.v2 = bundle.v2;
    row.v3 = bundle.v3;
    row.v4 = bundle.v4;
    row.v3_solve = bundle.v3_solve;
    row.v4_solve = bundle.v4_solve;
    row.eq1 = cell.m * (row.q1 - row.q0);
    row.eq2 = cell.m * (row.q2 - row.q0);
    row.eq3 = cell.m * (row.q3 - row.q0);
    row.eq4 = cell.m * (row.q4 - row.q0);
    row.ev1 = cell.m * (row.v1 - row.v0) / row.v0;
    row.ev2 = cell.m * (row.v2 - row.v0) / row.v0;
    row.ev3 = cell.m * (row.v3 - row.v0) / row.v0;
    row.ev4 = cell.m * (row.v4 - row.v0) / row.v0;
    rows[i] = std::move(row);
  };

  if (threads <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = cursor.fetch_add(1);
          if (i >= cells.size()) return;
          run_cell(i);
        }
      });
    for (auto& t : pool) t.join();
  }
  return rows;
}

/// %.17g round-trippable formatting used for every CSV float field.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void write_results_csv(std::ostream& os,
                              const std::vector<ResultRow>& rows) {
  os << "# beliefvar-results v1\n";
  os << "bench,m,query,q0,q1,q2,q3,q4,v0,v1,v2,v3,v4,se_q0,se_v0,"
        "eq1,eq2,eq3,eq4,ev1,ev2,ev3,ev4,t_delta,t_double\n";
  for (const auto& r : rows) {
    os << r.bench << ',' << format_double(r.m) << ',' << r.query_id;
    for (double x : {r.q0, r.q1, r.q2, r.q3, r.q4, r.v0, r.v1, r.v2, r.v3,
                     r.v4, r.se_q0, r.se_v0, r.eq1, r.eq2, r.eq3, r.eq4,
                     r.ev1, r.ev2, r.ev3, r.ev4, r.t_delta, r.t_double})
      os << ',' << format_double(x);
    os << '\n';
  }
}

/// Least-squares slopes of log-error against log-m, one per estimator and
/// query, with oracle-noise masking: a point enters the mean-error fit only
/// when |qj - q0| >= 3 se_q0, and the variance fit only when
/// |vj - v0| >= 3 se_v0. Slopes with fewer than two surviving points are
/// absent.
struct RateFit {
  std::string bench;
  std::string query_id;
  std::optional<double> mean_slope[5];  // index j = 1..4 used
  std::optional<double> var_slope[5];
  int mean_points[5] = {0, 0, 0, 0, 0};
  int var_points[5] = {0, 0, 0, 0, 0};
};

inline std::vector<RateFit> fit_convergence_rates(
    const std::vector<ResultRow>& rows) {
  std::map<std::pair<std::string, std::string>, std::vector<const ResultRow*>>
      grouped;
  for (const auto& r : rows) grouped[{r.bench, r.query_id}].push_back(&r);

  std::vector<RateFit> fits;
  for (const auto& [key, group] : grouped) {
    if (group.size() < 3)
      throw InsufficientData("need at least 3 values of m per query");
    RateFit fit;
    fit.bench = key.first;
    fit.query_id = key.second;

    const auto slope_of = [](const std::vector<std::pair<double, double>>& pts)
        -> std::optional<double> {
      if (pts.size() < 2) return std::nullopt;
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double n = static_cast<double>(pts.size());
      return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };

    for (int j = 1; j <= 4; ++j) {
      std::vector<std::pair<double, double>> mean_pts, var_pts;
      for (const ResultRow* r : group) {
        const double qj = (j == 1 ? r->q1 : j == 2 ? r->q2 : j == 3 ? r->q3
                                                                    : r->q4);
        const double vj = (j == 1 ? r->v1 : j == 2 ? r->v2 : j == 3 ? r->v3
                                                                    : r->v4);
        const double mean_err = std::abs(qj - r->q0);
        if (mean_err >= 3.0 * r->se_q0 && mean_err > 0.0)
          mean_pts.push_back({std::log(r->m), std::log(mean_err)});
        const double var_err = std::abs(vj - r->v0);
        if (var_err >= 3.0 * r->se_v0 && var_err > 0.0 && r->v0 > 0.0)
          var_pts.push_back({std::log(r->m), std::log(var_err / r->v0)});
      }
      fit.mean_points[j] = static_cast<int>(mean_pts.size());
      fit.var_points[j] = static_cast<int>(var_pts.size());
      fit.mean_slope[j] = slope_of(mean_pts);
      fit.var_slope[j] = slope_of(var_pts);
    }
    fits.push_back(std::move(fit));
  }
  return fits;
}

/// Wall-clock comparison of the two variance methods over a query batch.
struct TimingRow {
  std::string net_name;
  int queries = 0;
  int repeats = 1;
  double t_delta = 0.0;
  double t_double = 0.0;
  double ratio = 0.0;  // t_double / t_delta
};

inline std::vector<TimingRow> run_timing_bench(
    const std::vector<std::pair<std::string, Network>>& nets,
    const std::vector<std::vector<Query>>& query_sets, int repeats) {
  std::vector<TimingRow> out;
  for (std::size_t i = 0; i < nets.size(); ++i) {
    const auto& [name, net] = nets[i];
    const auto& queries = query_sets.at(i);
    if (queries.empty()) continue;

    TimingRow row;
    row.net_name = name;
    row.queries = static_cast<int>(queries.size());
    row.repeats = repeats;

    {
      const auto t0 = std::chrono::steady_clock::now();
      for (int r = 0; r < repeats; ++r)
        for (const Query& q : queries) (void)variance_v1(net, q);
      row.t_delta = detail::seconds_since(t0);
    }
    {
      const auto t0 = std::chrono::steady_clock::now();
      const DoubledNetwork dbl(net);
      for (int r = 0; r < repeats; ++r)
        for (const Query& q : queries) (void)doubled_query_estimates(dbl, q);
      row.t_double = detail::seconds_since(t0);
    }
    row.ratio = row.t_double / row.t_delta;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace beliefvar

#endif  // BELIEFVAR_EXPERIMENT_HPP
