#ifndef BELIEFVAR_ORACLE_HPP
#define BELIEFVAR_ORACLE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "beliefvar/errors.hpp"
#include "beliefvar/inference.hpp"
#include "beliefvar/network.hpp"
#include "beliefvar/query.hpp"
#include "beliefvar/rng.hpp"

namespace beliefvar {

struct OracleConfig {
  std::int64_t sample_count = 100000;  // k
  std::uint64_t seed = 0;
  std::int64_t chunk_size = 16384;  // work-unit granularity, not result-affecting
  int threads = 1;
};

struct OracleResult {
  double q0 = 0.0;       // sample mean of q(Theta)
  double v0 = 0.0;       // sample variance, divisor k-1
  double se_mean = 0.0;  // sqrt(v0 / k)
  double se_var = 0.0;   // fourth-moment standard error of v0
  std::int64_t k_effective = 0;
};

/// One posterior draw: every CPT row independently Dirichlet(alpha_row).
inline void sample_parameters_into(const Network& net, Rng& rng,
                                   ParameterAssignment& out) {
  for (int v = 0; v < net.num_variables(); ++v) {
    auto& t = out.tables[static_cast<std::size_t>(v)];
    for (int config = 0; config < t.configs; ++config) {
      const auto& alpha = net.row(v, config).alphas();
      rng.dirichlet(alpha,
                    std::span<double>(t.p).subspan(
                        static_cast<std::size_t>(config) * t.cardinality,
                        static_cast<std::size_t>(t.cardinality)));
    }
  }
}

inline ParameterAssignment sample_parameters(const Network& net,
                                             std::uint64_t seed) {
  ParameterAssignment params = net.posterior_means();  // right shape
  Rng rng(seed);
  sample_parameters_into(net, rng, params);
  return params;
}

namespace detail {

// Fixed accumulation block. Streams are derived per block from (seed, block
// index) and block accumulators are merged in block order, so results do not
// depend on the thread count or on chunk_size.
constexpr std::int64_t kOracleBlock = 1024;

/// Running central moments up to order four (count, mean, M2, M3, M4).
struct MomentAccumulator {
  double n = 0.0, mean = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;

  void add(double x) {
    const double n1 = n;
    n += 1.0;
    const double delta = x - mean;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean += delta_n;
    m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2 -
          4.0 * delta_n * m3;
    m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2;
    m2 += term1;
  }

  void merge(const MomentAccumulator& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double na = n, nb = o.n, nn = na + nb;
    const double delta = o.mean - mean;
    const double d2 = delta * delta;
    const double m4n = m4 + o.m4 +
                       d2 * d2 * na * nb * (na * na - na * nb + nb * nb) /
                           (nn * nn * nn) +
                       6.0 * d2 * (na * na * o.m2 + nb * nb * m2) / (nn * nn) +
                       4.0 * delta * (na * o.m3 - nb * m3) / nn;
    const double m3n = m3 + o.m3 +
                       delta * d2 * na * nb * (na - nb) / (nn * nn) +
                       3.0 * delta * (na * o.m2 - nb * m2) / nn;
    const double m2n = m2 + o.m2 + d2 * na * nb / nn;
    mean = mean + delta * nb / nn;
    m2 = m2n;
    m3 = m3n;
    m4 = m4n;
    n = nn;
  }
};

}  // namespace detail

/// Monte-Carlo ground truth: draws Theta from the posterior, evaluates the
/// query per draw, and reports the sample mean and variance with standard
/// errors. Bit-reproducible for fixed (network, query, k, seed) at any
/// thread count.
inline OracleResult mc_estimates(const Network& net, const Query& q,
                                 const OracleConfig& cfg) {
  if (cfg.sample_count < 2) throw Error("oracle needs sample_count >= 2");
  if (cfg.chunk_size < 1) throw Error("oracle chunk_size must be positive");

  // Elimination order depends only on structure/evidence/keep, so warm the
  // cache once on the means and share it read-only across blocks.
  std::vector<int> order_cache;
  {
    ParameterAssignment means = net.posterior_means();
    (void)model_query(TableModel(net, means), q, &order_cache);
  }

  const std::int64_t k = cfg.sample_count;
  const std::int64_t num_blocks =
      (k + detail::kOracleBlock - 1) / detail::kOracleBlock;
  std::vector<detail::MomentAccumulator> blocks(
      static_cast<std::size_t>(num_blocks));
  std::vector<std::int64_t> skipped(static_cast<std::size_t>(num_blocks), 0);

  const auto run_block = [&](std::int64_t block) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(block));
    ParameterAssignment params = net.posterior_means();
    const TableModel model(net, params);
    auto& acc = blocks[static_cast<std::size_t>(block)];
    const std::int64_t begin = block * detail::kOracleBlock;
    const std::int64_t end = std::min(k, begin + detail::kOracleBlock);
    for (std::int64_t i = begin; i < end; ++i) {
      sample_parameters_into(net, rng, params);
      double value;
      try {
        value = model_query(model, q, &order_cache);
      } catch (const ZeroEvidenceProbability&) {
        // Interior Dirichlet draws make this a measure-zero event; guard it
        // anyway so a pathological query cannot poison the moments.
        ++skipped[static_cast<std::size_t>(block)];
        continue;
      }
      acc.add(value);
    }
  };

  const int threads = std::max(1, cfg.threads);
  if (threads == 1 || num_blocks == 1) {
    for (std::int64_t b = 0; b < num_blocks; ++b) run_block(b);
  } else {
    // Blocks are grouped into chunks of ceil(chunk_size / block) blocks and
    // handed out by an atomic cursor; assignment order is irrelevant because
    // the merge below is in block order.
    const std::int64_t blocks_per_chunk =
        std::max<std::int64_t>(1, cfg.chunk_size / detail::kOracleBlock);
    std::atomic<std::int64_t> cursor{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (;;) {
          const std::int64_t chunk = cursor.fetch_add(1);
          const std::int64_t first = chunk * blocks_per_chunk;
          if (first >= num_blocks) return;
          const std::int64_t last =
              std::min(num_blocks, first + blocks_per_chunk);
          for (std::int64_t b = first; b < last; ++b) run_block(b);
        }
      });
    for (auto& t : pool) t.join();
  }

  detail::MomentAccumulator total;
  std::int64_t total_skipped = 0;
  for (std::int64_t b = 0; b < num_blocks; ++b) {
    total.merge(blocks[static_cast<std::size_t>(b)]);
    total_skipped += skipped[static_cast<std::size_t>(b)];
  }

  OracleResult r;
  r.k_effective = k - total_skipped;
  if (r.k_effective < 2) throw Error("too few retained oracle samples");
  const double n = total.n;
  r.q0 = total.mean;
  r.v0 = total.m2 / (n - 1.0);
  r.se_mean = std::sqrt(r.v0 / n);
  const double var_of_var =
      (total.m4 / n - (n - 3.0) / (n - 1.0) * r.v0 * r.v0) / n;
  r.se_var = std::sqrt(std::max(0.0, var_of_var));
  return r;
}

}  // namespace beliefvar

#endif  // BELIEFVAR_ORACLE_HPP
