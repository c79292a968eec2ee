#include <doctest.h>

#include <cmath>

#include "beliefvar/doubling.hpp"
#include "beliefvar/oracle.hpp"
#include "helpers/dirichlet_moments.hpp"
#include "helpers/test_nets.hpp"

using namespace beliefvar;
namespace bt = beliefvar::testing;

TEST_CASE("doubled row with shared parent carries Dirichlet second moments") {
  const DirichletRow row({1.0, 1.0});
  const auto table = double_cpt_row(row, true);
  CHECK(table[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(table[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(table[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(table[3] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("doubled row matches closed-form cross moments on random rows") {
  Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const int card = 2 + static_cast<int>(rng.next_u64() % 4);
    std::vector<double> alpha(static_cast<std::size_t>(card));
    for (double& a : alpha) a = 0.2 + 12.0 * rng.uniform();
    const DirichletRow row(alpha);
    const auto table = double_cpt_row(row, true);
    for (int b1 = 0; b1 < card; ++b1)
      for (int b2 = 0; b2 < card; ++b2)
        CHECK(table[static_cast<std::size_t>(b1) * card + b2] ==
              doctest::Approx(bt::dirichlet_cross_moment(row, b1, b2))
                  .epsilon(1e-13));
  }
}

TEST_CASE("doubled row for distinct parents is the outer product of means") {
  const DirichletRow a({2.0, 3.0});
  const DirichletRow b({1.0, 4.0});
  const auto table = double_cpt_row(a, b);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(table[static_cast<std::size_t>(i) * 2 + j] ==
            doctest::Approx(a.mean(i) * b.mean(j)).epsilon(1e-15));
}

TEST_CASE("doubled rows sum to one") {
  Rng rng(72);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> alpha = {0.3 + rng.uniform(), 0.3 + rng.uniform(),
                                 0.3 + rng.uniform()};
    const DirichletRow row(alpha);
    for (bool same : {true, false}) {
      const auto table = double_cpt_row(row, same);
      double total = 0.0;
      for (double x : table) total += x;
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("doubled network squares table dimensions") {
  const Network net = bt::make_net({2, 2}, {{}, {0}},
                                   {{{1.0, 1.0}}, {{1.0, 2.0}, {2.0, 1.0}}});
  const DoubledNetwork dbl(net);
  CHECK(dbl.num_vars() == 2);
  CHECK(dbl.var_cardinality(0) == 4);
  CHECK(dbl.var_cardinality(1) == 4);
  // Root: single config, entries (1/3, 1/6, 1/6, 1/3) for alpha = (1,1).
  CHECK(dbl.prob(0, 0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(dbl.prob(0, 0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  // Child: 4 doubled parent configs of 4 entries each; mixed parent pairs
  // are outer products of distinct rows.
  const int mixed_config = dbl.pair_value(0, 0, 1);
  const double expect = net.row(1, 0).mean(1) * net.row(1, 1).mean(0);
  CHECK(dbl.prob(1, mixed_config, dbl.pair_value(1, 1, 0)) ==
        doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("marginalizing the second replicate recovers the mean network") {
  const Network net = bt::random_net({2, 3, 2}, {{}, {0}, {1}}, 321);
  const DoubledNetwork dbl(net);
  for (int v = 0; v < net.num_variables(); ++v) {
    const int d = net.cardinality(v);
    // Doubled parent configs whose replicates agree, so the single-network
    // row is well defined.
    for (int c = 0; c < net.parent_config_count(v); ++c) {
      const auto values = net.parent_values_of_config(v, c);
      int doubled_config = 0;
      for (std::size_t j = 0; j < values.size(); ++j) {
        const int dp = net.cardinality(net.parents(v)[j]);
        doubled_config = doubled_config * dp * dp + values[j] * dp + values[j];
      }
      for (int b1 = 0; b1 < d; ++b1) {
        double sum = 0.0;
        for (int b2 = 0; b2 < d; ++b2)
          sum += dbl.prob(v, doubled_config, dbl.pair_value(v, b1, b2));
        CHECK(sum == doctest::Approx(net.row(v, c).mean(b1)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("chain query: q2 equals q1 and v2 is the exact variance") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const Network net = bt::random_chain(seed);
    Assignment h, e;
    h.set(2, 1);
    e.set(0, 0);
    const Query q(h, e);
    const auto [q2, v2] = estimate_q2_v2(net, q);
    CHECK(q2 == doctest::Approx(bt::chain_exact_mean(net, 0, 1)).epsilon(1e-12));
    CHECK(q2 == doctest::Approx(estimate_q1(net, q)).epsilon(1e-12));
    CHECK(v2 ==
          doctest::Approx(bt::chain_exact_variance(net, 0, 1)).epsilon(1e-10));
  }
}

TEST_CASE("single-root doubling recovers the Dirichlet variance") {
  const Network net = bt::single_root(2.0, 6.0);
  Assignment h;
  h.set(0, 0);
  const auto [q2, v2] = estimate_q2_v2(net, Query(h, Assignment{}));
  const double pi = 0.25;
  CHECK(q2 == doctest::Approx(pi).epsilon(1e-13));
  CHECK(v2 == doctest::Approx(pi * (1 - pi) / 9.0).epsilon(1e-12));
}

TEST_CASE("hypothesis contained in evidence degenerates to (1, 0)") {
  const Network net = bt::random_chain(9);
  Assignment h, e;
  h.set(1, 0);
  e.set(1, 0);
  e.set(2, 1);
  const auto [q2, v2] = estimate_q2_v2(net, Query(h, e));
  CHECK(q2 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(v2 == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("replicate symmetry: selecting replicate two gives the same answer") {
  const Network net = bt::random_net({2, 2, 2}, {{}, {0}, {0}}, 17);
  Assignment h, e;
  h.set(2, 1);
  e.set(1, 0);
  const Query q(h, e);
  const auto [q2, v2] = estimate_q2_v2(net, q);

  // Recompute with the hypothesis read off the second replicate.
  const DoubledNetwork dbl(net);
  Assignment doubled_e;
  doubled_e.set(1, dbl.pair_value(1, 0, 0));
  const Factor f = collect_marginal(dbl, doubled_e, {2});
  double den = 0.0, num_second = 0.0, num_both = 0.0;
  for (int pair = 0; pair < 4; ++pair) {
    const double mass = f.table()[static_cast<std::size_t>(pair)];
    den += mass;
    const int b1 = dbl.first_of_pair(2, pair);
    const int b2 = pair - b1 * 2;
    if (b2 == 1) num_second += mass;
    if (b1 == 1 && b2 == 1) num_both += mass;
  }
  const double q2_swapped = num_second / den;
  const double v2_swapped = num_both / den - q2_swapped * q2_swapped;
  CHECK(q2 == doctest::Approx(q2_swapped).epsilon(1e-14));
  CHECK(v2 == doctest::Approx(v2_swapped).epsilon(1e-12));
}

TEST_CASE("v2 shrinks to zero as the effective sample size grows") {
  const Network base = bt::random_net({2, 2, 2}, {{}, {0}, {0}}, 53);
  Assignment h, e;
  h.set(0, 0);
  e.set(1, 1);
  const Query q(h, e);
  double previous = 1.0;
  for (double factor : {1.0, 10.0, 100.0, 1000.0}) {
    const Network scaled = scale_effective_sample_size(base, factor);
    const auto [q2, v2] = estimate_q2_v2(scaled, q);
    CHECK(v2 < previous);
    previous = v2;
  }
  CHECK(previous < 1e-4);
}

TEST_CASE("evidence moments: empty evidence and a single root") {
  const Network root = bt::single_root(1.0, 1.0);
  const EvidenceMoments empty = evidence_moments(root, Assignment{});
  CHECK(empty.mu_r == 1.0);
  CHECK(empty.sigma_rr == 0.0);

  Assignment e;
  e.set(0, 0);
  const EvidenceMoments m = evidence_moments(root, e);
  CHECK(m.mu_r == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m.sigma_rr == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
}

TEST_CASE("evidence moments match Monte-Carlo moments of R") {
  const Network net = bt::random_net({2, 2, 2}, {{}, {0}, {0}}, 1001);
  Assignment e;
  e.set(1, 0);
  e.set(2, 1);
  const EvidenceMoments exact = evidence_moments(net, e);

  const int k = 40000;
  detail::MomentAccumulator acc;
  Rng rng(2024);
  ParameterAssignment params = net.posterior_means();
  for (int i = 0; i < k; ++i) {
    sample_parameters_into(net, rng, params);
    acc.add(joint_prob(net, params, e));
  }
  const double mc_var = acc.m2 / (k - 1);
  const double se_mean = std::sqrt(mc_var / k);
  const double var_of_var =
      (acc.m4 / k - (k - 3.0) / (k - 1.0) * mc_var * mc_var) / k;
  const double se_var = std::sqrt(var_of_var);
  CHECK(std::abs(exact.mu_r - acc.mean) < 4.0 * se_mean);
  CHECK(std::abs(exact.sigma_rr - mc_var) < 4.0 * se_var);

  CHECK(exact.sigma_rr >= 0.0);
  CHECK(exact.sigma_rr <= exact.mu_r * (1.0 - exact.mu_r));
}

TEST_CASE("v2 exactness on chains agrees with the Monte-Carlo oracle") {
  const Network net = bt::random_chain(77);
  Assignment h, e;
  h.set(2, 0);
  e.set(0, 1);
  const Query q(h, e);
  const auto [q2, v2] = estimate_q2_v2(net, q);

  OracleConfig cfg;
  cfg.sample_count = 30000;
  cfg.seed = 4242;
  const OracleResult r = mc_estimates(net, q, cfg);
  CHECK(std::abs(v2 - r.v0) < 4.0 * r.se_var);
  CHECK(std::abs(q2 - r.q0) < 4.0 * r.se_mean);
}
