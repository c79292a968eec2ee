#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "beliefvar/factor.hpp"
#include "beliefvar/rng.hpp"

using namespace beliefvar;

namespace {

Factor random_factor(Rng& rng, std::vector<int> scope, std::vector<int> cards) {
  std::size_t total = 1;
  for (int c : cards) total *= static_cast<std::size_t>(c);
  std::vector<double> table(total);
  for (double& x : table) x = rng.uniform();
  return Factor(std::move(scope), std::move(cards), std::move(table));
}

/// Direct summed-product over all joint configurations of `vars`.
double exhaustive_sum(const std::vector<Factor>& factors,
                      const std::vector<int>& vars,
                      const std::vector<int>& cards,
                      const std::vector<int>& fixed_vars,
                      const std::vector<int>& fixed_values) {
  std::vector<int> state(vars.size(), 0);
  double total = 0.0;
  for (;;) {
    bool consistent = true;
    for (std::size_t i = 0; i < fixed_vars.size(); ++i) {
      const auto pos = static_cast<std::size_t>(
          std::find(vars.begin(), vars.end(), fixed_vars[i]) - vars.begin());
      if (state[pos] != fixed_values[i]) consistent = false;
    }
    if (consistent) {
      double p = 1.0;
      for (const auto& f : factors) {
        std::vector<int> values;
        for (int v : f.scope()) {
          const auto pos = static_cast<std::size_t>(
              std::find(vars.begin(), vars.end(), v) - vars.begin());
          values.push_back(state[pos]);
        }
        p *= f.at(values);
      }
      total += p;
    }
    bool done = true;
    for (std::size_t pos = vars.size(); pos-- > 0;) {
      if (++state[pos] < cards[pos]) {
        done = false;
        break;
      }
      state[pos] = 0;
    }
    if (done) break;
  }
  return total;
}

}  // namespace

TEST_CASE("eliminate with keep = full scope is the identity") {
  Rng rng(1);
  const Factor f = random_factor(rng, {0, 2}, {2, 3});
  const std::vector<int> keep = {0, 2};
  const Factor r = eliminate({f}, keep);
  REQUIRE(r.scope() == f.scope());
  for (std::size_t i = 0; i < f.table().size(); ++i)
    CHECK(r.table()[i] == doctest::Approx(f.table()[i]).epsilon(1e-15));
}

TEST_CASE("two-factor elimination matches exhaustive enumeration") {
  Rng rng(2);
  const Factor f = random_factor(rng, {0}, {2});
  const Factor g = random_factor(rng, {0, 1}, {2, 2});
  const std::vector<int> keep = {1};
  const Factor r = eliminate({f, g}, keep);
  REQUIRE(r.scope() == std::vector<int>{1});
  for (int b = 0; b < 2; ++b) {
    double expect = 0.0;
    for (int a = 0; a < 2; ++a)
      expect += f.at(std::vector<int>{a}) * g.at(std::vector<int>{a, b});
    CHECK(r.table()[static_cast<std::size_t>(b)] ==
          doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("eliminate with empty keep returns the total sum") {
  Rng rng(3);
  const Factor f = random_factor(rng, {0, 1}, {3, 2});
  const Factor g = random_factor(rng, {1, 2}, {2, 4});
  const Factor r = eliminate({f, g}, {});
  REQUIRE(r.is_scalar());
  const double expect =
      exhaustive_sum({f, g}, {0, 1, 2}, {3, 2, 4}, {}, {});
  CHECK(r.scalar() == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("any elimination order yields the same result") {
  Rng rng(4);
  // Five factors over five variables with mixed cardinalities.
  std::vector<Factor> factors;
  factors.push_back(random_factor(rng, {0, 1}, {2, 3}));
  factors.push_back(random_factor(rng, {1, 2}, {3, 2}));
  factors.push_back(random_factor(rng, {2, 3}, {2, 2}));
  factors.push_back(random_factor(rng, {0, 4}, {2, 3}));
  factors.push_back(random_factor(rng, {3, 4}, {2, 3}));

  const std::vector<int> keep = {4};
  std::vector<int> order = {0, 1, 2, 3};
  std::vector<std::vector<double>> results;
  do {
    const Factor r = eliminate(factors, keep, &order);
    REQUIRE(r.scope() == keep);
    results.push_back(r.table());
  } while (std::next_permutation(order.begin(), order.end()));

  for (int b = 0; b < 3; ++b) {
    const double expect = exhaustive_sum(factors, {0, 1, 2, 3, 4},
                                         {2, 3, 2, 2, 3}, {4}, {b});
    for (const auto& table : results)
      CHECK(table[static_cast<std::size_t>(b)] ==
            doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("restrict slices one variable at a value") {
  Rng rng(5);
  const Factor f = random_factor(rng, {0, 1, 2}, {2, 3, 2});
  const Factor r = restrict_var(f, 1, 2);
  REQUIRE(r.scope() == std::vector<int>{0, 2});
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c)
      CHECK(r.at(std::vector<int>{a, c}) ==
            f.at(std::vector<int>{a, 2, c}));
}

TEST_CASE("product rejects inconsistent cardinalities") {
  Rng rng(6);
  const Factor f = random_factor(rng, {0}, {2});
  const Factor g = random_factor(rng, {0}, {3});
  CHECK_THROWS_AS(product(f, g), ScopeMismatch);
  CHECK_THROWS_AS(eliminate({f, g}, {}), ScopeMismatch);
}

TEST_CASE("min-fill order is deterministic and covers all non-kept variables") {
  const std::vector<std::vector<int>> scopes = {{0, 1}, {1, 2}, {2, 3}, {0, 3}};
  const std::vector<int> keep = {3};
  const std::vector<int> a = min_fill_order(scopes, keep);
  const std::vector<int> b = min_fill_order(scopes, keep);
  CHECK(a == b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2});
}
