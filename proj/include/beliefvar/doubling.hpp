#ifndef BELIEFVAR_DOUBLING_HPP
#define BELIEFVAR_DOUBLING_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "beliefvar/errors.hpp"
#include "beliefvar/inference.hpp"
#include "beliefvar/network.hpp"
#include "beliefvar/query.hpp"

namespace beliefvar {

/// Doubled table of one CPT row over value pairs (b1, b2), pair index
/// b1 * d + b2. For a shared parent configuration the entries are the exact
/// Dirichlet cross moments
///   E{theta_{b1} theta_{b2}} = pi_{b1} pi_{b2}
///                              + pi_{b1} (delta_{b1 b2} - pi_{b2}) / (a. + 1);
/// for distinct parent configurations the rows are independent and the table
/// is the plain outer product of the two mean rows.
inline std::vector<double> double_cpt_row(const DirichletRow& row,
                                          bool same_parent) {
  const int d = row.size();
  std::vector<double> table(static_cast<std::size_t>(d) * d);
  const double denom = row.alpha_sum() + 1.0;
  for (int b1 = 0; b1 < d; ++b1) {
    const double p1 = row.mean(b1);
    for (int b2 = 0; b2 < d; ++b2) {
      const double p2 = row.mean(b2);
      double value = p1 * p2;
      if (same_parent) value += p1 * ((b1 == b2 ? 1.0 : 0.0) - p2) / denom;
      table[static_cast<std::size_t>(b1) * d + b2] = value;
    }
  }
  return table;
}

inline std::vector<double> double_cpt_row(const DirichletRow& row_a1,
                                          const DirichletRow& row_a2) {
  const int d = row_a1.size();
  std::vector<double> table(static_cast<std::size_t>(d) * d);
  for (int b1 = 0; b1 < d; ++b1)
    for (int b2 = 0; b2 < d; ++b2)
      table[static_cast<std::size_t>(b1) * d + b2] =
          row_a1.mean(b1) * row_a2.mean(b2);
  return table;
}

/// The doubled network: every variable B becomes the pair B* = (B1, B2) with
/// domain Dom_B x Dom_B, the DAG shape is unchanged, and each CPT holds the
/// posterior means of parameter products. The rows carry no Dirichlet
/// structure, only means; all that is needed of them is the product
/// factorization, which still holds in the doubled net.
class DoubledNetwork {
 public:
  explicit DoubledNetwork(const Network& net) {
    const int n = net.num_variables();
    base_cards_.resize(static_cast<std::size_t>(n));
    parents_.resize(static_cast<std::size_t>(n));
    cards_.resize(static_cast<std::size_t>(n));
    tables_.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      const int d = net.cardinality(v);
      base_cards_[static_cast<std::size_t>(v)] = d;
      parents_[static_cast<std::size_t>(v)] = net.parents(v);
      cards_[static_cast<std::size_t>(v)] = d * d;
      long long doubled_configs = 1;
      for (int p : net.parents(v)) {
        const int dp = net.cardinality(p);
        doubled_configs *= static_cast<long long>(dp) * dp;
      }
      auto& t = tables_[static_cast<std::size_t>(v)];
      t.reserve(static_cast<std::size_t>(doubled_configs));
      for (long long dc = 0; dc < doubled_configs; ++dc) {
        const auto [c1, c2] = split_config(net, v, dc);
        if (c1 == c2)
          t.push_back(double_cpt_row(net.row(v, c1), true));
        else
          t.push_back(double_cpt_row(net.row(v, c1), net.row(v, c2)));
      }
    }
  }

  // DiscreteModel surface.
  int num_vars() const { return static_cast<int>(cards_.size()); }
  int var_cardinality(int v) const {
    return cards_[static_cast<std::size_t>(v)];
  }
  const std::vector<int>& var_parents(int v) const {
    return parents_[static_cast<std::size_t>(v)];
  }
  double prob(int v, int config, int pair_value) const {
    return tables_[static_cast<std::size_t>(v)]
                  [static_cast<std::size_t>(config)]
                  [static_cast<std::size_t>(pair_value)];
  }

  /// Cardinality of variable v in the single network.
  int base_cardinality(int v) const {
    return base_cards_[static_cast<std::size_t>(v)];
  }

  /// Pair value index of (b1, b2) for variable v.
  int pair_value(int v, int b1, int b2) const {
    return b1 * base_cardinality(v) + b2;
  }

  /// First-replicate value encoded in a pair value.
  int first_of_pair(int v, int pair) const {
    return pair / base_cardinality(v);
  }

 private:
  // Splits a doubled parent configuration into the two single-network parent
  // configurations it encodes. Doubled configs are row-major over parents
  // with per-parent pair values (v1 * d_p + v2).
  static std::pair<int, int> split_config(const Network& net, int v,
                                          long long doubled_config) {
    const auto& parents = net.parents(v);
    std::vector<int> first(parents.size()), second(parents.size());
    for (std::size_t j = parents.size(); j-- > 0;) {
      const int dp = net.cardinality(parents[j]);
      const int pair = static_cast<int>(doubled_config % (dp * dp));
      doubled_config /= dp * dp;
      first[j] = pair / dp;
      second[j] = pair % dp;
    }
    return {net.parent_config_index(v, first),
            net.parent_config_index(v, second)};
  }

  std::vector<int> base_cards_;
  std::vector<std::vector<int>> parents_;
  std::vector<int> cards_;
  std::vector<std::vector<std::vector<double>>> tables_;  // [var][config][pair]
};

inline DoubledNetwork double_network(const Network& net) {
  return DoubledNetwork(net);
}

/// Mean and variance of the unconditional evidence probability
/// R = P(E = e | Theta). Both are exact: R is a sum of products of
/// independent parameters, so its first two moments are single- and
/// doubled-network evaluations.
struct EvidenceMoments {
  double mu_r = 1.0;
  double sigma_rr = 0.0;
};

/// Doubling estimates for one query, all read off a single doubled-network
/// elimination pass.
struct DoublingEstimates {
  double q2 = 0.0;            // E{w(H1) | e*, D}
  double v2 = 0.0;            // E{w*(H*) | e*, D} - q2^2, clamped at 0
  double evidence_pair_prob = 1.0;  // P*(E1 = E2 = e), the sigma_rr input
};

inline DoublingEstimates doubled_query_estimates(const DoubledNetwork& dbl,
                                                 const Query& q) {
  Assignment doubled_evidence;
  for (const auto& [var, value] : q.evidence.items())
    doubled_evidence.set(var, dbl.pair_value(var, value, value));

  std::vector<int> keep;
  for (const auto& [var, value] : q.hypothesis.items()) keep.push_back(var);

  Factor f = collect_marginal(dbl, doubled_evidence, keep);
  const double den = f.sum();
  if (den == 0.0)
    throw ZeroEvidenceProbability(
        "evidence has probability zero in the doubled network");

  // Kept scope = sorted hypothesis variables. Walk the table once,
  // accumulating the replicate-1 event mass and the both-replicates point.
  const auto& scope = f.scope();
  const auto& cards = f.cards();
  std::vector<int> want_first(scope.size());
  for (std::size_t i = 0; i < scope.size(); ++i)
    want_first[i] = *q.hypothesis.value_of(scope[i]);

  double num_first = 0.0, num_both = 0.0;
  std::vector<int> digits(scope.size(), 0);
  const std::size_t total = f.table().size();
  for (std::size_t idx = 0;; ++idx) {
    bool first_match = true, both_match = true;
    for (std::size_t i = 0; i < scope.size(); ++i) {
      const int b1 = dbl.first_of_pair(scope[i], digits[i]);
      const int b2 = digits[i] - b1 * dbl.base_cardinality(scope[i]);
      if (b1 != want_first[i]) {
        first_match = false;
        both_match = false;
        break;
      }
      if (b2 != want_first[i]) both_match = false;
    }
    if (first_match) num_first += f.table()[idx];
    if (both_match) num_both += f.table()[idx];
    if (idx + 1 == total) break;
    for (std::size_t pos = scope.size(); pos-- > 0;) {
      if (++digits[pos] < cards[pos]) break;
      digits[pos] = 0;
    }
  }

  DoublingEstimates out;
  out.evidence_pair_prob = den;
  out.q2 = num_first / den;
  const double second_moment = num_both / den;
  double v2 = second_moment - out.q2 * out.q2;
  if (v2 < 0.0) {
    if (v2 < -1e-12)
      throw NumericalInstability("doubled-network variance is negative");
    v2 = 0.0;
  }
  out.v2 = v2;
  return out;
}

/// (q2, v2) for a query; convenience over a freshly doubled network.
inline std::pair<double, double> estimate_q2_v2(const Network& net,
                                                const Query& q) {
  const DoublingEstimates est = doubled_query_estimates(DoubledNetwork(net), q);
  return {est.q2, est.v2};
}

inline std::pair<double, double> estimate_q2_v2(const DoubledNetwork& dbl,
                                                const Query& q) {
  const DoublingEstimates est = doubled_query_estimates(dbl, q);
  return {est.q2, est.v2};
}

inline EvidenceMoments evidence_moments(const Network& net,
                                        const Assignment& evidence) {
  EvidenceMoments out;
  if (evidence.empty()) return out;  // R is identically 1
  out.mu_r = evidence_probability(net, net.posterior_means(), evidence);

  const DoubledNetwork dbl(net);
  Assignment doubled_evidence;
  for (const auto& [var, value] : evidence.items())
    doubled_evidence.set(var, dbl.pair_value(var, value, value));
  const double second = model_joint_prob(dbl, doubled_evidence);
  out.sigma_rr = std::max(0.0, second - out.mu_r * out.mu_r);
  return out;
}

inline EvidenceMoments evidence_moments(const Network& net,
                                        const DoubledNetwork& dbl,
                                        const Assignment& evidence) {
  EvidenceMoments out;
  if (evidence.empty()) return out;
  out.mu_r = evidence_probability(net, net.posterior_means(), evidence);
  Assignment doubled_evidence;
  for (const auto& [var, value] : evidence.items())
    doubled_evidence.set(var, dbl.pair_value(var, value, value));
  const double second = model_joint_prob(dbl, doubled_evidence);
  out.sigma_rr = std::max(0.0, second - out.mu_r * out.mu_r);
  return out;
}

}  // namespace beliefvar

#endif  // BELIEFVAR_DOUBLING_HPP
