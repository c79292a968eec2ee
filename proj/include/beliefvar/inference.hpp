#ifndef BELIEFVAR_INFERENCE_HPP
#define BELIEFVAR_INFERENCE_HPP

#include <algorithm>
#include <vector>

#include "beliefvar/errors.hpp"
#include "beliefvar/factor.hpp"
#include "beliefvar/network.hpp"
#include "beliefvar/query.hpp"

namespace beliefvar {

// The inference engine is generic over a DiscreteModel: any structure that
// exposes variable count, cardinalities, parent lists and concrete
// conditional probability tables. The single network evaluated at posterior
// means, a network under sampled parameters, and the doubled network all
// satisfy it, so there is one sum-product code path.
template <typename M>
concept DiscreteModel = requires(const M& m, int v, int config, int value) {
  { m.num_vars() } -> std::convertible_to<int>;
  { m.var_cardinality(v) } -> std::convertible_to<int>;
  { m.var_parents(v) } -> std::convertible_to<const std::vector<int>&>;
  { m.prob(v, config, value) } -> std::convertible_to<double>;
};

/// Network + explicit probability tables (a sampled or user-supplied
/// ParameterAssignment). Non-owning.
class TableModel {
 public:
  TableModel(const Network& net, const ParameterAssignment& params)
      : net_(&net), params_(&params) {
    if (static_cast<int>(params.tables.size()) != net.num_variables())
      throw ScopeMismatch("parameter tables do not match the network");
  }
  int num_vars() const { return net_->num_variables(); }
  int var_cardinality(int v) const { return net_->cardinality(v); }
  const std::vector<int>& var_parents(int v) const { return net_->parents(v); }
  double prob(int v, int config, int value) const {
    return params_->tables[static_cast<std::size_t>(v)].at(config, value);
  }

 private:
  const Network* net_;
  const ParameterAssignment* params_;
};

/// Network evaluated at its posterior means pi.
class MeanModel {
 public:
  explicit MeanModel(const Network& net) : net_(&net) {}
  int num_vars() const { return net_->num_variables(); }
  int var_cardinality(int v) const { return net_->cardinality(v); }
  const std::vector<int>& var_parents(int v) const { return net_->parents(v); }
  double prob(int v, int config, int value) const {
    return net_->row(v, config).mean(value);
  }

 private:
  const Network* net_;
};

namespace detail {

/// Builds the CPT factor of variable v: scope = sorted(parents + v), table
/// row-major in scope order.
template <DiscreteModel M>
Factor cpt_factor(const M& m, int v) {
  const auto& parents = m.var_parents(v);
  std::vector<int> scope = parents;
  scope.push_back(v);
  std::sort(scope.begin(), scope.end());
  std::vector<int> cards(scope.size());
  for (std::size_t i = 0; i < scope.size(); ++i)
    cards[i] = m.var_cardinality(scope[i]);

  const auto pos_in_scope = [&scope](int var) {
    return static_cast<std::size_t>(
        std::lower_bound(scope.begin(), scope.end(), var) - scope.begin());
  };
  const std::size_t v_pos = pos_in_scope(v);
  std::vector<std::size_t> parent_pos(parents.size());
  for (std::size_t j = 0; j < parents.size(); ++j)
    parent_pos[j] = pos_in_scope(parents[j]);

  std::size_t total = 1;
  for (int c : cards) total *= static_cast<std::size_t>(c);
  std::vector<double> table(total);

  std::vector<int> digits(scope.size(), 0);
  for (std::size_t idx = 0;; ++idx) {
    int config = 0;
    for (std::size_t j = 0; j < parents.size(); ++j)
      config = config * m.var_cardinality(parents[j]) + digits[parent_pos[j]];
    table[idx] = m.prob(v, config, digits[v_pos]);

    if (idx + 1 == total) break;
    for (std::size_t pos = scope.size(); pos-- > 0;) {
      if (++digits[pos] < cards[pos]) break;
      digits[pos] = 0;
    }
  }
  return Factor(std::move(scope), std::move(cards), std::move(table));
}

}  // namespace detail

/// Core sum-product pass. Builds all CPT factors (optionally replacing one
/// variable's CPT with the factors in `extra`), applies the evidence, and
/// eliminates everything outside `keep`. Evidence on a kept variable is
/// applied as an indicator factor so the variable stays in the result scope;
/// evidence elsewhere is sliced out of every factor.
///
/// When `order_cache` is non-null and empty it is filled with the min-fill
/// order chosen here; when non-empty it is reused verbatim. The cached order
/// is valid for any model with the same structure, evidence set and keep set.
/// `fixed_order` overrides both: it is used as the elimination sequence with
/// no caching (it must cover exactly the variables to eliminate, and may be
/// empty to eliminate nothing).
template <DiscreteModel M>
Factor collect_marginal(const M& m, const Assignment& evidence,
                        std::vector<int> keep,
                        std::vector<Factor> extra = {},
                        int replace_cpt_of = -1,
                        std::vector<int>* order_cache = nullptr,
                        const std::vector<int>* fixed_order = nullptr) {
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());

  std::vector<Factor> factors;
  factors.reserve(static_cast<std::size_t>(m.num_vars()) + extra.size());
  for (int v = 0; v < m.num_vars(); ++v)
    if (v != replace_cpt_of) factors.push_back(detail::cpt_factor(m, v));
  for (auto& f : extra) factors.push_back(std::move(f));

  for (const auto& [var, value] : evidence.items()) {
    if (std::binary_search(keep.begin(), keep.end(), var)) {
      factors.push_back(Factor::indicator(var, m.var_cardinality(var), value));
      continue;
    }
    for (auto& f : factors)
      if (f.position_of(var) >= 0) f = restrict_var(f, var, value);
  }

  std::vector<int> local_order;
  const std::vector<int>* order = nullptr;
  if (fixed_order) {
    order = fixed_order;
  } else if (order_cache && !order_cache->empty()) {
    order = order_cache;
  } else {
    std::vector<std::vector<int>> scopes;
    scopes.reserve(factors.size());
    for (const auto& f : factors) scopes.push_back(f.scope());
    local_order = min_fill_order(scopes, keep);
    if (order_cache) *order_cache = local_order;
    order = &local_order;
  }
  return eliminate(std::move(factors), keep, order);
}

/// Sum over all unassigned variables of the per-variable conditional product;
/// the full joint probability of a (possibly partial) assignment.
template <DiscreteModel M>
double model_joint_prob(const M& m, const Assignment& assignment) {
  Factor f = collect_marginal(m, assignment, {});
  return f.scalar();
}

/// P(H = h | E = e) under the model's tables, computed in one pass: keep the
/// hypothesis variables, read the numerator off the kept factor and take the
/// denominator as its total mass (= the evidence probability).
template <DiscreteModel M>
double model_query(const M& m, const Query& q,
                   std::vector<int>* order_cache = nullptr) {
  std::vector<int> keep;
  for (const auto& [var, value] : q.hypothesis.items()) keep.push_back(var);
  Factor f = collect_marginal(m, q.evidence, keep, {}, -1, order_cache);

  const double den = f.sum();
  if (den == 0.0)
    throw ZeroEvidenceProbability("evidence has probability zero");
  std::vector<int> h_values;
  h_values.reserve(f.scope().size());
  for (int var : f.scope()) h_values.push_back(*q.hypothesis.value_of(var));
  return f.at(h_values) / den;
}

// --- Entry points on (network, parameters) ---

inline double joint_prob(const Network& net, const ParameterAssignment& params,
                         const Assignment& assignment) {
  return model_joint_prob(TableModel(net, params), assignment);
}

inline double evaluate_query(const Network& net,
                             const ParameterAssignment& params, const Query& q) {
  return model_query(TableModel(net, params), q);
}

/// P(E = e | params). Exactly 1 for empty evidence.
inline double evidence_probability(const Network& net,
                                   const ParameterAssignment& params,
                                   const Assignment& evidence) {
  if (evidence.empty()) return 1.0;
  return joint_prob(net, params, evidence);
}

/// The plug-in query mean: the query evaluated at the posterior means.
inline double estimate_q1(const Network& net, const Query& q) {
  return model_query(MeanModel(net), q);
}

}  // namespace beliefvar

#endif  // BELIEFVAR_INFERENCE_HPP
