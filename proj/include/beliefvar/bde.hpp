#ifndef BELIEFVAR_BDE_HPP
#define BELIEFVAR_BDE_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "beliefvar/errors.hpp"
#include "beliefvar/inference.hpp"
#include "beliefvar/network.hpp"

namespace beliefvar {

namespace detail {

/// Model view of a shape + mean tables, for the parent-marginal computation.
class ShapeMeanModel {
 public:
  ShapeMeanModel(const NetworkShape& shape, const ParameterAssignment& means)
      : shape_(&shape), means_(&means) {}
  int num_vars() const { return static_cast<int>(shape_->variables.size()); }
  int var_cardinality(int v) const {
    return shape_->variables[static_cast<std::size_t>(v)].cardinality();
  }
  const std::vector<int>& var_parents(int v) const {
    return shape_->parents[static_cast<std::size_t>(v)];
  }
  double prob(int v, int config, int value) const {
    return means_->tables[static_cast<std::size_t>(v)].at(config, value);
  }

 private:
  const NetworkShape* shape_;
  const ParameterAssignment* means_;
};

}  // namespace detail

/// Constructs the BDe-consistent network with effective sample size m and
/// the requested predictive means: alpha_{b|a} = m * P(a) * theta_{b|a},
/// where P(a) is the exact joint parent-configuration marginal under the
/// mean parameters. Every variable then has Sum alpha = m, and the
/// predictive means equal the requested theta.
inline Network bde_prior(const NetworkShape& shape,
                         const ParameterAssignment& mean_cpts, double m) {
  if (!(m > 0.0)) throw NonPositiveM("effective sample size m must be > 0");
  const int n = static_cast<int>(shape.variables.size());
  if (static_cast<int>(shape.parents.size()) != n ||
      static_cast<int>(mean_cpts.tables.size()) != n)
    throw IndexMismatch("shape and mean tables must align");

  for (int v = 0; v < n; ++v) {
    const auto& t = mean_cpts.tables[static_cast<std::size_t>(v)];
    for (int c = 0; c < t.configs; ++c) {
      double s = 0.0;
      for (int b = 0; b < t.cardinality; ++b) {
        if (t.at(c, b) < 0.0)
          throw RowNotNormalized("mean row has a negative entry");
        s += t.at(c, b);
      }
      if (std::abs(s - 1.0) > 1e-9)
        throw RowNotNormalized("mean row does not sum to 1");
    }
  }

  const detail::ShapeMeanModel model(shape, mean_cpts);

  // The exact joint parent-configuration marginals for every variable, by
  // elimination on the mean network; checked for positivity up front so a
  // zero-probability configuration is reported as such rather than as a
  // degenerate row.
  std::vector<std::vector<double>> parent_marginals(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const auto& parents = shape.parents[static_cast<std::size_t>(v)];
    const auto& t = mean_cpts.tables[static_cast<std::size_t>(v)];
    auto& marg = parent_marginals[static_cast<std::size_t>(v)];
    marg.resize(static_cast<std::size_t>(t.configs));
    if (parents.empty()) {
      marg[0] = 1.0;
      continue;
    }
    const Factor marginal = collect_marginal(model, Assignment{}, parents);
    std::vector<int> sorted_parents = parents;
    std::sort(sorted_parents.begin(), sorted_parents.end());
    std::vector<int> values_sorted(parents.size());
    for (int config = 0; config < t.configs; ++config) {
      // Decode config (row-major in declared parent order) and look the
      // probability up in the marginal factor (sorted scope order).
      std::vector<int> declared(parents.size());
      int rest = config;
      for (std::size_t j = parents.size(); j-- > 0;) {
        const int card = model.var_cardinality(parents[j]);
        declared[j] = rest % card;
        rest /= card;
      }
      for (std::size_t j = 0; j < parents.size(); ++j) {
        const auto it = std::lower_bound(sorted_parents.begin(),
                                         sorted_parents.end(), parents[j]);
        values_sorted[static_cast<std::size_t>(it - sorted_parents.begin())] =
            declared[j];
      }
      marg[static_cast<std::size_t>(config)] = marginal.at(values_sorted);
      if (marg[static_cast<std::size_t>(config)] <= 0.0)
        throw ZeroParentProbability(
            "parent configuration has zero probability under the means");
    }
  }

  std::vector<std::vector<DirichletRow>> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const auto& t = mean_cpts.tables[static_cast<std::size_t>(v)];
    std::vector<DirichletRow> var_rows;
    var_rows.reserve(static_cast<std::size_t>(t.configs));
    for (int config = 0; config < t.configs; ++config) {
      const double p_config =
          parent_marginals[static_cast<std::size_t>(v)]
                          [static_cast<std::size_t>(config)];
      std::vector<double> alpha(static_cast<std::size_t>(t.cardinality));
      for (int b = 0; b < t.cardinality; ++b)
        alpha[static_cast<std::size_t>(b)] = m * p_config * t.at(config, b);
      var_rows.emplace_back(std::move(alpha));
    }
    rows.push_back(std::move(var_rows));
  }
  return validate_network(
      Network(shape.variables, shape.parents, std::move(rows)));
}

}  // namespace beliefvar

#endif  // BELIEFVAR_BDE_HPP
