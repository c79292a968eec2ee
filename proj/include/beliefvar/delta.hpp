#ifndef BELIEFVAR_DELTA_HPP
#define BELIEFVAR_DELTA_HPP

#include <algorithm>
#include <vector>

#include "beliefvar/errors.hpp"
#include "beliefvar/inference.hpp"
#include "beliefvar/network.hpp"
#include "beliefvar/query.hpp"

namespace beliefvar {

/// Partial derivatives of the query response with respect to every CPT
/// entry, evaluated at the posterior means. Row entries are treated as free
/// coordinates (no simplex projection); the quadratic form against the
/// Dirichlet covariance is invariant to that gauge because the covariance's
/// rows sum to zero.
struct GradientVector {
  struct Table {
    int cardinality = 0;
    int configs = 0;
    std::vector<double> d;  // [config * cardinality + value]
    double at(int config, int value) const {
      return d[static_cast<std::size_t>(config) * cardinality + value];
    }
  };
  std::vector<Table> tables;  // indexed by variable
};

/// Covariance of one Dirichlet row at the posterior:
/// Cov(theta_b, theta_b') = pi_b (delta_{bb'} - pi_b') / (a. + 1).
struct RowCovariance {
  int n = 0;
  std::vector<double> m;  // row-major n x n
  double at(int i, int j) const {
    return m[static_cast<std::size_t>(i) * n + j];
  }
};

inline RowCovariance dirichlet_row_covariance(const DirichletRow& row) {
  RowCovariance cov;
  cov.n = row.size();
  cov.m.resize(static_cast<std::size_t>(cov.n) * cov.n);
  const double denom = row.alpha_sum() + 1.0;
  for (int i = 0; i < cov.n; ++i)
    for (int j = 0; j < cov.n; ++j)
      cov.m[static_cast<std::size_t>(i) * cov.n + j] =
          row.mean(i) * ((i == j ? 1.0 : 0.0) - row.mean(j)) / denom;
  return cov;
}

namespace detail {

/// All partials of the multilinear polynomial P(assignment | Theta) with
/// respect to variable v's CPT entries, in one elimination pass: keep
/// {v} u pa(v) with v's own CPT factor removed. The kept table at
/// (pa = a, v = b) is exactly the partial for entry (a, b); rows sharing a
/// variable thus share one evidence-conditioned factorization.
inline void variable_partials(const Network& net,
                              const ParameterAssignment& means,
                              const Assignment& assignment, int v,
                              const std::vector<int>& order,
                              GradientVector::Table& out) {
  const TableModel model(net, means);
  const auto& parents = net.parents(v);
  std::vector<int> keep = parents;
  keep.push_back(v);
  const Factor f = collect_marginal(model, assignment, keep, {}, v, nullptr,
                                    &order);

  // The kept scope holds the parents and, unless v is an unassigned leaf,
  // v itself; an absent v means the polynomial summed over v's value and
  // the partial is constant across columns.
  const auto& scope = f.scope();
  std::vector<int> values(scope.size(), 0);
  std::vector<int> declared(parents.size());
  for (int config = 0; config < out.configs; ++config) {
    int rest = config;
    for (std::size_t j = parents.size(); j-- > 0;) {
      const int card = net.cardinality(parents[j]);
      declared[j] = rest % card;
      rest /= card;
    }
    for (int b = 0; b < out.cardinality; ++b) {
      for (std::size_t i = 0; i < scope.size(); ++i) {
        if (scope[i] == v) {
          values[i] = b;
          continue;
        }
        for (std::size_t j = 0; j < parents.size(); ++j)
          if (parents[j] == scope[i]) values[i] = declared[j];
      }
      out.d[static_cast<std::size_t>(config) * out.cardinality + b] =
          f.at(values);
    }
  }
}

/// One elimination order over the evidence-sliced moral graph. Every
/// per-variable pass reuses it with the kept variables struck out, which
/// stays a valid (if slightly wider) sequence and avoids re-running
/// min-fill per pass.
inline std::vector<int> shared_gradient_order(const Network& net,
                                              const Assignment& evidence) {
  std::vector<std::vector<int>> scopes;
  scopes.reserve(static_cast<std::size_t>(net.num_variables()));
  for (int v = 0; v < net.num_variables(); ++v) {
    std::vector<int> scope;
    if (!evidence.contains(v)) scope.push_back(v);
    for (int p : net.parents(v))
      if (!evidence.contains(p)) scope.push_back(p);
    std::sort(scope.begin(), scope.end());
    scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
    scopes.push_back(std::move(scope));
  }
  return min_fill_order(scopes, {});
}

inline std::vector<int> order_without(const std::vector<int>& order,
                                      std::span<const int> kept) {
  std::vector<int> out;
  out.reserve(order.size());
  for (int u : order) {
    bool drop = false;
    for (int k : kept)
      if (u == k) drop = true;
    if (!drop) out.push_back(u);
  }
  return out;
}

}  // namespace detail

/// Exact gradient of q = P(h, e | Theta) / P(e | Theta) at the posterior
/// means, via multilinearity: two elimination passes per variable, each
/// covering every row of that variable's CPT at once.
inline GradientVector query_gradient(const Network& net, const Query& q) {
  const ParameterAssignment means = net.posterior_means();

  GradientVector grad;
  grad.tables.resize(static_cast<std::size_t>(net.num_variables()));
  for (int v = 0; v < net.num_variables(); ++v) {
    auto& t = grad.tables[static_cast<std::size_t>(v)];
    t.cardinality = net.cardinality(v);
    t.configs = net.parent_config_count(v);
    t.d.assign(static_cast<std::size_t>(t.cardinality) * t.configs, 0.0);
  }

  const double g = evidence_probability(net, means, q.evidence);
  if (g == 0.0)
    throw ZeroEvidenceProbability("evidence has probability zero");

  const auto joint_assignment = Assignment::merged(q.hypothesis, q.evidence);
  if (!joint_assignment) return grad;  // q is identically 0

  const double f = joint_prob(net, means, *joint_assignment);

  const std::vector<int> f_order =
      detail::shared_gradient_order(net, *joint_assignment);
  const std::vector<int> g_order =
      detail::shared_gradient_order(net, q.evidence);

  GradientVector::Table df, dg;
  for (int v = 0; v < net.num_variables(); ++v) {
    auto& t = grad.tables[static_cast<std::size_t>(v)];
    std::vector<int> kept = net.parents(v);
    kept.push_back(v);
    const std::vector<int> f_order_v = detail::order_without(f_order, kept);
    const std::vector<int> g_order_v = detail::order_without(g_order, kept);

    df = t;
    dg = t;
    detail::variable_partials(net, means, *joint_assignment, v, f_order_v, df);
    detail::variable_partials(net, means, q.evidence, v, g_order_v, dg);
    for (std::size_t i = 0; i < t.d.size(); ++i)
      t.d[i] = (g * df.d[i] - f * dg.d[i]) / (g * g);
  }
  return grad;
}

/// g^T C g with C block-diagonal over rows (global independence).
inline double delta_quadratic_form(const Network& net,
                                   const GradientVector& grad) {
  double total = 0.0;
  for (int v = 0; v < net.num_variables(); ++v) {
    const auto& t = grad.tables[static_cast<std::size_t>(v)];
    for (int config = 0; config < t.configs; ++config) {
      const RowCovariance cov = dirichlet_row_covariance(net.row(v, config));
      for (int i = 0; i < cov.n; ++i) {
        double ci = 0.0;
        for (int j = 0; j < cov.n; ++j) ci += cov.at(i, j) * t.at(config, j);
        total += t.at(config, i) * ci;
      }
    }
  }
  return total;
}

/// Delta-method variance approximation v1 = g^T C g.
inline double variance_v1(const Network& net, const Query& q) {
  return delta_quadratic_form(net, query_gradient(net, q));
}

}  // namespace beliefvar

#endif  // BELIEFVAR_DELTA_HPP
