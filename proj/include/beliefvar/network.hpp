#ifndef BELIEFVAR_NETWORK_HPP
#define BELIEFVAR_NETWORK_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "beliefvar/errors.hpp"

namespace beliefvar {

/// A discrete network variable: a name and an ordered value domain.
/// The domain order is part of the contract; CPT columns, factor tables and
/// the JSON file format all index values by their position here.
class Variable {
 public:
  Variable(std::string name, std::vector<std::string> domain)
      : name_(std::move(name)), domain_(std::move(domain)) {
    if (domain_.size() < 2)
      throw Error("variable '" + name_ + "' needs a domain of size >= 2");
    for (std::size_t i = 0; i < domain_.size(); ++i)
      for (std::size_t j = i + 1; j < domain_.size(); ++j)
        if (domain_[i] == domain_[j])
          throw Error("variable '" + name_ + "' has duplicate value label '" +
                      domain_[i] + "'");
  }

  const std::string& name() const { return name_; }
  int cardinality() const { return static_cast<int>(domain_.size()); }
  const std::vector<std::string>& domain() const { return domain_; }

  /// Index of a value label, or -1 when absent.
  int index_of(std::string_view label) const {
    for (std::size_t i = 0; i < domain_.size(); ++i)
      if (domain_[i] == label) return static_cast<int>(i);
    return -1;
  }

 private:
  std::string name_;
  std::vector<std::string> domain_;
};

/// One CPT row: the Dirichlet hyperparameters alpha_{b|a} for a fixed parent
/// configuration a, together with the derived predictive means pi_{b|a}.
class DirichletRow {
 public:
  explicit DirichletRow(std::vector<double> alpha) : alpha_(std::move(alpha)) {
    if (alpha_.size() < 2) throw Error("Dirichlet row needs >= 2 entries");
    sum_ = 0.0;
    for (double a : alpha_) {
      if (!(a > 0.0))
        throw NonPositiveAlpha("all Dirichlet hyperparameters must be > 0");
      sum_ += a;
    }
  }

  int size() const { return static_cast<int>(alpha_.size()); }
  double alpha(int b) const { return alpha_[static_cast<std::size_t>(b)]; }
  const std::vector<double>& alphas() const { return alpha_; }
  double alpha_sum() const { return sum_; }

  /// Predictive mean pi_{b|a} = alpha_{b|a} / alpha_{.|a}.
  double mean(int b) const { return alpha_[static_cast<std::size_t>(b)] / sum_; }

  std::vector<double> means() const {
    std::vector<double> pi(alpha_.size());
    for (std::size_t b = 0; b < alpha_.size(); ++b) pi[b] = alpha_[b] / sum_;
    return pi;
  }

 private:
  std::vector<double> alpha_;
  double sum_;
};

/// Concrete probability tables shaped like a network's CPTs: one probability
/// vector per (variable, parent configuration). This is what the posterior
/// means, a Monte-Carlo draw, or any user-supplied parameter set look like
/// to the inference engine.
struct ParameterAssignment {
  struct Table {
    int cardinality = 0;
    int configs = 0;
    std::vector<double> p;  // [config * cardinality + value]
    double at(int config, int value) const {
      return p[static_cast<std::size_t>(config) * cardinality + value];
    }
  };
  std::vector<Table> tables;  // indexed by variable
};

/// Structure without hyperparameters; the input to BDe construction and the
/// JSON loader's intermediate form.
struct NetworkShape {
  std::vector<Variable> variables;
  std::vector<std::vector<int>> parents;  // parent indices, ordered
};

/// A discrete belief network: DAG structure plus one DirichletRow per parent
/// configuration of every variable. Immutable after construction; updates
/// return new networks.
///
/// Parent-configuration indexing is row-major over the ordered parent list:
/// the first parent is the most significant digit, the last parent varies
/// fastest. This convention is load-bearing for the file format.
class Network {
 public:
  Network(std::vector<Variable> variables,
          std::vector<std::vector<int>> parents,
          std::vector<std::vector<DirichletRow>> rows)
      : vars_(std::move(variables)),
        parents_(std::move(parents)),
        rows_(std::move(rows)) {
    const int n = static_cast<int>(vars_.size());
    if (static_cast<int>(parents_.size()) != n ||
        static_cast<int>(rows_.size()) != n)
      throw IndexMismatch("variables, parents and cpt rows must align");
    for (const auto& ps : parents_)
      for (int p : ps)
        if (p < 0 || p >= n) throw IndexMismatch("parent index out of range");
    config_counts_.resize(vars_.size());
    for (int v = 0; v < n; ++v) {
      long long count = 1;
      for (int p : parents_[static_cast<std::size_t>(v)])
        count *= vars_[static_cast<std::size_t>(p)].cardinality();
      config_counts_[static_cast<std::size_t>(v)] = static_cast<int>(count);
    }
  }

  int num_variables() const { return static_cast<int>(vars_.size()); }
  const Variable& variable(int v) const {
    return vars_[static_cast<std::size_t>(v)];
  }
  const std::vector<Variable>& variables() const { return vars_; }
  int cardinality(int v) const {
    return vars_[static_cast<std::size_t>(v)].cardinality();
  }
  const std::vector<int>& parents(int v) const {
    return parents_[static_cast<std::size_t>(v)];
  }
  int parent_config_count(int v) const {
    return config_counts_[static_cast<std::size_t>(v)];
  }
  const DirichletRow& row(int v, int config) const {
    return rows_[static_cast<std::size_t>(v)][static_cast<std::size_t>(config)];
  }
  const std::vector<DirichletRow>& rows(int v) const {
    return rows_[static_cast<std::size_t>(v)];
  }

  std::optional<int> variable_index(std::string_view name) const {
    for (std::size_t v = 0; v < vars_.size(); ++v)
      if (vars_[v].name() == name) return static_cast<int>(v);
    return std::nullopt;
  }

  /// Row-major parent configuration index for the given parent values.
  int parent_config_index(int v, std::span<const int> parent_values) const {
    const auto& ps = parents_[static_cast<std::size_t>(v)];
    if (parent_values.size() != ps.size())
      throw IndexMismatch("parent value count mismatch");
    int idx = 0;
    for (std::size_t j = 0; j < ps.size(); ++j) {
      const int card = vars_[static_cast<std::size_t>(ps[j])].cardinality();
      const int val = parent_values[j];
      if (val < 0 || val >= card)
        throw IndexMismatch("parent value out of domain");
      idx = idx * card + val;
    }
    return idx;
  }

  /// Inverse of parent_config_index.
  std::vector<int> parent_values_of_config(int v, int config) const {
    const auto& ps = parents_[static_cast<std::size_t>(v)];
    std::vector<int> values(ps.size());
    for (std::size_t j = ps.size(); j-- > 0;) {
      const int card = vars_[static_cast<std::size_t>(ps[j])].cardinality();
      values[j] = config % card;
      config /= card;
    }
    return values;
  }

  NetworkShape shape() const { return NetworkShape{vars_, parents_}; }

  /// Posterior means pi of every row, as concrete tables.
  ParameterAssignment posterior_means() const {
    ParameterAssignment out;
    out.tables.resize(vars_.size());
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      auto& t = out.tables[v];
      t.cardinality = vars_[v].cardinality();
      t.configs = config_counts_[v];
      t.p.resize(static_cast<std::size_t>(t.cardinality) * t.configs);
      for (int c = 0; c < t.configs; ++c) {
        const auto& r = rows_[v][static_cast<std::size_t>(c)];
        for (int b = 0; b < t.cardinality; ++b)
          t.p[static_cast<std::size_t>(c) * t.cardinality + b] = r.mean(b);
      }
    }
    return out;
  }

  /// Topological order of the variable indices; throws CycleDetected.
  std::vector<int> topological_order() const {
    const int n = num_variables();
    std::vector<int> indegree(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
      for (int p : parents(v)) {
        children[static_cast<std::size_t>(p)].push_back(v);
        ++indegree[static_cast<std::size_t>(v)];
      }
    std::vector<int> ready, order;
    order.reserve(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
      if (indegree[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
    while (!ready.empty()) {
      const int v = ready.back();
      ready.pop_back();
      order.push_back(v);
      for (int c : children[static_cast<std::size_t>(v)])
        if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
    }
    if (static_cast<int>(order.size()) != n)
      throw CycleDetected("parent graph contains a directed cycle");
    return order;
  }

 private:
  std::vector<Variable> vars_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<DirichletRow>> rows_;
  std::vector<int> config_counts_;
};

/// Complete-data sufficient statistics: per variable, counts n_{ab} indexed
/// by (parent config, child value), derived from n complete tuples.
struct CompleteData {
  struct Counts {
    int cardinality = 0;
    int configs = 0;
    std::vector<long long> n;  // [config * cardinality + value]
  };
  std::vector<Counts> counts;  // indexed by variable
  long long num_tuples = 0;

  /// Tallies counts from complete tuples (each tuple holds one value index
  /// per network variable, in network variable order).
  static CompleteData from_tuples(const Network& net,
                                  const std::vector<std::vector<int>>& tuples) {
    CompleteData data;
    data.counts.resize(static_cast<std::size_t>(net.num_variables()));
    for (int v = 0; v < net.num_variables(); ++v) {
      auto& c = data.counts[static_cast<std::size_t>(v)];
      c.cardinality = net.cardinality(v);
      c.configs = net.parent_config_count(v);
      c.n.assign(static_cast<std::size_t>(c.cardinality) * c.configs, 0);
    }
    std::vector<int> parent_values;
    for (const auto& tuple : tuples) {
      if (static_cast<int>(tuple.size()) != net.num_variables())
        throw IndexMismatch("tuple arity does not match the network");
      for (int v = 0; v < net.num_variables(); ++v) {
        const int value = tuple[static_cast<std::size_t>(v)];
        if (value < 0 || value >= net.cardinality(v))
          throw IndexMismatch("tuple value out of domain");
        parent_values.clear();
        for (int p : net.parents(v))
          parent_values.push_back(tuple[static_cast<std::size_t>(p)]);
        const int config = net.parent_config_index(v, parent_values);
        auto& c = data.counts[static_cast<std::size_t>(v)];
        ++c.n[static_cast<std::size_t>(config) * c.cardinality + value];
      }
    }
    data.num_tuples = static_cast<long long>(tuples.size());
    return data;
  }
};

/// Full invariant check: acyclicity, one row per parent configuration with
/// matching arity. Row positivity is enforced by DirichletRow itself.
inline Network validate_network(Network net) {
  net.topological_order();  // throws CycleDetected
  for (int v = 0; v < net.num_variables(); ++v) {
    const int expected = net.parent_config_count(v);
    if (static_cast<int>(net.rows(v).size()) != expected)
      throw MissingRow("variable '" + net.variable(v).name() + "' has " +
                       std::to_string(net.rows(v).size()) + " rows, needs " +
                       std::to_string(expected));
    for (const auto& row : net.rows(v))
      if (row.size() != net.cardinality(v))
        throw IndexMismatch("row arity mismatch for variable '" +
                            net.variable(v).name() + "'");
  }
  return net;
}

/// Conjugate update: alpha_{b|a} += n_{ab}. Structure unchanged.
inline Network posterior_update(const Network& net, const CompleteData& data) {
  if (static_cast<int>(data.counts.size()) != net.num_variables())
    throw IndexMismatch("data counts do not match the network's variables");
  std::vector<std::vector<DirichletRow>> rows;
  rows.reserve(static_cast<std::size_t>(net.num_variables()));
  for (int v = 0; v < net.num_variables(); ++v) {
    const auto& c = data.counts[static_cast<std::size_t>(v)];
    if (c.cardinality != net.cardinality(v) ||
        c.configs != net.parent_config_count(v))
      throw IndexMismatch("count table shape mismatch for variable '" +
                          net.variable(v).name() + "'");
    std::vector<DirichletRow> updated;
    updated.reserve(net.rows(v).size());
    for (int config = 0; config < c.configs; ++config) {
      std::vector<double> alpha = net.row(v, config).alphas();
      for (int b = 0; b < c.cardinality; ++b)
        alpha[static_cast<std::size_t>(b)] += static_cast<double>(
            c.n[static_cast<std::size_t>(config) * c.cardinality + b]);
      updated.emplace_back(std::move(alpha));
    }
    rows.push_back(std::move(updated));
  }
  std::vector<Variable> vars(net.variables());
  std::vector<std::vector<int>> parents;
  for (int v = 0; v < net.num_variables(); ++v) parents.push_back(net.parents(v));
  return Network(std::move(vars), std::move(parents), std::move(rows));
}

/// Multiplies every hyperparameter by `factor`; predictive means unchanged.
inline Network scale_effective_sample_size(const Network& net, double factor) {
  if (!(factor > 0.0)) throw Error("scale factor must be > 0");
  std::vector<std::vector<DirichletRow>> rows;
  rows.reserve(static_cast<std::size_t>(net.num_variables()));
  for (int v = 0; v < net.num_variables(); ++v) {
    std::vector<DirichletRow> scaled;
    scaled.reserve(net.rows(v).size());
    for (const auto& row : net.rows(v)) {
      std::vector<double> alpha = row.alphas();
      for (double& a : alpha) a *= factor;
      scaled.emplace_back(std::move(alpha));
    }
    rows.push_back(std::move(scaled));
  }
  std::vector<Variable> vars(net.variables());
  std::vector<std::vector<int>> parents;
  for (int v = 0; v < net.num_variables(); ++v) parents.push_back(net.parents(v));
  return Network(std::move(vars), std::move(parents), std::move(rows));
}

}  // namespace beliefvar

#endif  // BELIEFVAR_NETWORK_HPP
