#ifndef BELIEFVAR_IO_HPP
#define BELIEFVAR_IO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "beliefvar/errors.hpp"
#include "beliefvar/network.hpp"

namespace beliefvar {

// Network JSON schema (strict; unknown fields are rejected):
// {
//   "variables": [{"name": "A", "domain": ["a1", "a2"]}, ...],
//   "parents":   {"B": ["A"], ...},            // may omit parentless vars
//   "cpt":       {"B": [{"parent_config": ["a1"], "alpha": [1.0, 2.0]}, ...]}
// }
// parent_config lists parent values in declared parent order; every parent
// configuration must appear exactly once. The writer emits rows in row-major
// configuration order so files round-trip bit-stably.

namespace detail {

inline void reject_unknown_fields(const nlohmann::json& obj,
                                  std::initializer_list<const char*> allowed,
                                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed)
      if (it.key() == key) ok = true;
    if (!ok) throw Error("unknown field '" + it.key() + "' in " + where);
  }
}

}  // namespace detail

inline Network network_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("network file must hold a JSON object");
  detail::reject_unknown_fields(j, {"variables", "parents", "cpt"}, "network");
  if (!j.contains("variables") || !j.contains("cpt"))
    throw Error("network file needs 'variables' and 'cpt'");

  std::vector<Variable> variables;
  for (const auto& jv : j.at("variables")) {
    detail::reject_unknown_fields(jv, {"name", "domain"}, "variable");
    variables.emplace_back(jv.at("name").get<std::string>(),
                           jv.at("domain").get<std::vector<std::string>>());
  }

  const auto index_of = [&variables](const std::string& name) {
    for (std::size_t v = 0; v < variables.size(); ++v)
      if (variables[v].name() == name) return static_cast<int>(v);
    throw Error("unknown variable '" + name + "' referenced");
  };

  std::vector<std::vector<int>> parents(variables.size());
  if (j.contains("parents")) {
    for (auto it = j.at("parents").begin(); it != j.at("parents").end(); ++it) {
      const int v = index_of(it.key());
      for (const auto& pname : it.value())
        parents[static_cast<std::size_t>(v)].push_back(
            index_of(pname.get<std::string>()));
    }
  }

  // Assemble rows per variable; accept any row order in the file but demand
  // exactly one row per configuration.
  std::vector<std::vector<DirichletRow>> rows;
  rows.reserve(variables.size());
  {
    // Need config indexing before the Network exists; duplicate the
    // row-major rule locally.
    const auto config_index = [&](int v, const std::vector<std::string>& labels) {
      const auto& ps = parents[static_cast<std::size_t>(v)];
      if (labels.size() != ps.size())
        throw Error("parent_config arity mismatch for variable '" +
                    variables[static_cast<std::size_t>(v)].name() + "'");
      int idx = 0;
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto& pv = variables[static_cast<std::size_t>(ps[i])];
        const int value = pv.index_of(labels[i]);
        if (value < 0)
          throw Error("value '" + labels[i] + "' not in the domain of '" +
                      pv.name() + "'");
        idx = idx * pv.cardinality() + value;
      }
      return idx;
    };

    for (std::size_t v = 0; v < variables.size(); ++v) {
      int configs = 1;
      for (int p : parents[v])
        configs *= variables[static_cast<std::size_t>(p)].cardinality();

      if (!j.at("cpt").contains(variables[v].name()))
        throw MissingRow("no cpt entry for variable '" + variables[v].name() +
                         "'");
      std::vector<std::vector<double>> alphas(
          static_cast<std::size_t>(configs));
      std::vector<bool> seen(static_cast<std::size_t>(configs), false);
      for (const auto& jrow : j.at("cpt").at(variables[v].name())) {
        detail::reject_unknown_fields(jrow, {"parent_config", "alpha"},
                                      "cpt row");
        const auto labels =
            jrow.at("parent_config").get<std::vector<std::string>>();
        const int c = config_index(static_cast<int>(v), labels);
        if (seen[static_cast<std::size_t>(c)])
          throw Error("duplicate cpt row for variable '" + variables[v].name() +
                      "'");
        seen[static_cast<std::size_t>(c)] = true;
        alphas[static_cast<std::size_t>(c)] =
            jrow.at("alpha").get<std::vector<double>>();
      }
      for (int c = 0; c < configs; ++c)
        if (!seen[static_cast<std::size_t>(c)])
          throw MissingRow("variable '" + variables[v].name() +
                           "' is missing a parent configuration row");

      std::vector<DirichletRow> var_rows;
      var_rows.reserve(static_cast<std::size_t>(configs));
      for (auto& a : alphas) var_rows.emplace_back(std::move(a));
      rows.push_back(std::move(var_rows));
    }
  }
  return validate_network(
      Network(std::move(variables), std::move(parents), std::move(rows)));
}

inline Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid JSON in '" + path + "': " + e.what());
  }
  return network_from_json(j);
}

inline nlohmann::ordered_json network_to_json(const Network& net) {
  nlohmann::ordered_json j;
  j["variables"] = nlohmann::ordered_json::array();
  for (int v = 0; v < net.num_variables(); ++v) {
    nlohmann::ordered_json jv;
    jv["name"] = net.variable(v).name();
    jv["domain"] = net.variable(v).domain();
    j["variables"].push_back(jv);
  }
  j["parents"] = nlohmann::ordered_json::object();
  for (int v = 0; v < net.num_variables(); ++v) {
    auto names = nlohmann::ordered_json::array();
    for (int p : net.parents(v)) names.push_back(net.variable(p).name());
    j["parents"][net.variable(v).name()] = names;
  }
  j["cpt"] = nlohmann::ordered_json::object();
  for (int v = 0; v < net.num_variables(); ++v) {
    auto rows = nlohmann::ordered_json::array();
    for (int c = 0; c < net.parent_config_count(v); ++c) {
      nlohmann::ordered_json row;
      auto config = nlohmann::ordered_json::array();
      const std::vector<int> values = net.parent_values_of_config(v, c);
      const auto& parents = net.parents(v);
      for (std::size_t i = 0; i < parents.size(); ++i)
        config.push_back(
            net.variable(parents[i]).domain()[static_cast<std::size_t>(values[i])]);
      row["parent_config"] = config;
      row["alpha"] = net.row(v, c).alphas();
      rows.push_back(row);
    }
    j["cpt"][net.variable(v).name()] = rows;
  }
  return j;
}

inline void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << network_to_json(net).dump(2) << '\n';
}

/// Loads complete tuples from CSV: a header of variable names (any order,
/// but covering the network exactly) and one value label per column per row.
inline CompleteData load_complete_data_csv(const Network& net,
                                           const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw Error("empty data file '" + path + "'");
  const auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(s);
    while (std::getline(ss, field, ',')) {
      // Trim surrounding whitespace.
      const auto b = field.find_first_not_of(" \t\r");
      const auto e = field.find_last_not_of(" \t\r");
      fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    return fields;
  };

  const std::vector<std::string> header = split(line);
  if (static_cast<int>(header.size()) != net.num_variables())
    throw IndexMismatch("data header does not cover the network's variables");
  std::vector<int> column_var(header.size());
  std::vector<bool> used(header.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto v = net.variable_index(header[c]);
    if (!v) throw IndexMismatch("unknown column '" + header[c] + "'");
    if (used[static_cast<std::size_t>(*v)])
      throw IndexMismatch("duplicate column '" + header[c] + "'");
    used[static_cast<std::size_t>(*v)] = true;
    column_var[c] = *v;
  }

  std::vector<std::vector<int>> tuples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != header.size())
      throw IndexMismatch("row arity does not match the header");
    std::vector<int> tuple(static_cast<std::size_t>(net.num_variables()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const int v = column_var[c];
      const int value = net.variable(v).index_of(fields[c]);
      if (value < 0)
        throw IndexMismatch("value '" + fields[c] + "' not in the domain of '" +
                            net.variable(v).name() + "'");
      tuple[static_cast<std::size_t>(v)] = value;
    }
    tuples.push_back(std::move(tuple));
  }
  return CompleteData::from_tuples(net, tuples);
}

/// Mean-CPT fixture schema, mirroring the network format with "p" rows.
inline nlohmann::ordered_json means_to_json(const NetworkShape& shape,
                                            const ParameterAssignment& means) {
  nlohmann::ordered_json j;
  j["variables"] = nlohmann::ordered_json::array();
  for (const auto& v : shape.variables) {
    nlohmann::ordered_json jv;
    jv["name"] = v.name();
    jv["domain"] = v.domain();
    j["variables"].push_back(jv);
  }
  j["parents"] = nlohmann::ordered_json::object();
  for (std::size_t v = 0; v < shape.variables.size(); ++v) {
    auto names = nlohmann::ordered_json::array();
    for (int p : shape.parents[v])
      names.push_back(shape.variables[static_cast<std::size_t>(p)].name());
    j["parents"][shape.variables[v].name()] = names;
  }
  j["mean_cpt"] = nlohmann::ordered_json::object();
  for (std::size_t v = 0; v < shape.variables.size(); ++v) {
    const auto& t = means.tables[v];
    auto rows = nlohmann::ordered_json::array();
    for (int c = 0; c < t.configs; ++c) {
      nlohmann::ordered_json row;
      auto config = nlohmann::ordered_json::array();
      int rest = c;
      std::vector<int> values(shape.parents[v].size());
      for (std::size_t i = shape.parents[v].size(); i-- > 0;) {
        const auto& pv =
            shape.variables[static_cast<std::size_t>(shape.parents[v][i])];
        values[i] = rest % pv.cardinality();
        rest /= pv.cardinality();
      }
      for (std::size_t i = 0; i < shape.parents[v].size(); ++i)
        config.push_back(
            shape.variables[static_cast<std::size_t>(shape.parents[v][i])]
                .domain()[static_cast<std::size_t>(values[i])]);
      row["parent_config"] = config;
      std::vector<double> p(static_cast<std::size_t>(t.cardinality));
      for (int b = 0; b < t.cardinality; ++b) p[static_cast<std::size_t>(b)] = t.at(c, b);
      row["p"] = p;
      rows.push_back(row);
    }
    j["mean_cpt"][shape.variables[v].name()] = rows;
  }
  return j;
}

/// Inverse of means_to_json; validates the same strict schema.
inline std::pair<NetworkShape, ParameterAssignment> means_from_json(
    const nlohmann::json& j) {
  detail::reject_unknown_fields(j, {"variables", "parents", "mean_cpt"},
                                "means fixture");
  NetworkShape shape;
  for (const auto& jv : j.at("variables")) {
    detail::reject_unknown_fields(jv, {"name", "domain"}, "variable");
    shape.variables.emplace_back(jv.at("name").get<std::string>(),
                                 jv.at("domain").get<std::vector<std::string>>());
  }
  const auto index_of = [&shape](const std::string& name) {
    for (std::size_t v = 0; v < shape.variables.size(); ++v)
      if (shape.variables[v].name() == name) return static_cast<int>(v);
    throw Error("unknown variable '" + name + "' referenced");
  };
  shape.parents.resize(shape.variables.size());
  if (j.contains("parents"))
    for (auto it = j.at("parents").begin(); it != j.at("parents").end(); ++it) {
      const int v = index_of(it.key());
      for (const auto& pname : it.value())
        shape.parents[static_cast<std::size_t>(v)].push_back(
            index_of(pname.get<std::string>()));
    }

  ParameterAssignment means;
  means.tables.resize(shape.variables.size());
  for (std::size_t v = 0; v < shape.variables.size(); ++v) {
    auto& t = means.tables[v];
    t.cardinality = shape.variables[v].cardinality();
    t.configs = 1;
    for (int p : shape.parents[v])
      t.configs *= shape.variables[static_cast<std::size_t>(p)].cardinality();
    t.p.assign(static_cast<std::size_t>(t.configs) * t.cardinality, -1.0);

    const auto& name = shape.variables[v].name();
    if (!j.at("mean_cpt").contains(name))
      throw MissingRow("no mean_cpt entry for variable '" + name + "'");
    for (const auto& jrow : j.at("mean_cpt").at(name)) {
      detail::reject_unknown_fields(jrow, {"parent_config", "p"}, "mean row");
      const auto labels =
          jrow.at("parent_config").get<std::vector<std::string>>();
      const auto& ps = shape.parents[v];
      if (labels.size() != ps.size())
        throw Error("parent_config arity mismatch for '" + name + "'");
      int config = 0;
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto& pv = shape.variables[static_cast<std::size_t>(ps[i])];
        const int value = pv.index_of(labels[i]);
        if (value < 0) throw Error("bad parent value '" + labels[i] + "'");
        config = config * pv.cardinality() + value;
      }
      const auto row = jrow.at("p").get<std::vector<double>>();
      if (static_cast<int>(row.size()) != t.cardinality)
        throw Error("mean row arity mismatch for '" + name + "'");
      for (int b = 0; b < t.cardinality; ++b)
        t.p[static_cast<std::size_t>(config) * t.cardinality + b] =
            row[static_cast<std::size_t>(b)];
    }
    for (double x : t.p)
      if (x < 0.0)
        throw MissingRow("variable '" + name +
                         "' is missing a mean row for some configuration");
  }
  return {std::move(shape), std::move(means)};
}

}  // namespace beliefvar

#endif  // BELIEFVAR_IO_HPP
