#ifndef BELIEFVAR_QUERY_HPP
#define BELIEFVAR_QUERY_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "beliefvar/errors.hpp"
#include "beliefvar/network.hpp"

namespace beliefvar {

/// A partial assignment of value indices to variables, kept sorted by
/// variable id. Assigning a variable twice with different values throws.
class Assignment {
 public:
  Assignment() = default;

  void set(int var, int value) {
    auto it = std::lower_bound(items_.begin(), items_.end(), var,
                               [](const auto& p, int v) { return p.first < v; });
    if (it != items_.end() && it->first == var) {
      if (it->second != value)
        throw Error("conflicting values assigned to one variable");
      return;
    }
    items_.insert(it, {var, value});
  }

  std::optional<int> value_of(int var) const {
    auto it = std::lower_bound(items_.begin(), items_.end(), var,
                               [](const auto& p, int v) { return p.first < v; });
    if (it != items_.end() && it->first == var) return it->second;
    return std::nullopt;
  }

  bool contains(int var) const { return value_of(var).has_value(); }
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  const std::vector<std::pair<int, int>>& items() const { return items_; }

  /// Union of two assignments; nullopt when they conflict.
  static std::optional<Assignment> merged(const Assignment& a,
                                          const Assignment& b) {
    Assignment out = a;
    for (const auto& [var, value] : b.items()) {
      if (auto existing = out.value_of(var)) {
        if (*existing != value) return std::nullopt;
      } else {
        out.set(var, value);
      }
    }
    return out;
  }

 private:
  std::vector<std::pair<int, int>> items_;
};

/// A query: the hypothesis assignment h over variables H and the evidence
/// assignment e over variables E. Its response is P(H = h | E = e, Theta).
/// A hypothesis variable that also carries evidence is legal; the response
/// degenerates to 1 (values agree) or 0 (values conflict).
struct Query {
  Assignment hypothesis;
  Assignment evidence;

  Query() = default;
  Query(Assignment h, Assignment e)
      : hypothesis(std::move(h)), evidence(std::move(e)) {
    if (hypothesis.empty()) throw Error("query needs a nonempty hypothesis");
  }

  /// Builds a query from (name, value-label) pairs, validated against `net`.
  static Query parse(const Network& net,
                     const std::vector<std::pair<std::string, std::string>>& h,
                     const std::vector<std::pair<std::string, std::string>>& e) {
    auto build = [&net](const auto& pairs) {
      Assignment a;
      for (const auto& [name, label] : pairs) {
        auto v = net.variable_index(name);
        if (!v) throw Error("unknown variable '" + name + "'");
        const int value = net.variable(*v).index_of(label);
        if (value < 0)
          throw Error("value '" + label + "' not in the domain of '" + name + "'");
        a.set(*v, value);
      }
      return a;
    };
    return Query(build(h), build(e));
  }
};

}  // namespace beliefvar

#endif  // BELIEFVAR_QUERY_HPP
