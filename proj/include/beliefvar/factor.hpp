#ifndef BELIEFVAR_FACTOR_HPP
#define BELIEFVAR_FACTOR_HPP

#include <algorithm>
#include <cstddef>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "beliefvar/errors.hpp"

namespace beliefvar {

/// A nonnegative table over a set of discrete variables. The scope is kept
/// sorted by variable id; the table is row-major in scope order (last scope
/// variable varies fastest).
class Factor {
 public:
  Factor() : table_{1.0} {}  // scalar 1

  Factor(std::vector<int> scope, std::vector<int> cards,
         std::vector<double> table)
      : scope_(std::move(scope)), cards_(std::move(cards)),
        table_(std::move(table)) {
    std::size_t size = 1;
    for (int c : cards_) size *= static_cast<std::size_t>(c);
    if (table_.size() != size || scope_.size() != cards_.size())
      throw ScopeMismatch("factor table size does not match its scope");
    for (std::size_t i = 1; i < scope_.size(); ++i)
      if (scope_[i - 1] >= scope_[i])
        throw ScopeMismatch("factor scope must be strictly increasing");
  }

  static Factor constant(double value) {
    Factor f;
    f.table_[0] = value;
    return f;
  }

  /// Indicator of var == value.
  static Factor indicator(int var, int card, int value) {
    std::vector<double> t(static_cast<std::size_t>(card), 0.0);
    t[static_cast<std::size_t>(value)] = 1.0;
    return Factor({var}, {card}, std::move(t));
  }

  const std::vector<int>& scope() const { return scope_; }
  const std::vector<int>& cards() const { return cards_; }
  const std::vector<double>& table() const { return table_; }
  std::vector<double>& table() { return table_; }
  bool is_scalar() const { return scope_.empty(); }
  double scalar() const {
    if (!is_scalar()) throw ScopeMismatch("factor is not a scalar");
    return table_[0];
  }

  int position_of(int var) const {
    auto it = std::lower_bound(scope_.begin(), scope_.end(), var);
    if (it == scope_.end() || *it != var) return -1;
    return static_cast<int>(it - scope_.begin());
  }

  double sum() const {
    double s = 0.0;
    for (double x : table_) s += x;
    return s;
  }

  /// Table entry for one full scope assignment (values in scope order).
  double at(std::span<const int> values) const {
    if (values.size() != scope_.size())
      throw ScopeMismatch("assignment arity does not match factor scope");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < scope_.size(); ++i)
      idx = idx * static_cast<std::size_t>(cards_[i]) +
            static_cast<std::size_t>(values[i]);
    return table_[idx];
  }

 private:
  std::vector<int> scope_;
  std::vector<int> cards_;
  std::vector<double> table_;
};

/// Pointwise product over the union scope.
inline Factor product(const Factor& a, const Factor& b) {
  if (a.is_scalar()) {
    Factor r = b;
    for (double& x : r.table()) x *= a.table()[0];
    return r;
  }
  if (b.is_scalar()) return product(b, a);

  std::vector<int> scope, cards;
  {
    std::size_t i = 0, j = 0;
    while (i < a.scope().size() || j < b.scope().size()) {
      if (j >= b.scope().size() ||
          (i < a.scope().size() && a.scope()[i] < b.scope()[j])) {
        scope.push_back(a.scope()[i]);
        cards.push_back(a.cards()[i]);
        ++i;
      } else if (i >= a.scope().size() || b.scope()[j] < a.scope()[i]) {
        scope.push_back(b.scope()[j]);
        cards.push_back(b.cards()[j]);
        ++j;
      } else {
        if (a.cards()[i] != b.cards()[j])
          throw ScopeMismatch("inconsistent cardinality in factor product");
        scope.push_back(a.scope()[i]);
        cards.push_back(a.cards()[i]);
        ++i;
        ++j;
      }
    }
  }

  // Per result position, the stride of that variable in each input (0 when
  // the input does not contain it).
  const std::size_t n = scope.size();
  std::vector<std::size_t> stride_a(n, 0), stride_b(n, 0);
  {
    std::size_t s = 1;
    for (std::size_t i = a.scope().size(); i-- > 0;) {
      const int pos = static_cast<int>(
          std::lower_bound(scope.begin(), scope.end(), a.scope()[i]) -
          scope.begin());
      stride_a[static_cast<std::size_t>(pos)] = s;
      s *= static_cast<std::size_t>(a.cards()[i]);
    }
    s = 1;
    for (std::size_t j = b.scope().size(); j-- > 0;) {
      const int pos = static_cast<int>(
          std::lower_bound(scope.begin(), scope.end(), b.scope()[j]) -
          scope.begin());
      stride_b[static_cast<std::size_t>(pos)] = s;
      s *= static_cast<std::size_t>(b.cards()[j]);
    }
  }

  std::size_t total = 1;
  for (int c : cards) total *= static_cast<std::size_t>(c);
  std::vector<double> table(total);
  std::vector<int> digits(n, 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t idx = 0;; ++idx) {
    table[idx] = a.table()[ia] * b.table()[ib];
    if (idx + 1 == total) break;
    // Odometer increment, last position fastest.
    for (std::size_t pos = n; pos-- > 0;) {
      ++digits[pos];
      ia += stride_a[pos];
      ib += stride_b[pos];
      if (digits[pos] < cards[pos]) break;
      ia -= stride_a[pos] * static_cast<std::size_t>(digits[pos]);
      ib -= stride_b[pos] * static_cast<std::size_t>(digits[pos]);
      digits[pos] = 0;
    }
  }
  return Factor(std::move(scope), std::move(cards), std::move(table));
}

/// Sums one variable out of the factor.
inline Factor sum_out(const Factor& f, int var) {
  const int pos = f.position_of(var);
  if (pos < 0) throw ScopeMismatch("variable not in factor scope");
  const auto& scope = f.scope();
  const auto& cards = f.cards();

  std::vector<int> new_scope, new_cards;
  for (std::size_t i = 0; i < scope.size(); ++i) {
    if (static_cast<int>(i) == pos) continue;
    new_scope.push_back(scope[i]);
    new_cards.push_back(cards[i]);
  }
  // inner = product of cards after pos, outer splits the table around it.
  std::size_t inner = 1;
  for (std::size_t i = static_cast<std::size_t>(pos) + 1; i < cards.size(); ++i)
    inner *= static_cast<std::size_t>(cards[i]);
  const std::size_t mid = static_cast<std::size_t>(cards[static_cast<std::size_t>(pos)]);
  const std::size_t outer = f.table().size() / (inner * mid);

  std::vector<double> table(outer * inner, 0.0);
  std::size_t src = 0;
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t m = 0; m < mid; ++m)
      for (std::size_t in = 0; in < inner; ++in, ++src)
        table[o * inner + in] += f.table()[src];
  return Factor(std::move(new_scope), std::move(new_cards), std::move(table));
}

/// Slices the factor at var == value, removing var from the scope.
inline Factor restrict_var(const Factor& f, int var, int value) {
  const int pos = f.position_of(var);
  if (pos < 0) throw ScopeMismatch("variable not in factor scope");
  const auto& cards = f.cards();

  std::vector<int> new_scope, new_cards;
  for (std::size_t i = 0; i < f.scope().size(); ++i) {
    if (static_cast<int>(i) == pos) continue;
    new_scope.push_back(f.scope()[i]);
    new_cards.push_back(cards[i]);
  }
  std::size_t inner = 1;
  for (std::size_t i = static_cast<std::size_t>(pos) + 1; i < cards.size(); ++i)
    inner *= static_cast<std::size_t>(cards[i]);
  const std::size_t mid = static_cast<std::size_t>(cards[static_cast<std::size_t>(pos)]);
  const std::size_t outer = f.table().size() / (inner * mid);

  std::vector<double> table(outer * inner);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t in = 0; in < inner; ++in)
      table[o * inner + in] =
          f.table()[(o * mid + static_cast<std::size_t>(value)) * inner + in];
  return Factor(std::move(new_scope), std::move(new_cards), std::move(table));
}

/// Greedy min-fill ordering for the variables of `scopes` not in `keep`.
/// Ties break toward the smallest variable id, so the order is deterministic.
inline std::vector<int> min_fill_order(
    const std::vector<std::vector<int>>& scopes, std::span<const int> keep) {
  int max_id = -1;
  for (const auto& s : scopes)
    for (int v : s) max_id = std::max(max_id, v);
  for (int k : keep) max_id = std::max(max_id, k);
  const std::size_t width = static_cast<std::size_t>(max_id + 1);

  std::vector<char> in_keep(width, 0);
  for (int k : keep) in_keep[static_cast<std::size_t>(k)] = 1;

  std::vector<char> present(width, 0);
  std::vector<std::vector<char>> graph(width, std::vector<char>(width, 0));
  for (const auto& s : scopes)
    for (std::size_t i = 0; i < s.size(); ++i) {
      present[static_cast<std::size_t>(s[i])] = 1;
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        graph[static_cast<std::size_t>(s[i])][static_cast<std::size_t>(s[j])] = 1;
        graph[static_cast<std::size_t>(s[j])][static_cast<std::size_t>(s[i])] = 1;
      }
    }

  std::vector<int> pending;
  for (std::size_t v = 0; v < width; ++v)
    if (present[v] && !in_keep[v]) pending.push_back(static_cast<int>(v));

  std::vector<int> order;
  order.reserve(pending.size());
  std::vector<char> eliminated(width, 0);
  while (order.size() < pending.size()) {
    int best = -1;
    long best_fill = -1;
    for (int v : pending) {
      if (eliminated[static_cast<std::size_t>(v)]) continue;
      std::vector<int> nbrs;
      for (std::size_t u = 0; u < width; ++u)
        if (!eliminated[u] && graph[static_cast<std::size_t>(v)][u])
          nbrs.push_back(static_cast<int>(u));
      long fill = 0;
      for (std::size_t i = 0; i < nbrs.size(); ++i)
        for (std::size_t j = i + 1; j < nbrs.size(); ++j)
          if (!graph[static_cast<std::size_t>(nbrs[i])]
                    [static_cast<std::size_t>(nbrs[j])])
            ++fill;
      if (best < 0 || fill < best_fill) {
        best = v;
        best_fill = fill;
      }
    }
    order.push_back(best);
    eliminated[static_cast<std::size_t>(best)] = 1;
    std::vector<int> nbrs;
    for (std::size_t u = 0; u < width; ++u)
      if (!eliminated[u] && graph[static_cast<std::size_t>(best)][u])
        nbrs.push_back(static_cast<int>(u));
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
        graph[static_cast<std::size_t>(nbrs[i])][static_cast<std::size_t>(nbrs[j])] = 1;
        graph[static_cast<std::size_t>(nbrs[j])][static_cast<std::size_t>(nbrs[i])] = 1;
      }
  }
  return order;
}

/// Sum-product elimination: multiplies the factors and sums out everything
/// not in `keep`. Cardinalities are taken from the factor scopes and checked
/// for consistency. With `order` given it is used verbatim (it must cover
/// exactly the eliminated variables); otherwise min-fill decides.
inline Factor eliminate(std::vector<Factor> factors, std::span<const int> keep,
                        const std::vector<int>* order = nullptr) {
  // Consistency of cardinalities across factors.
  std::unordered_map<int, int> cards;
  for (const auto& f : factors)
    for (std::size_t i = 0; i < f.scope().size(); ++i) {
      auto [it, inserted] = cards.emplace(f.scope()[i], f.cards()[i]);
      if (!inserted && it->second != f.cards()[i])
        throw ScopeMismatch("factors disagree on a variable's cardinality");
    }

  std::vector<int> elim;
  if (order) {
    elim = *order;
  } else {
    std::vector<std::vector<int>> scopes;
    scopes.reserve(factors.size());
    for (const auto& f : factors) scopes.push_back(f.scope());
    elim = min_fill_order(scopes, keep);
  }

  for (int v : elim) {
    Factor bucket = Factor::constant(1.0);
    bool any = false;
    std::vector<Factor> rest;
    rest.reserve(factors.size());
    for (auto& f : factors) {
      if (f.position_of(v) >= 0) {
        bucket = any ? product(bucket, f) : std::move(f);
        any = true;
      } else {
        rest.push_back(std::move(f));
      }
    }
    factors = std::move(rest);
    if (any) factors.push_back(sum_out(bucket, v));
  }

  Factor result = Factor::constant(1.0);
  for (auto& f : factors) result = product(result, f);
  return result;
}

}  // namespace beliefvar

#endif  // BELIEFVAR_FACTOR_HPP
