#ifndef BELIEFVAR_TESTS_DIRICHLET_MOMENTS_HPP
#define BELIEFVAR_TESTS_DIRICHLET_MOMENTS_HPP

// Closed-form Dirichlet moment algebra used as an independent oracle:
// E{theta_i theta_j} = a_i (a_j + delta_ij) / (a. (a. + 1)).

#include "beliefvar/network.hpp"

namespace beliefvar::testing {

inline double dirichlet_cross_moment(const DirichletRow& row, int i, int j) {
  const double total = row.alpha_sum();
  return row.alpha(i) * (row.alpha(j) + (i == j ? 1.0 : 0.0)) /
         (total * (total + 1.0));
}

/// Exact Var{q} for the chain X0 -> X1 -> X2 with evidence X0 = e and
/// hypothesis X2 = h: q = sum_b theta_{h|b} theta_{b|e}, all factors
/// independent across rows.
inline double chain_exact_variance(const Network& net, int e, int h) {
  const DirichletRow& row_b = net.row(1, e);
  const int d = row_b.size();
  double mean = 0.0, second = 0.0;
  for (int b = 0; b < d; ++b)
    mean += net.row(2, b).mean(h) * row_b.mean(b);
  for (int b = 0; b < d; ++b) {
    for (int b2 = 0; b2 < d; ++b2) {
      const double e_bb = dirichlet_cross_moment(row_b, b, b2);
      const double e_hh = (b == b2)
                              ? dirichlet_cross_moment(net.row(2, b), h, h)
                              : net.row(2, b).mean(h) * net.row(2, b2).mean(h);
      second += e_hh * e_bb;
    }
  }
  return second - mean * mean;
}

inline double chain_exact_mean(const Network& net, int e, int h) {
  const DirichletRow& row_b = net.row(1, e);
  double mean = 0.0;
  for (int b = 0; b < row_b.size(); ++b)
    mean += net.row(2, b).mean(h) * row_b.mean(b);
  return mean;
}

}  // namespace beliefvar::testing

#endif  // BELIEFVAR_TESTS_DIRICHLET_MOMENTS_HPP
