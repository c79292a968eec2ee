#ifndef BELIEFVAR_STUDENT_T_HPP
#define BELIEFVAR_STUDENT_T_HPP

#include <cmath>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "beliefvar/errors.hpp"

namespace beliefvar {

/// Normal-(inverse chi-square) regression family for one parent
/// configuration of a continuous variable:
///   (beta | sigma^2) ~ N_{d+1}(mu, sigma^2 (nu Psi)^{-1}),
///   sigma^{-2} ~ (tau^2 nu)^{-1} chi^2_nu.
/// Psi is stored as the product nu * Psi, which is what the conjugate update
/// equations are linear in; psi() divides it back out.
struct RegressionFamily {
  Eigen::VectorXd mu;       // length d+1, intercept first
  Eigen::MatrixXd nu_psi;   // (d+1) x (d+1), symmetric positive definite
  double nu = 1.0;          // degrees of freedom, real > 0
  double tau2 = 1.0;        // scale > 0

  RegressionFamily() = default;
  RegressionFamily(Eigen::VectorXd mu_in, Eigen::MatrixXd psi, double nu_in,
                   double tau2_in)
      : mu(std::move(mu_in)), nu_psi(nu_in * psi), nu(nu_in), tau2(tau2_in) {
    if (!(nu > 0.0) || !(tau2 > 0.0))
      throw Error("nu and tau^2 must be strictly positive");
    if (nu_psi.rows() != mu.size() || nu_psi.cols() != mu.size())
      throw Error("Psi dimension does not match mu");
    Eigen::LLT<Eigen::MatrixXd> llt(nu_psi);
    if (llt.info() != Eigen::Success)
      throw SingularPsi("Psi is not positive definite");
  }

  int dim() const { return static_cast<int>(mu.size()); }
  Eigen::MatrixXd psi() const { return nu_psi / nu; }
};

/// Parameters of a St_p(eta, Omega, nu) distribution.
struct StParams {
  Eigen::VectorXd eta;
  Eigen::MatrixXd omega;
  double nu = 1.0;

  int dim() const { return static_cast<int>(eta.size()); }
};

/// Scalar convenience constructor for St_1(eta, omega^2, nu).
inline StParams st1_params(double eta, double omega2, double nu) {
  StParams p;
  p.eta = Eigen::VectorXd::Constant(1, eta);
  p.omega = Eigen::MatrixXd::Constant(1, 1, omega2);
  p.nu = nu;
  return p;
}

/// Conjugate update on complete rows: X holds rows (1, x_i^T), y the
/// responses. The five update equations are applied in order; nu Psi and
/// nu Psi mu are linear, tau^2 is recovered last.
inline RegressionFamily regression_posterior_update(
    const RegressionFamily& prior, const Eigen::MatrixXd& X,
    const Eigen::VectorXd& y) {
  if (X.rows() != y.size())
    throw Error("design matrix and response length disagree");
  if (X.rows() > 0 && X.cols() != prior.dim())
    throw Error("design matrix width must be d+1");
  if (X.rows() == 0) return prior;

  RegressionFamily post;
  const double n = static_cast<double>(X.rows());
  post.nu = prior.nu + n;
  post.nu_psi = prior.nu_psi + X.transpose() * X;

  Eigen::LLT<Eigen::MatrixXd> llt(post.nu_psi);
  if (llt.info() != Eigen::Success)
    throw SingularPsi("updated nu Psi is not positive definite");
  post.mu = llt.solve(prior.nu_psi * prior.mu + X.transpose() * y);

  const double prior_quad = prior.mu.dot(prior.nu_psi * prior.mu);
  const double post_quad = post.mu.dot(post.nu_psi * post.mu);
  post.tau2 =
      (prior.nu * prior.tau2 + prior_quad + y.squaredNorm() - post_quad) /
      post.nu;
  if (!(post.tau2 > 0.0))
    throw SingularPsi("updated tau^2 is not strictly positive");
  return post;
}

/// Predictive law of Y at covariates x: St_1 with
///   eta = (1, x^T) mu,  omega^2 = tau^2 {(1, x^T)(nu Psi)^{-1}(1, x^T)^T + 1}.
inline StParams predictive_st1(const RegressionFamily& fam,
                               const Eigen::VectorXd& x) {
  if (static_cast<int>(x.size()) + 1 != fam.dim())
    throw Error("covariate length must be d");
  Eigen::VectorXd z(fam.dim());
  z(0) = 1.0;
  z.tail(x.size()) = x;

  Eigen::LLT<Eigen::MatrixXd> llt(fam.nu_psi);
  if (llt.info() != Eigen::Success)
    throw SingularPsi("nu Psi is not positive definite");
  const double quad = z.dot(llt.solve(z));

  StParams p;
  p.eta = Eigen::VectorXd::Constant(1, z.dot(fam.mu));
  p.omega = Eigen::MatrixXd::Constant(1, 1, fam.tau2 * (quad + 1.0));
  p.nu = fam.nu;
  return p;
}

/// St_p log density at t, computed through the Cholesky factor of Omega.
inline double st_log_density(const StParams& p, const Eigen::VectorXd& t) {
  const int dim = p.dim();
  if (static_cast<int>(t.size()) != dim)
    throw Error("density point has the wrong dimension");
  Eigen::LLT<Eigen::MatrixXd> llt(p.omega);
  if (llt.info() != Eigen::Success)
    throw SingularPsi("Omega is not positive definite");

  double log_det = 0.0;
  for (int i = 0; i < dim; ++i)
    log_det += 2.0 * std::log(llt.matrixL()(i, i));

  const Eigen::VectorXd centered = t - p.eta;
  const double quad = centered.dot(llt.solve(centered));

  constexpr double kLogPi = 1.1447298858494001741;
  return std::lgamma(0.5 * (p.nu + dim)) - std::lgamma(0.5 * p.nu) -
         0.5 * dim * (std::log(p.nu) + kLogPi) - 0.5 * log_det -
         0.5 * (p.nu + dim) * std::log1p(quad / p.nu);
}

inline double st_density(const StParams& p, const Eigen::VectorXd& t) {
  return std::exp(st_log_density(p, t));
}

inline double st_density(const StParams& p, double t) {
  return st_density(p, Eigen::VectorXd::Constant(1, t));
}

/// Joint predictive law of a replicated pair (Y1, Y2) in the doubled
/// network. Distinct parent configurations give independent St_1 factors;
/// a shared configuration gives the genuinely bivariate St_2 with
///   eta = X2 mu,  Omega = tau^2 {X2 (nu Psi)^{-1} X2^T + I2}.
struct DoubledStPredictive {
  bool shared = false;
  StParams joint;          // valid when shared
  StParams first, second;  // valid when !shared

  double log_density(double y1, double y2) const {
    if (shared) {
      Eigen::VectorXd t(2);
      t << y1, y2;
      return st_log_density(joint, t);
    }
    return st_log_density(first, Eigen::VectorXd::Constant(1, y1)) +
           st_log_density(second, Eigen::VectorXd::Constant(1, y2));
  }
  double density(double y1, double y2) const {
    return std::exp(log_density(y1, y2));
  }
};

inline DoubledStPredictive predictive_st2_doubled(const RegressionFamily& fam,
                                                  const Eigen::VectorXd& x1,
                                                  const Eigen::VectorXd& x2,
                                                  bool same_config) {
  DoubledStPredictive out;
  out.shared = same_config;
  if (!same_config) {
    out.first = predictive_st1(fam, x1);
    out.second = predictive_st1(fam, x2);
    return out;
  }

  Eigen::MatrixXd design(2, fam.dim());
  design(0, 0) = 1.0;
  design(1, 0) = 1.0;
  design.row(0).tail(x1.size()) = x1.transpose();
  design.row(1).tail(x2.size()) = x2.transpose();

  Eigen::LLT<Eigen::MatrixXd> llt(fam.nu_psi);
  if (llt.info() != Eigen::Success)
    throw SingularPsi("nu Psi is not positive definite");

  out.joint.eta = design * fam.mu;
  out.joint.omega =
      fam.tau2 * (design * llt.solve(design.transpose()) +
                  Eigen::MatrixXd::Identity(2, 2));
  out.joint.nu = fam.nu;
  return out;
}

}  // namespace beliefvar

#endif  // BELIEFVAR_STUDENT_T_HPP
