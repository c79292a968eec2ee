#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "beliefvar/rng.hpp"
#include "beliefvar/student_t.hpp"

using namespace beliefvar;

namespace {

RegressionFamily intercept_only(double mu, double psi, double nu, double tau2) {
  return RegressionFamily(Eigen::VectorXd::Constant(1, mu),
                          Eigen::MatrixXd::Constant(1, 1, psi), nu, tau2);
}

}  // namespace

TEST_CASE("update with zero rows is the identity") {
  const RegressionFamily prior = intercept_only(0.5, 2.0, 3.0, 1.5);
  const RegressionFamily post = regression_posterior_update(
      prior, Eigen::MatrixXd(0, 1), Eigen::VectorXd(0));
  CHECK(post.nu == prior.nu);
  CHECK(post.tau2 == prior.tau2);
  CHECK(post.mu(0) == prior.mu(0));
}

TEST_CASE("degrees of freedom add the row count") {
  const RegressionFamily prior = intercept_only(0.0, 1.0, 3.0, 1.0);
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(7, 1);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(7);
  CHECK(regression_posterior_update(prior, X, y).nu == 10.0);
}

TEST_CASE("intercept-only update solved by hand") {
  const RegressionFamily prior = intercept_only(0.0, 1.0, 1.0, 1.0);
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(2, 1);
  Eigen::VectorXd y(2);
  y << 2.0, 2.0;
  const RegressionFamily post = regression_posterior_update(prior, X, y);
  CHECK(post.nu == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(post.mu(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(post.nu_psi(0, 0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(post.tau2 == doctest::Approx(11.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("sequential updates equal one batch update") {
  Rng rng(64);
  const int d = 2;
  Eigen::VectorXd mu0(d + 1);
  mu0 << 0.2, -0.1, 0.4;
  Eigen::MatrixXd psi0 = Eigen::MatrixXd::Identity(d + 1, d + 1) * 1.3;
  const RegressionFamily prior(mu0, psi0, 2.5, 0.8);

  const int n1 = 6, n2 = 9;
  Eigen::MatrixXd X(n1 + n2, d + 1);
  Eigen::VectorXd y(n1 + n2);
  for (int i = 0; i < n1 + n2; ++i) {
    X(i, 0) = 1.0;
    for (int j = 1; j <= d; ++j) X(i, j) = 2.0 * rng.uniform() - 1.0;
    y(i) = rng.normal();
  }
  const RegressionFamily batch = regression_posterior_update(prior, X, y);
  const RegressionFamily sequential = regression_posterior_update(
      regression_posterior_update(prior, X.topRows(n1), y.head(n1)),
      X.bottomRows(n2), y.tail(n2));

  CHECK(sequential.nu == doctest::Approx(batch.nu).epsilon(1e-14));
  CHECK(sequential.tau2 == doctest::Approx(batch.tau2).epsilon(1e-10));
  for (int i = 0; i <= d; ++i) {
    CHECK(sequential.mu(i) == doctest::Approx(batch.mu(i)).epsilon(1e-10));
    for (int j = 0; j <= d; ++j)
      CHECK(sequential.nu_psi(i, j) ==
            doctest::Approx(batch.nu_psi(i, j)).epsilon(1e-10));
  }
}

TEST_CASE("predictive st1 parameters") {
  {
    // d = 0, nu = 2, Psi = 1, tau2 = 1: omega^2 = 1 * (1/2 + 1).
    const RegressionFamily fam = intercept_only(0.0, 1.0, 2.0, 1.0);
    const StParams p = predictive_st1(fam, Eigen::VectorXd(0));
    CHECK(p.nu == 2.0);
    CHECK(p.omega(0, 0) == doctest::Approx(1.5).epsilon(1e-14));
  }
  {
    // Huge Psi: the inverse term vanishes, omega^2 -> tau^2.
    const RegressionFamily fam = intercept_only(0.0, 1e6, 2.0, 1.7);
    const StParams p = predictive_st1(fam, Eigen::VectorXd(0));
    CHECK(p.omega(0, 0) == doctest::Approx(1.7).epsilon(1e-4));
  }
  {
    // eta is affine in x.
    Eigen::VectorXd mu(2);
    mu << 0.3, 1.2;
    const RegressionFamily fam(mu, Eigen::MatrixXd::Identity(2, 2), 3.0, 1.0);
    const auto eta_at = [&fam](double x) {
      return predictive_st1(fam, Eigen::VectorXd::Constant(1, x)).eta(0);
    };
    CHECK(eta_at(1.0) + eta_at(3.0) ==
          doctest::Approx(2.0 * eta_at(2.0)).epsilon(1e-13));
    CHECK(eta_at(2.0) - eta_at(1.0) == doctest::Approx(1.2).epsilon(1e-13));
  }
}

TEST_CASE("st density special values and symmetry") {
  const StParams cauchy = st1_params(0.0, 1.0, 1.0);
  CHECK(st_density(cauchy, 0.0) ==
        doctest::Approx(1.0 / 3.14159265358979323846).epsilon(1e-14));

  const StParams p = st1_params(0.7, 2.3, 4.5);
  for (double delta : {0.1, 0.8, 2.5}) {
    CHECK(st_density(p, 0.7 + delta) ==
          doctest::Approx(st_density(p, 0.7 - delta)).epsilon(1e-13));
  }
}

TEST_CASE("st density decreases away from the location along a ray") {
  const StParams p = st1_params(-0.4, 1.9, 7.0);
  double previous = st_density(p, -0.4);
  for (double step = 0.2; step < 6.0; step += 0.2) {
    const double value = st_density(p, -0.4 + step);
    CHECK(value < previous);
    previous = value;
  }
}

TEST_CASE("st1 density integrates to one") {
  const StParams p = st1_params(0.0, 1.0, 5.0);
  const auto f = [&p](double t) { return st_density(p, t); };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          f, -50.0, 50.0, 8, 1e-10);
  CHECK(std::abs(integral - 1.0) < 1e-6);
}

TEST_CASE("st1 predictive law matches its generative construction") {
  // sigma^-2 ~ (tau^2 nu)^-1 chi^2_nu, beta | sigma ~ N(mu, sigma^2 (nu Psi)^-1),
  // Y = (1, x) beta + sigma Z. Kolmogorov-Smirnov against the St1 cdf.
  const double nu = 5.0, tau2 = 1.4, psi = 2.0, mu = 0.6;
  const RegressionFamily fam = intercept_only(mu, psi, nu, tau2);
  const StParams p = predictive_st1(fam, Eigen::VectorXd(0));
  const double omega = std::sqrt(p.omega(0, 0));

  Rng rng(12121);
  const int k = 100000;
  std::vector<double> samples(static_cast<std::size_t>(k));
  for (double& y : samples) {
    const double sigma2 = tau2 * nu / rng.chi_square(nu);
    const double sigma = std::sqrt(sigma2);
    const double beta = mu + sigma / std::sqrt(nu * psi) * rng.normal();
    y = beta + sigma * rng.normal();
  }
  std::sort(samples.begin(), samples.end());

  const boost::math::students_t dist(nu);
  double ks = 0.0;
  for (int i = 0; i < k; ++i) {
    const double z = (samples[static_cast<std::size_t>(i)] - p.eta(0)) / omega;
    const double cdf = boost::math::cdf(dist, z);
    ks = std::max(ks, std::abs(cdf - (i + 1.0) / k));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / k));
  }
  CHECK(ks < 0.01);
}

TEST_CASE("doubled predictive with distinct configurations factorizes") {
  Eigen::VectorXd mu(2);
  mu << 0.1, -0.7;
  const RegressionFamily fam(mu, Eigen::MatrixXd::Identity(2, 2) * 1.5, 4.0,
                             0.9);
  const Eigen::VectorXd x1 = Eigen::VectorXd::Constant(1, 0.4);
  const Eigen::VectorXd x2 = Eigen::VectorXd::Constant(1, -1.1);
  const DoubledStPredictive d = predictive_st2_doubled(fam, x1, x2, false);
  const StParams p1 = predictive_st1(fam, x1);
  const StParams p2 = predictive_st1(fam, x2);
  for (double y1 : {-0.5, 0.3})
    for (double y2 : {0.0, 1.4})
      CHECK(d.log_density(y1, y2) ==
            doctest::Approx(st_log_density(p1, Eigen::VectorXd::Constant(1, y1)) +
                            st_log_density(p2, Eigen::VectorXd::Constant(1, y2)))
                .epsilon(1e-13));
}

TEST_CASE("doubled predictive with a shared configuration") {
  Eigen::VectorXd mu(2);
  mu << 0.2, 0.9;
  const RegressionFamily fam(mu, Eigen::MatrixXd::Identity(2, 2) * 2.0, 10.0,
                             1.1);
  const Eigen::VectorXd x1 = Eigen::VectorXd::Constant(1, 0.8);
  const Eigen::VectorXd x2 = Eigen::VectorXd::Constant(1, -0.3);
  const DoubledStPredictive d = predictive_st2_doubled(fam, x1, x2, true);
  REQUIRE(d.shared);

  // Diagonal entries equal the marginal omega^2 at each covariate.
  CHECK(d.joint.omega(0, 0) ==
        doctest::Approx(predictive_st1(fam, x1).omega(0, 0)).epsilon(1e-13));
  CHECK(d.joint.omega(1, 1) ==
        doctest::Approx(predictive_st1(fam, x2).omega(0, 0)).epsilon(1e-13));

  // Equal covariates: equal diagonal, strictly positive off-diagonal.
  const DoubledStPredictive same = predictive_st2_doubled(fam, x1, x1, true);
  CHECK(same.joint.omega(0, 0) ==
        doctest::Approx(same.joint.omega(1, 1)).epsilon(1e-14));
  CHECK(same.joint.omega(0, 1) > 0.0);
}

TEST_CASE("st2 covariance matches the generative construction") {
  // Shared (beta, sigma) induce dependence between the two replicates; the
  // sample covariance of (Y1, Y2) must match nu/(nu-2) * Omega entrywise.
  const double nu = 10.0, tau2 = 0.8, psi = 1.6, mu = -0.2;
  const RegressionFamily fam = intercept_only(mu, psi, nu, tau2);
  const Eigen::VectorXd x0(0);
  const DoubledStPredictive d = predictive_st2_doubled(fam, x0, x0, true);
  const Eigen::MatrixXd expected = d.joint.omega * (nu / (nu - 2.0));

  Rng rng(90210);
  const int k = 100000;
  std::vector<double> y1(static_cast<std::size_t>(k)), y2(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double sigma = std::sqrt(tau2 * nu / rng.chi_square(nu));
    const double beta = mu + sigma / std::sqrt(nu * psi) * rng.normal();
    y1[static_cast<std::size_t>(i)] = beta + sigma * rng.normal();
    y2[static_cast<std::size_t>(i)] = beta + sigma * rng.normal();
  }
  double m1 = 0, m2 = 0;
  for (int i = 0; i < k; ++i) {
    m1 += y1[static_cast<std::size_t>(i)];
    m2 += y2[static_cast<std::size_t>(i)];
  }
  m1 /= k;
  m2 /= k;

  const auto cov_and_se = [&](const std::vector<double>& a, double ma,
                              const std::vector<double>& b, double mb) {
    double cov = 0.0;
    for (int i = 0; i < k; ++i)
      cov += (a[static_cast<std::size_t>(i)] - ma) *
             (b[static_cast<std::size_t>(i)] - mb);
    cov /= k;
    double var_z = 0.0;
    for (int i = 0; i < k; ++i) {
      const double z = (a[static_cast<std::size_t>(i)] - ma) *
                       (b[static_cast<std::size_t>(i)] - mb);
      var_z += (z - cov) * (z - cov);
    }
    return std::pair<double, double>(cov, std::sqrt(var_z / k / k));
  };

  const auto [c11, se11] = cov_and_se(y1, m1, y1, m1);
  const auto [c22, se22] = cov_and_se(y2, m2, y2, m2);
  const auto [c12, se12] = cov_and_se(y1, m1, y2, m2);
  CHECK(std::abs(c11 - expected(0, 0)) < 4.0 * se11);
  CHECK(std::abs(c22 - expected(1, 1)) < 4.0 * se22);
  CHECK(std::abs(c12 - expected(0, 1)) < 4.0 * se12);
}

TEST_CASE("dimension and positivity errors") {
  CHECK_THROWS_AS(intercept_only(0.0, -1.0, 2.0, 1.0), SingularPsi);
  CHECK_THROWS_AS(intercept_only(0.0, 1.0, -2.0, 1.0), Error);
  const RegressionFamily fam = intercept_only(0.0, 1.0, 2.0, 1.0);
  CHECK_THROWS_AS(predictive_st1(fam, Eigen::VectorXd::Constant(1, 0.0)),
                  Error);
}
