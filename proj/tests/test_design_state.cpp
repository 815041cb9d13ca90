#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "splitlog/design_state.hpp"

using splitlog::DesignState;

namespace {

Eigen::VectorXd unit(int d, int i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  v[i] = 1.0;
  return v;
}

// Dense oracle: rebuild V from scratch and invert/eig-decompose directly.
struct DenseOracle {
  Eigen::MatrixXd v;
  explicit DenseOracle(int d, double ridge)
      : v(ridge * Eigen::MatrixXd::Identity(d, d)) {}
  void insert(const Eigen::VectorXd& x) { v += x * x.transpose(); }
  Eigen::MatrixXd inverse() const {
    return v.inverse();
  }
  double logdet_ratio(double ridge) const {
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(v).eigenvalues();
    double ld = 0.0;
    for (int i = 0; i < ev.size(); ++i) ld += std::log(ev[i]);
    return ld - v.rows() * std::log(ridge);
  }
};

}  // namespace

TEST_CASE("construction") {
  DesignState s(2, 1.0);
  CHECK(s.matrix().isApprox(Eigen::MatrixXd::Identity(2, 2)));
  CHECK(s.logdet_ratio() == 0.0);
  CHECK(s.count() == 0);

  DesignState s2(3, 20.0);
  CHECK(s2.inverse().isApprox(0.05 * Eigen::MatrixXd::Identity(3, 3)));

  CHECK_THROWS_AS(DesignState(1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(DesignState(0, 1.0), std::invalid_argument);
}

TEST_CASE("rank-one insert on identity") {
  DesignState s(2, 1.0);
  s.insert(unit(2, 0));
  CHECK(s.logdet_ratio() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  Eigen::MatrixXd expected(2, 2);
  expected << 0.5, 0.0, 0.0, 1.0;
  CHECK(s.inverse().isApprox(expected, 1e-12));
  CHECK(s.mahalanobis_sq(unit(2, 0)) == doctest::Approx(0.5).epsilon(1e-12));

  s.insert(unit(2, 1));
  CHECK(s.logdet_ratio() ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("zero vector is a matrix no-op") {
  DesignState s(3, 2.0);
  const Eigen::MatrixXd before = s.matrix();
  s.insert(Eigen::VectorXd::Zero(3));
  CHECK(s.matrix().isApprox(before));
  CHECK(s.logdet_ratio() == 0.0);
  CHECK(s.count() == 1);
}

TEST_CASE("mahalanobis on fresh states") {
  DesignState a(2, 1.0);
  CHECK(a.mahalanobis_sq(unit(2, 0)) == doctest::Approx(1.0));
  DesignState b(2, 4.0);
  CHECK(b.mahalanobis_sq(unit(2, 0)) == doctest::Approx(0.25));
  CHECK_THROWS_AS(a.mahalanobis_sq(Eigen::VectorXd::Zero(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(a.insert(Eigen::VectorXd::Zero(5)), std::invalid_argument);
}

TEST_CASE("agrees with dense oracle over long random sequences") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const int d : {1, 5, 37}) {
    DesignState s(d, 20.0);
    DenseOracle oracle(d, 20.0);
    double potential = 0.0;
    for (int i = 0; i < 700; ++i) {
      Eigen::VectorXd x(d);
      for (int k = 0; k < d; ++k) x[k] = gauss(rng);
      if (x.norm() > 1.0) x /= x.norm();
      potential += std::min(1.0, s.mahalanobis_sq(x));
      s.insert(x);
      oracle.insert(x);
    }
    CHECK((s.inverse() - oracle.inverse()).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(s.logdet_ratio() ==
          doctest::Approx(oracle.logdet_ratio(20.0)).epsilon(1e-8));
    // Elliptical potential: sum min{1, ||x||^2_{V^-1}} <= 2 logdet_ratio
    CHECK(potential <= 2.0 * s.logdet_ratio() + 1e-9);
    CHECK(s.logdet_ratio() <=
          d * std::log(1.0 + 700.0 / (20.0 * d)) + 1e-9);
    // matrix * inverse ~ I
    const Eigen::MatrixXd prod = s.matrix() * s.inverse();
    CHECK((prod - Eigen::MatrixXd::Identity(d, d)).norm() < 1e-8);
  }
}

TEST_CASE("logdet bound for 50 random unit vectors, d=5 ridge=20") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  DesignState s(5, 20.0);
  DenseOracle oracle(5, 20.0);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd x(5);
    for (int k = 0; k < 5; ++k) x[k] = gauss(rng);
    x /= x.norm();
    s.insert(x);
    oracle.insert(x);
  }
  CHECK(s.logdet_ratio() <= 5.0 * std::log(1.0 + 50.0 / 100.0));
  CHECK(std::abs(s.logdet_ratio() - oracle.logdet_ratio(20.0)) < 1e-8);
}

TEST_CASE("logdet monotone, insertion order immaterial for the matrix") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int d = 4;
  std::vector<Eigen::VectorXd> xs;
  for (int i = 0; i < 40; ++i) {
    Eigen::VectorXd x(d);
    for (int k = 0; k < d; ++k) x[k] = gauss(rng);
    xs.push_back(x / std::max(1.0, x.norm()));
  }

  DesignState fwd(d, 1.0);
  double prev = 0.0;
  for (const auto& x : xs) {
    fwd.insert(x);
    CHECK(fwd.logdet_ratio() >= prev);
    prev = fwd.logdet_ratio();
  }
  DesignState rev(d, 1.0);
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) rev.insert(*it);
  CHECK((fwd.matrix() - rev.matrix()).cwiseAbs().maxCoeff() < 1e-8);
}
