#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "splitlog/design_state.hpp"
#include "splitlog/environment.hpp"
#include "splitlog/logistic.hpp"
#include "splitlog/rng.hpp"

using namespace splitlog;

namespace {

ProblemConfig base_cfg(int d, int T, int K) {
  ProblemConfig cfg;
  cfg.d = d;
  cfg.T = T;
  cfg.K = K;
  cfg.kappa = 20.0;
  cfg.lambda = 1.0;
  cfg.B = 1.0;
  cfg.delta = 0.1;
  return cfg;
}

}  // namespace

TEST_CASE("regime specifications") {
  CHECK(regime_spec(Regime::Low, 100).rank == 2);
  CHECK(regime_spec(Regime::Low, 100).norm_lo == 0.0);
  CHECK(regime_spec(Regime::Low, 100).norm_hi == doctest::Approx(0.05));
  CHECK(regime_spec(Regime::Middle, 100).rank == 10);
  CHECK(regime_spec(Regime::Middle, 100).norm_lo == doctest::Approx(0.3));
  CHECK(regime_spec(Regime::Middle, 100).norm_hi == doctest::Approx(0.5));
  CHECK(regime_spec(Regime::High, 100).rank == 100);
  CHECK(regime_spec(Regime::High, 100).norm_lo == doctest::Approx(0.8));
  CHECK(regime_spec(Regime::High, 100).norm_hi == doctest::Approx(1.0));
  // rank never exceeds the ambient dimension
  CHECK(regime_spec(Regime::Middle, 5).rank == 5);
}

TEST_CASE("instance geometry obeys the regime contract") {
  for (const Regime regime : {Regime::Low, Regime::Middle, Regime::High}) {
    const ProblemConfig cfg = base_cfg(100, 50, 5);
    const EnvironmentInstance env = generate_instance(cfg, regime, 4);
    const RegimeSpec spec = regime_spec(regime, cfg.d);
    CHECK(env.effective_rank == spec.rank);
    CHECK(env.basis.cols() == spec.rank);
    // orthonormal frame
    CHECK((env.basis.transpose() * env.basis -
           Eigen::MatrixXd::Identity(spec.rank, spec.rank))
              .norm() < 1e-10);
    // projector onto the frame
    const Eigen::MatrixXd proj = env.basis * env.basis.transpose();
    CHECK(env.theta_star.norm() <= cfg.B + 1e-12);
    for (int t = 0; t < env.T; ++t) {
      for (int a = 0; a < env.K; ++a) {
        const Eigen::VectorXd x = env.contexts[t].row(a).transpose();
        const double nrm = x.norm();
        CHECK(nrm <= spec.norm_hi + 1e-9);
        CHECK(nrm >= spec.norm_lo - 1e-9);
        CHECK(nrm <= 1.0 + 1e-12);
        CHECK((x - proj * x).norm() < 1e-9);
        // the slope condition: dmu at every realized logit >= 1/kappa
        CHECK(dmu(x.dot(env.theta_star)) >= 1.0 / cfg.kappa - 1e-12);
      }
    }
    CHECK(env.realized_kappa <= cfg.kappa + 1e-9);
  }
}

TEST_CASE("axis-aligned basis option") {
  const ProblemConfig cfg = base_cfg(20, 10, 3);
  const EnvironmentInstance env =
      generate_instance(cfg, Regime::Middle, 8, /*axis_aligned=*/true);
  // each basis column is a coordinate vector
  for (int c = 0; c < env.basis.cols(); ++c) {
    int nonzeros = 0;
    for (int r = 0; r < env.basis.rows(); ++r)
      if (std::abs(env.basis(r, c)) > 1e-14) ++nonzeros;
    CHECK(nonzeros == 1);
    CHECK(env.basis.col(c).norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("instance generation is seed-deterministic") {
  const ProblemConfig cfg = base_cfg(10, 40, 4);
  const EnvironmentInstance a = generate_instance(cfg, Regime::Middle, 31);
  const EnvironmentInstance b = generate_instance(cfg, Regime::Middle, 31);
  const EnvironmentInstance c = generate_instance(cfg, Regime::Middle, 32);
  CHECK((a.theta_star - b.theta_star).norm() == 0.0);
  for (int t = 0; t < cfg.T; ++t)
    CHECK((a.contexts[t] - b.contexts[t]).norm() == 0.0);
  CHECK((a.theta_star - c.theta_star).norm() > 0.0);
}

TEST_CASE("reward sampler is an unbiased Bernoulli") {
  const ProblemConfig cfg = base_cfg(5, 3, 2);
  const EnvironmentInstance env = generate_instance(cfg, Regime::High, 6);
  const double p =
      mu(env.contexts[0].row(1).dot(env.theta_star));
  auto rng = make_rng(6, Stream::Reward);
  const int n = 100000;
  long hits = 0;
  for (int i = 0; i < n; ++i) hits += sample_reward(env, 0, 1, rng);
  const double sigma = std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(static_cast<double>(hits) / n - p) <= 3.0 * sigma);
}

TEST_CASE("reward sampler consumes one draw per call") {
  // coupling contract: two policies given the same stream see identical
  // realizations round by round regardless of which arm they pull
  const ProblemConfig cfg = base_cfg(4, 30, 3);
  const EnvironmentInstance env = generate_instance(cfg, Regime::Middle, 14);
  auto r1 = make_rng(14, Stream::Reward);
  auto r2 = make_rng(14, Stream::Reward);
  for (int t = 0; t < 30; ++t) {
    sample_reward(env, t, t % 3, r1);
    sample_reward(env, t, 0, r2);
  }
  CHECK(r1() == r2());  // streams advanced identically
}

TEST_CASE("instant regret") {
  const ProblemConfig cfg = base_cfg(6, 20, 5);
  const EnvironmentInstance env = generate_instance(cfg, Regime::High, 9);
  for (int t = 0; t < 20; ++t) {
    // duplicate oracle: scan logits directly
    Eigen::VectorXd logits = env.contexts[t] * env.theta_star;
    int best = 0;
    for (int a = 1; a < 5; ++a)
      if (logits[a] > logits[best]) best = a;
    CHECK(instant_regret(env, t, best) == 0.0);
    for (int a = 0; a < 5; ++a) {
      const double expect = mu(logits[best]) - mu(logits[a]);
      CHECK(instant_regret(env, t, a) == doctest::Approx(expect).epsilon(1e-12));
      CHECK(instant_regret(env, t, a) >= 0.0);
    }
  }
}

TEST_CASE("json round trip with content verification") {
  const ProblemConfig cfg = base_cfg(8, 25, 4);
  const EnvironmentInstance env = generate_instance(cfg, Regime::Low, 55);
  const std::string text = instance_to_json(env);
  const EnvironmentInstance back = instance_from_json(text, cfg);
  CHECK((back.theta_star - env.theta_star).norm() == 0.0);
  CHECK(back.seed == env.seed);
  CHECK(back.regime == env.regime);
  for (int t = 0; t < cfg.T; ++t)
    CHECK((back.contexts[t] - env.contexts[t]).norm() == 0.0);

  // a tampered seed fails the content hash
  std::string bad = text;
  const auto pos = bad.find("\"seed\": 55");
  REQUIRE(pos != std::string::npos);
  bad.replace(pos, 10, "\"seed\": 56");
  CHECK_THROWS_AS(instance_from_json(bad, cfg), std::invalid_argument);
}

TEST_CASE("config validation") {
  ProblemConfig cfg = base_cfg(3, 100, 2);
  CHECK_NOTHROW(cfg.validate());
  cfg.kappa = 3.0;  // below the attainable minimum 4
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = base_cfg(3, 100, 2);
  cfg.lambda = 0.01;  // below 1/kappa
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = base_cfg(0, 100, 2);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("regimes order the accumulated log-volume") {
  // With all arms inserted every round, higher-information regimes
  // accumulate strictly more log-det than lower ones, per seed.
  const ProblemConfig cfg = base_cfg(50, 200, 5);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    double ld[3];
    int i = 0;
    for (const Regime regime : {Regime::Low, Regime::Middle, Regime::High}) {
      const EnvironmentInstance env = generate_instance(cfg, regime, seed);
      DesignState v(cfg.d, cfg.kappa * cfg.lambda);
      for (int t = 0; t < cfg.T; ++t)
        for (int a = 0; a < cfg.K; ++a)
          v.insert(env.contexts[t].row(a).transpose());
      ld[i++] = v.logdet_ratio();
    }
    CHECK(ld[0] < ld[1]);
    CHECK(ld[1] < ld[2]);
  }
}
