#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "splitlog/config.hpp"

namespace splitlog {

// A frozen synthetic logistic-bandit instance: parameter, full context
// tensor, and regime metadata. Immutable after generation.
struct EnvironmentInstance {
  Eigen::VectorXd theta_star;
  std::vector<Eigen::MatrixXd> contexts;  // T entries, each K x d
  Eigen::MatrixXd basis;                  // d x r orthonormal frame
  Regime regime = Regime::Middle;
  int effective_rank = 0;
  double norm_lo = 0.0;
  double norm_hi = 0.0;
  double realized_kappa = 0.0;  // max over (t,a) of 1/dmu(x'theta*)
  std::uint64_t seed = 0;
  bool axis_aligned = false;
  int T = 0;
  int K = 0;
  int d = 0;
};

struct RegimeSpec {
  int rank;
  double norm_lo;
  double norm_hi;
};

RegimeSpec regime_spec(Regime regime, int d);

EnvironmentInstance generate_instance(const ProblemConfig& cfg, Regime regime,
                                      std::uint64_t seed,
                                      bool axis_aligned = false);

// Bernoulli reward with mean mu(x_{t,a}' theta*); consumes exactly one
// uniform draw from rng so that paired policies share reward realizations.
int sample_reward(const EnvironmentInstance& env, int t, int a,
                  std::mt19937_64& rng);

// mu(x_{t,a*}' theta*) - mu(x_{t,a}' theta*), a* the argmax logit arm.
double instant_regret(const EnvironmentInstance& env, int t, int a);

// JSON export: theta*, basis, regime metadata, seed, and a content hash over
// the context tensor. Import regenerates the contexts from the seed and
// verifies the hash.
std::string instance_to_json(const EnvironmentInstance& env);
EnvironmentInstance instance_from_json(const std::string& text,
                                       const ProblemConfig& cfg);

}  // namespace splitlog
