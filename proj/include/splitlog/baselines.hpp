#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "splitlog/config.hpp"
#include "splitlog/design_state.hpp"
#include "splitlog/logistic.hpp"
#include "splitlog/policy.hpp"

namespace splitlog {

struct BaselineConfig {
  ProblemConfig problem;
  int fit_steps = 20;
  double fit_lr = 0.3;
  int mc_samples = 1;  // DDRTS
  // DDRTS regularization/prior scale: its fit penalty and Hessian ridge use
  // this value times lambda. 0 (the default) selects kappa, matching the
  // kappa*lambda ridge used by every design matrix in the suite; set to 1
  // for a plain lambda prior.
  double ddrts_reg_scale = 0.0;
  double ddrts_reg() const {
    return (ddrts_reg_scale > 0 ? ddrts_reg_scale : problem.kappa) *
           problem.lambda;
  }
  // warm-up size per level for the sup-style baselines, ceil(sqrt(dT))
  long warmup() const {
    return static_cast<long>(std::ceil(
        std::sqrt(static_cast<double>(problem.d) * problem.T)));
  }
};

// Shared machinery for the two Auer-style baselines: independent per-level
// buckets, forced uniform exploration until each visited level holds warmup
// samples, then width-based explore/exploit/eliminate.
class SupStyleBaseline : public Policy {
 public:
  SupStyleBaseline(const BaselineConfig& cfg, std::uint64_t seed);

  PolicyDecision choose(const Eigen::MatrixXd& contexts) override;
  void observe(const PolicyDecision& decision, const Eigen::MatrixXd& contexts,
               double reward) override;
  std::vector<std::string> audit_violations() const override;

  int num_levels() const { return S_; }

 protected:
  struct LevelBucket {
    std::vector<Sample> samples;
    std::vector<long> rounds;
    DesignState gram;
    Eigen::VectorXd theta;
    Eigen::LLT<Eigen::MatrixXd> hessian_llt;  // used by SupLogistic widths
    bool dirty = true;
    bool width_add_during_warmup = false;

    LevelBucket(int dim, double ridge)
        : gram(dim, ridge), theta(Eigen::VectorXd::Zero(dim)) {}
  };

  // Width of arm x at a refreshed level; the two baselines differ here.
  virtual double width(const LevelBucket& lvl, const Eigen::VectorXd& x) const = 0;

  void refresh(LevelBucket& lvl);

  BaselineConfig cfg_;
  int S_;
  double alpha_;
  std::vector<LevelBucket> levels_;
  std::mt19937_64 rng_;
  long round_ = 0;
};

// Width against the level's regularized Gram matrix.
class SupCbGlmPolicy : public SupStyleBaseline {
 public:
  using SupStyleBaseline::SupStyleBaseline;

 protected:
  double width(const LevelBucket& lvl, const Eigen::VectorXd& x) const override;
};

// Width against the level's logistic Hessian at the fitted parameter.
class SupLogisticPolicy : public SupStyleBaseline {
 public:
  using SupStyleBaseline::SupStyleBaseline;

 protected:
  double width(const LevelBucket& lvl, const Eigen::VectorXd& x) const override;
};

// Thompson-sampling baseline: refit on all collected samples each round,
// sample parameters from N(theta, H(theta)^{-1}) via the symmetric square
// root, pick the arm with the highest Monte-Carlo argmax count.
class DdrtsGlmPolicy : public Policy {
 public:
  DdrtsGlmPolicy(const BaselineConfig& cfg, std::uint64_t seed);

  PolicyDecision choose(const Eigen::MatrixXd& contexts) override;
  void observe(const PolicyDecision& decision, const Eigen::MatrixXd& contexts,
               double reward) override;

  const Eigen::VectorXd& theta() const { return theta_; }
  // Current posterior pieces; exposed for the covariance oracle test.
  Eigen::MatrixXd covariance_sqrt() const { return cov_sqrt_; }
  // Forces the Gaussian offset to zero on subsequent draws (test hook).
  void set_degenerate_sampling(bool on) { degenerate_ = on; }

 private:
  void refit();

  BaselineConfig cfg_;
  Eigen::MatrixXd features_;  // d x n, collected features
  Eigen::VectorXd rewards_;   // n
  long n_ = 0;
  Eigen::VectorXd theta_;
  Eigen::MatrixXd cov_sqrt_;
  std::mt19937_64 rng_;
  bool degenerate_ = false;
  long round_ = 0;
};

}  // namespace splitlog
