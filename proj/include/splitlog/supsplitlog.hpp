#pragma once

#include <vector>

#include "splitlog/config.hpp"
#include "splitlog/design_state.hpp"
#include "splitlog/logistic.hpp"
#include "splitlog/policy.hpp"

namespace splitlog {

// Number of levels: floor(0.5*log2 T) for the fixed schedule,
// floor(log2 T) for the data-dependent one.
int compute_S(int T, Variant variant);

// alpha = 2*(alpha1 + alpha2), alpha1 = sqrt(2*L_mu*kappa^2*log(4TSK/delta))
//         + sqrt(kappa/(9*lambda))*log(4TSK/delta), alpha2 = B*sqrt(kappa*lambda)
double compute_alpha(const ProblemConfig& cfg, int S);

// beta = kappa*sqrt(0.5*d*log(1+T/(kappa*lambda*d)) + 0.5*log(2S/delta))
//        + B*sqrt(kappa*lambda)
double compute_beta_fixed(const ProblemConfig& cfg, int S);

// tau^(s) = (1/beta^2) * min{1, 2^-s / sqrt(32*L_mu*kappa*d*log(1+T/(kappa*lambda*d)))}
double compute_tau_fixed(const ProblemConfig& cfg, int S, int s, double beta);

// beta_t^(s) = (kappa/sqrt(2))*sqrt(logdet_ratio(V_P) + log(2S/delta))
//              + B*sqrt(kappa*lambda)
double compute_beta_adaptive(const DesignState& v_pilot,
                             const ProblemConfig& cfg, int S);

// tau_t^(s) = (1/beta_t^2) * min{1, 2^-s * (32*L_mu*kappa*logdet_ratio(V_E))^{-1/2}}
double compute_tau_adaptive(const DesignState& v_est, double beta_t,
                            const ProblemConfig& cfg, int s);

// Per-level bookkeeping: the pilot/estimation split of the bucket, their
// design matrices, and cached estimators. The one-step gradient/Hessian over
// the estimation set is maintained incrementally and rebuilt whenever
// theta_bar changes; this is observationally identical to recomputing from
// the sample list.
struct LevelState {
  explicit LevelState(int level, int dim, double ridge)
      : level(level),
        v_pilot(dim, ridge),
        v_est(dim, ridge),
        theta_bar(Eigen::VectorXd::Zero(dim)),
        theta_hat(Eigen::VectorXd::Zero(dim)),
        grad_partial(Eigen::VectorXd::Zero(dim)),
        hess_partial(Eigen::MatrixXd::Zero(dim, dim)) {}

  int level;
  std::vector<Sample> pilot_samples;
  std::vector<Sample> estimation_samples;
  std::vector<long> bucket_rounds;  // Psi^(s), time indices in arrival order
  DesignState v_pilot;
  DesignState v_est;
  Eigen::VectorXd theta_bar;
  Eigen::VectorXd theta_hat;
  bool pilot_dirty = false;
  bool est_dirty = false;

  // Partial sums over the estimation set at the current theta_bar:
  // grad_partial = sum (r - mu(x'tb)) x, hess_partial = sum dmu(x'tb) x x'.
  Eigen::VectorXd grad_partial;
  Eigen::MatrixXd hess_partial;
};

// Diagnostics emitted during the level walk, one entry per surviving arm per
// visited level. Consumed by the statistical checks in the test suites.
struct WalkStat {
  int level;
  int arm;
  double mean;
  double width;
};

class SupSplitLogPolicy : public Policy {
 public:
  explicit SupSplitLogPolicy(const ProblemConfig& cfg);

  PolicyDecision choose(const Eigen::MatrixXd& contexts) override;
  void observe(const PolicyDecision& decision, const Eigen::MatrixXd& contexts,
               double reward) override;
  std::vector<std::string> audit_violations() const override;

  // Appends the sample to the pilot or estimation set of the decision's
  // level; only legal for the explore branches.
  void record_reward(const PolicyDecision& decision, const Sample& sample);

  int num_levels() const { return S_; }
  double alpha() const { return alpha_; }
  double beta_fixed() const { return beta_fixed_; }
  double tau(int s) const;  // the threshold the next (a1) test would use
  const std::vector<LevelState>& levels() const { return levels_; }

  void set_record_walk_stats(bool on) { record_stats_ = on; }
  const std::vector<WalkStat>& last_walk_stats() const { return walk_stats_; }

 private:
  void refresh_estimators(LevelState& lvl);
  void rebuild_estimation_cache(LevelState& lvl);

  ProblemConfig cfg_;
  int S_;
  double alpha_;
  double beta_fixed_;
  std::vector<double> tau_fixed_;  // indexed by level-1
  std::vector<LevelState> levels_;
  long round_ = 0;

  bool record_stats_ = false;
  std::vector<WalkStat> walk_stats_;
};

}  // namespace splitlog
