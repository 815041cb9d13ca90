#include "splitlog/supsplitlog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace splitlog {

int compute_S(int T, Variant variant) {
  if (T < 2) throw std::invalid_argument("compute_S: T must be >= 2");
  const double l2 = std::log2(static_cast<double>(T));
  const int s = static_cast<int>(
      std::floor(variant == Variant::Fixed ? 0.5 * l2 : l2));
  return std::max(1, s);
}

double compute_alpha(const ProblemConfig& cfg, int S) {
  const double logterm =
      std::log(4.0 * cfg.T * S * cfg.K / cfg.delta);
  const double a1 = std::sqrt(2.0 * cfg.L_mu * cfg.kappa * cfg.kappa * logterm) +
                    std::sqrt(cfg.kappa / (9.0 * cfg.lambda)) * logterm;
  const double a2 = cfg.B * std::sqrt(cfg.kappa * cfg.lambda);
  return 2.0 * (a1 + a2);
}

double compute_beta_fixed(const ProblemConfig& cfg, int S) {
  const double dlog =
      cfg.d * std::log(1.0 + cfg.T / (cfg.kappa * cfg.lambda * cfg.d));
  return cfg.kappa * std::sqrt(0.5 * dlog + 0.5 * std::log(2.0 * S / cfg.delta)) +
         cfg.B * std::sqrt(cfg.kappa * cfg.lambda);
}

double compute_tau_fixed(const ProblemConfig& cfg, int S, int s, double beta) {
  if (s < 1 || s > S) throw std::invalid_argument("compute_tau_fixed: bad level");
  const double dlog =
      cfg.d * std::log(1.0 + cfg.T / (cfg.kappa * cfg.lambda * cfg.d));
  const double denom = std::sqrt(32.0 * cfg.L_mu * cfg.kappa * dlog);
  return std::min(1.0, std::pow(2.0, -s) / denom) / (beta * beta);
}

double compute_beta_adaptive(const DesignState& v_pilot,
                             const ProblemConfig& cfg, int S) {
  return (cfg.kappa / std::sqrt(2.0)) *
             std::sqrt(v_pilot.logdet_ratio() + std::log(2.0 * S / cfg.delta)) +
         cfg.B * std::sqrt(cfg.kappa * cfg.lambda);
}

double compute_tau_adaptive(const DesignState& v_est, double beta_t,
                            const ProblemConfig& cfg, int s) {
  const double ld = v_est.logdet_ratio();
  double inner = 1.0;
  if (ld > 0.0) {
    inner = std::min(1.0, std::pow(2.0, -s) /
                              std::sqrt(32.0 * cfg.L_mu * cfg.kappa * ld));
  }
  return inner / (beta_t * beta_t);
}

SupSplitLogPolicy::SupSplitLogPolicy(const ProblemConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  S_ = cfg_.level_override > 0 ? cfg_.level_override
                               : compute_S(cfg_.T, cfg_.variant);
  alpha_ = compute_alpha(cfg_, S_);
  beta_fixed_ = compute_beta_fixed(cfg_, S_);
  const double ridge = cfg_.kappa * cfg_.lambda;
  for (int s = 1; s <= S_; ++s) {
    tau_fixed_.push_back(compute_tau_fixed(cfg_, S_, s, beta_fixed_));
    levels_.emplace_back(s, cfg_.d, ridge);
  }
}

double SupSplitLogPolicy::tau(int s) const {
  if (s < 1 || s > S_) throw std::invalid_argument("tau: bad level");
  if (cfg_.variant == Variant::Fixed) return tau_fixed_[s - 1];
  const LevelState& lvl = levels_[s - 1];
  const double beta_t = compute_beta_adaptive(lvl.v_pilot, cfg_, S_);
  return compute_tau_adaptive(lvl.v_est, beta_t, cfg_, s);
}

void SupSplitLogPolicy::rebuild_estimation_cache(LevelState& lvl) {
  lvl.grad_partial.setZero();
  lvl.hess_partial.setZero();
  for (const Sample& s : lvl.estimation_samples) {
    const double z = s.x.dot(lvl.theta_bar);
    lvl.grad_partial.noalias() += (s.r - mu(z)) * s.x;
    lvl.hess_partial.selfadjointView<Eigen::Lower>().rankUpdate(s.x, dmu(z));
  }
  lvl.hess_partial.triangularView<Eigen::StrictlyUpper>() =
      lvl.hess_partial.transpose().triangularView<Eigen::StrictlyUpper>();
}

void SupSplitLogPolicy::refresh_estimators(LevelState& lvl) {
  if (lvl.pilot_dirty) {
    FitOptions opts;
    opts.dim = cfg_.d;
    opts.steps = cfg_.fit_steps;
    opts.learning_rate = cfg_.fit_lr;
    opts.radius = cfg_.B;
    opts.reg = cfg_.lambda;
    opts.warm_start = lvl.theta_bar;
    lvl.theta_bar = fit_pilot(lvl.pilot_samples, opts);
    rebuild_estimation_cache(lvl);
    lvl.pilot_dirty = false;
    lvl.est_dirty = true;
  }
  if (lvl.est_dirty) {
    Eigen::MatrixXd h = lvl.hess_partial;
    h.diagonal().array() += cfg_.lambda;
    const Eigen::VectorXd g = lvl.grad_partial - cfg_.lambda * lvl.theta_bar;
    lvl.theta_hat = lvl.theta_bar + h.llt().solve(g);
    lvl.est_dirty = false;
  }
}

PolicyDecision SupSplitLogPolicy::choose(const Eigen::MatrixXd& contexts) {
  if (contexts.rows() != cfg_.K || contexts.cols() != cfg_.d)
    throw std::invalid_argument("choose: contexts must be K x d");
  ++round_;
  walk_stats_.clear();

  std::vector<int> surviving(cfg_.K);
  for (int a = 0; a < cfg_.K; ++a) surviving[a] = a;
  const double exploit_width = 1.0 / std::sqrt(static_cast<double>(cfg_.T));

  for (int s = 1; s <= S_; ++s) {
    LevelState& lvl = levels_[s - 1];
    refresh_estimators(lvl);

    std::vector<double> means(surviving.size()), widths(surviving.size());
    int widest = 0, best = 0;
    for (std::size_t i = 0; i < surviving.size(); ++i) {
      const Eigen::VectorXd x = contexts.row(surviving[i]).transpose();
      means[i] = x.dot(lvl.theta_hat);
      widths[i] = cfg_.width_scale * alpha_ *
                  std::sqrt(lvl.v_est.mahalanobis_sq(x));
      if (widths[i] > widths[widest]) widest = static_cast<int>(i);
      if (means[i] > means[best]) best = static_cast<int>(i);
      if (record_stats_)
        walk_stats_.push_back({s, surviving[i], means[i], widths[i]});
    }

    if (widths[widest] > std::pow(2.0, -s)) {  // condition (a)
      const int a = surviving[widest];
      const Eigen::VectorXd x = contexts.row(a).transpose();
      const Branch branch = lvl.v_pilot.mahalanobis_sq(x) > cfg_.tau_scale * tau(s)
                                ? Branch::ExploreToPilot
                                : Branch::ExploreToEstimation;
      return {a, s, branch, widths[widest], means[widest]};
    }

    const bool all_small = std::all_of(widths.begin(), widths.end(),
                                       [&](double w) { return w <= exploit_width; });
    if (all_small)  // condition (b)
      return {surviving[best], s, Branch::Exploit, widths[best], means[best]};

    if (s == S_)  // level walk exhausted; exploit over the survivors
      return {surviving[best], s, Branch::ExploitCapped, widths[best], means[best]};

    // condition (c): keep arms within 2*2^-s of the best mean
    const double cutoff = means[best] - 2.0 * std::pow(2.0, -s);
    std::vector<int> next;
    for (std::size_t i = 0; i < surviving.size(); ++i)
      if (means[i] >= cutoff) next.push_back(surviving[i]);
    surviving = std::move(next);
  }
  throw std::logic_error("choose: unreachable");
}

void SupSplitLogPolicy::record_reward(const PolicyDecision& decision,
                                      const Sample& sample) {
  if (decision.branch != Branch::ExploreToPilot &&
      decision.branch != Branch::ExploreToEstimation)
    throw std::invalid_argument(
        "record_reward: exploit rounds update no bucket");
  LevelState& lvl = levels_[decision.level - 1];
  lvl.bucket_rounds.push_back(sample.t);
  if (decision.branch == Branch::ExploreToPilot) {
    lvl.pilot_samples.push_back(sample);
    lvl.v_pilot.insert(sample.x);
    lvl.pilot_dirty = true;
  } else {
    lvl.estimation_samples.push_back(sample);
    lvl.v_est.insert(sample.x);
    // Fold into the partial sums at the current theta_bar.
    const double z = sample.x.dot(lvl.theta_bar);
    lvl.grad_partial.noalias() += (sample.r - mu(z)) * sample.x;
    lvl.hess_partial.selfadjointView<Eigen::Lower>().rankUpdate(sample.x,
                                                                dmu(z));
    lvl.hess_partial.triangularView<Eigen::StrictlyUpper>() =
        lvl.hess_partial.transpose().triangularView<Eigen::StrictlyUpper>();
    lvl.est_dirty = true;
  }
}

void SupSplitLogPolicy::observe(const PolicyDecision& decision,
                                const Eigen::MatrixXd& contexts,
                                double reward) {
  if (decision.branch == Branch::Exploit ||
      decision.branch == Branch::ExploitCapped)
    return;
  Sample s;
  s.x = contexts.row(decision.action).transpose();
  s.r = reward;
  s.t = round_;
  record_reward(decision, s);
}

std::vector<std::string> SupSplitLogPolicy::audit_violations() const {
  std::vector<std::string> out;
  const double dlog =
      cfg_.d * std::log(1.0 + cfg_.T / (cfg_.kappa * cfg_.lambda * cfg_.d));
  for (int s = 1; s <= S_; ++s) {
    const LevelState& lvl = levels_[s - 1];
    const std::string tag = "level " + std::to_string(s) + ": ";

    std::set<long> pilot_idx, est_idx;
    for (const Sample& smp : lvl.pilot_samples) pilot_idx.insert(smp.t);
    for (const Sample& smp : lvl.estimation_samples) est_idx.insert(smp.t);
    std::set<long> bucket_idx(lvl.bucket_rounds.begin(),
                              lvl.bucket_rounds.end());
    std::set<long> both;
    std::set_intersection(pilot_idx.begin(), pilot_idx.end(), est_idx.begin(),
                          est_idx.end(), std::inserter(both, both.begin()));
    if (!both.empty()) out.push_back(tag + "pilot/estimation sets overlap");
    std::set<long> unioned = pilot_idx;
    unioned.insert(est_idx.begin(), est_idx.end());
    if (unioned != bucket_idx)
      out.push_back(tag + "pilot+estimation does not cover the bucket");

    // Pilot cardinality. The fixed-form threshold lower-bounds the adaptive
    // one, so this bound is valid for both variants.
    const double tau_s = tau_fixed_[s - 1];
    const double pilot_cap = 2.0 * dlog / tau_s;
    if (static_cast<double>(lvl.pilot_samples.size()) > pilot_cap)
      out.push_back(tag + "pilot cardinality bound violated: " +
                    std::to_string(lvl.pilot_samples.size()) + " > " +
                    std::to_string(pilot_cap));

    const double est_cap = 2.0 * alpha_ * alpha_ * std::pow(4.0, s) * dlog;
    if (static_cast<double>(lvl.estimation_samples.size()) > est_cap)
      out.push_back(tag + "estimation cardinality bound violated: " +
                    std::to_string(lvl.estimation_samples.size()) + " > " +
                    std::to_string(est_cap));
  }
  return out;
}

}  // namespace splitlog
