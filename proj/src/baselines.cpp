#include "splitlog/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "splitlog/rng.hpp"
#include "splitlog/supsplitlog.hpp"

namespace splitlog {

SupStyleBaseline::SupStyleBaseline(const BaselineConfig& cfg,
                                   std::uint64_t seed)
    : cfg_(cfg), rng_(make_rng(seed, Stream::Policy)) {
  cfg_.problem.validate();
  S_ = cfg_.problem.level_override > 0
           ? cfg_.problem.level_override
           : compute_S(cfg_.problem.T, Variant::Fixed);
  alpha_ = compute_alpha(cfg_.problem, S_);
  const double ridge = cfg_.problem.kappa * cfg_.problem.lambda;
  for (int s = 0; s < S_; ++s) levels_.emplace_back(cfg_.problem.d, ridge);
}

void SupStyleBaseline::refresh(LevelBucket& lvl) {
  if (!lvl.dirty) return;
  FitOptions opts;
  opts.dim = cfg_.problem.d;
  opts.steps = cfg_.fit_steps;
  opts.learning_rate = cfg_.fit_lr;
  opts.radius = cfg_.problem.B;
  opts.reg = cfg_.problem.lambda;
  opts.warm_start = lvl.theta;
  lvl.theta = fit_pilot(lvl.samples, opts);
  lvl.hessian_llt.compute(
      level_hessian(lvl.theta, lvl.samples, cfg_.problem.lambda));
  lvl.dirty = false;
}

PolicyDecision SupStyleBaseline::choose(const Eigen::MatrixXd& contexts) {
  if (contexts.rows() != cfg_.problem.K || contexts.cols() != cfg_.problem.d)
    throw std::invalid_argument("choose: contexts must be K x d");
  ++round_;
  const long warmup = cfg_.warmup();
  const double exploit_width =
      1.0 / std::sqrt(static_cast<double>(cfg_.problem.T));

  std::vector<int> surviving(cfg_.problem.K);
  for (int a = 0; a < cfg_.problem.K; ++a) surviving[a] = a;

  for (int s = 1; s <= S_; ++s) {
    LevelBucket& lvl = levels_[s - 1];
    if (static_cast<long>(lvl.samples.size()) < warmup) {
      std::uniform_int_distribution<int> pick(0, cfg_.problem.K - 1);
      const int a = pick(rng_);
      return {a, s, Branch::ExploreToEstimation, 0.0, 0.0};
    }
    refresh(lvl);

    std::vector<double> means(surviving.size()), widths(surviving.size());
    int widest = 0, best = 0;
    for (std::size_t i = 0; i < surviving.size(); ++i) {
      const Eigen::VectorXd x = contexts.row(surviving[i]).transpose();
      means[i] = x.dot(lvl.theta);
      widths[i] = width(lvl, x);
      if (widths[i] > widths[widest]) widest = static_cast<int>(i);
      if (means[i] > means[best]) best = static_cast<int>(i);
    }

    if (widths[widest] > std::pow(2.0, -s))
      return {surviving[widest], s, Branch::ExploreToEstimation,
              widths[widest], means[widest]};
    const bool all_small = std::all_of(
        widths.begin(), widths.end(),
        [&](double w) { return w <= exploit_width; });
    if (all_small)
      return {surviving[best], s, Branch::Exploit, widths[best], means[best]};
    if (s == S_)
      return {surviving[best], s, Branch::ExploitCapped, widths[best],
              means[best]};

    const double cutoff = means[best] - 2.0 * std::pow(2.0, -s);
    std::vector<int> next;
    for (std::size_t i = 0; i < surviving.size(); ++i)
      if (means[i] >= cutoff) next.push_back(surviving[i]);
    surviving = std::move(next);
  }
  throw std::logic_error("choose: unreachable");
}

void SupStyleBaseline::observe(const PolicyDecision& decision,
                               const Eigen::MatrixXd& contexts, double reward) {
  if (decision.branch == Branch::Exploit ||
      decision.branch == Branch::ExploitCapped)
    return;
  LevelBucket& lvl = levels_[decision.level - 1];
  const long warmup = cfg_.warmup();
  if (decision.width > 0.0 &&
      static_cast<long>(lvl.samples.size()) < warmup)
    lvl.width_add_during_warmup = true;
  Sample s;
  s.x = contexts.row(decision.action).transpose();
  s.r = reward;
  s.t = round_;
  lvl.samples.push_back(s);
  lvl.rounds.push_back(round_);
  lvl.gram.insert(s.x);
  lvl.dirty = true;
}

std::vector<std::string> SupStyleBaseline::audit_violations() const {
  std::vector<std::string> out;
  std::set<long> seen;
  for (int s = 1; s <= S_; ++s) {
    const LevelBucket& lvl = levels_[s - 1];
    for (long t : lvl.rounds) {
      if (!seen.insert(t).second)
        out.push_back("level " + std::to_string(s) +
                      ": round shared across level buckets");
    }
    if (lvl.width_add_during_warmup)
      out.push_back("level " + std::to_string(s) +
                    ": width-based sample added before warm-up completed");
  }
  return out;
}

double SupCbGlmPolicy::width(const LevelBucket& lvl,
                             const Eigen::VectorXd& x) const {
  return alpha_ * std::sqrt(lvl.gram.mahalanobis_sq(x));
}

double SupLogisticPolicy::width(const LevelBucket& lvl,
                                const Eigen::VectorXd& x) const {
  // H >= V/kappa, so alpha/sqrt(kappa) keeps the scale of the Gram width.
  const double q = x.dot(lvl.hessian_llt.solve(x));
  return alpha_ / std::sqrt(cfg_.problem.kappa) * std::sqrt(std::max(q, 0.0));
}

DdrtsGlmPolicy::DdrtsGlmPolicy(const BaselineConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      features_(cfg.problem.d, 0),
      rewards_(0),
      theta_(Eigen::VectorXd::Zero(cfg.problem.d)),
      rng_(make_rng(seed, Stream::Policy)) {
  cfg_.problem.validate();
  if (cfg_.mc_samples < 1)
    throw std::invalid_argument("mc_samples must be >= 1");
  refit();
}

void DdrtsGlmPolicy::refit() {
  const int d = cfg_.problem.d;
  const double lambda = cfg_.ddrts_reg();

  // PGD on the full collected sample; each refit runs the stated step
  // budget from scratch, mirroring the other policies' fitting routine.
  const double lr = cfg_.fit_lr;
  Eigen::VectorXd th = Eigen::VectorXd::Zero(d);
  for (int step = 0; step < cfg_.fit_steps; ++step) {
    Eigen::VectorXd grad = lambda * th;
    if (n_ > 0) {
      const Eigen::VectorXd z = features_.leftCols(n_).transpose() * th;
      Eigen::VectorXd resid(n_);
      for (long i = 0; i < n_; ++i) resid[i] = mu(z[i]) - rewards_[i];
      grad.noalias() += features_.leftCols(n_) * resid;
    }
    th.noalias() -= lr * grad;
    const double norm = th.norm();
    if (norm > cfg_.problem.B) th *= cfg_.problem.B / norm;
  }
  theta_ = th;

  Eigen::MatrixXd h = lambda * Eigen::MatrixXd::Identity(d, d);
  if (n_ > 0) {
    const Eigen::VectorXd z = features_.leftCols(n_).transpose() * theta_;
    Eigen::VectorXd w(n_);
    for (long i = 0; i < n_; ++i) w[i] = dmu(z[i]);
    h.noalias() +=
        features_.leftCols(n_) * w.asDiagonal() *
        features_.leftCols(n_).transpose();
  }
  // Symmetric square root of H^{-1}.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  cov_sqrt_ = eig.eigenvectors() *
              eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
              eig.eigenvectors().transpose();
}

PolicyDecision DdrtsGlmPolicy::choose(const Eigen::MatrixXd& contexts) {
  if (contexts.rows() != cfg_.problem.K || contexts.cols() != cfg_.problem.d)
    throw std::invalid_argument("choose: contexts must be K x d");
  ++round_;

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<int> wins(cfg_.problem.K, 0);
  for (int m = 0; m < cfg_.mc_samples; ++m) {
    Eigen::VectorXd z(cfg_.problem.d);
    for (int i = 0; i < cfg_.problem.d; ++i)
      z[i] = degenerate_ ? 0.0 : gauss(rng_);
    const Eigen::VectorXd sampled = theta_ + cov_sqrt_ * z;
    int best = 0;
    double best_val = contexts.row(0).dot(sampled);
    for (int a = 1; a < cfg_.problem.K; ++a) {
      const double v = contexts.row(a).dot(sampled);
      if (v > best_val) {
        best_val = v;
        best = a;
      }
    }
    ++wins[best];
  }
  int action = 0;
  for (int a = 1; a < cfg_.problem.K; ++a)
    if (wins[a] > wins[action]) action = a;
  return {action, 1, Branch::Exploit, 0.0, contexts.row(action).dot(theta_)};
}

void DdrtsGlmPolicy::observe(const PolicyDecision& decision,
                             const Eigen::MatrixXd& contexts, double reward) {
  if (n_ == features_.cols()) {
    const long cap = std::max<long>(64, 2 * features_.cols());
    features_.conservativeResize(Eigen::NoChange, cap);
    rewards_.conservativeResize(cap);
  }
  features_.col(n_) = contexts.row(decision.action).transpose();
  rewards_[n_] = reward;
  ++n_;
  refit();
}

}  // namespace splitlog
