#include "splitlog/logistic.hpp"

#include <cmath>
#include <stdexcept>

namespace splitlog {

double mu(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double dmu(double z) {
  const double m = mu(z);
  return m * (1.0 - m);
}

Eigen::VectorXd fit_pilot(const std::vector<Sample>& samples,
                          const FitOptions& opts) {
  if (opts.dim < 1) throw std::invalid_argument("fit_pilot: dim must be >= 1");
  if (opts.steps < 1 || opts.learning_rate <= 0 || opts.radius <= 0 ||
      opts.reg <= 0)
    throw std::invalid_argument("fit_pilot: invalid options");

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(opts.dim);
  if (opts.warm_start) {
    if (opts.warm_start->size() != opts.dim)
      throw std::invalid_argument("fit_pilot: warm start dimension mismatch");
    theta = *opts.warm_start;
  }
  const double norm0 = theta.norm();
  if (norm0 > opts.radius) theta *= opts.radius / norm0;

  for (int step = 0; step < opts.steps; ++step) {
    Eigen::VectorXd grad = opts.reg * theta;
    for (const Sample& s : samples)
      grad.noalias() += (mu(s.x.dot(theta)) - s.r) * s.x;
    theta.noalias() -= opts.learning_rate * grad;
    const double norm = theta.norm();
    if (norm > opts.radius) theta *= opts.radius / norm;
  }
  return theta;
}

Eigen::VectorXd level_gradient(const Eigen::VectorXd& theta,
                               const std::vector<Sample>& samples,
                               double reg) {
  Eigen::VectorXd g = -reg * theta;
  for (const Sample& s : samples) {
    if (s.x.size() != theta.size())
      throw std::invalid_argument("level_gradient: dimension mismatch");
    g.noalias() += (s.r - mu(s.x.dot(theta))) * s.x;
  }
  return g;
}

Eigen::MatrixXd level_hessian(const Eigen::VectorXd& theta,
                              const std::vector<Sample>& samples, double reg) {
  const int d = static_cast<int>(theta.size());
  Eigen::MatrixXd h = reg * Eigen::MatrixXd::Identity(d, d);
  for (const Sample& s : samples) {
    if (s.x.size() != d)
      throw std::invalid_argument("level_hessian: dimension mismatch");
    h.selfadjointView<Eigen::Lower>().rankUpdate(s.x,
                                                 dmu(s.x.dot(theta)));
  }
  h.triangularView<Eigen::StrictlyUpper>() =
      h.transpose().triangularView<Eigen::StrictlyUpper>();
  return h;
}

Eigen::VectorXd one_step_correct(const Eigen::VectorXd& theta_bar,
                                 const std::vector<Sample>& samples,
                                 double reg) {
  const Eigen::VectorXd g = level_gradient(theta_bar, samples, reg);
  const Eigen::MatrixXd h = level_hessian(theta_bar, samples, reg);
  return theta_bar + h.llt().solve(g);
}

}  // namespace splitlog
