#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace splitlog {

struct Sample {
  Eigen::VectorXd x;  // feature, ||x|| <= 1
  double r = 0.0;     // reward in {0,1}
  long t = 0;         // round index
};

struct FitOptions {
  int dim = 1;
  int steps = 20;
  double learning_rate = 0.3;
  double radius = 1.0;  // B
  double reg = 1.0;     // lambda
  std::optional<Eigen::VectorXd> warm_start;
};

// Logistic link and its derivative, numerically saturating at the extremes.
double mu(double z);
double dmu(double z);

// Projected gradient descent on the ridge-regularized logistic loss
//   sum_i [-r_i log mu(x_i'th) - (1-r_i) log(1-mu(x_i'th))] + (reg/2)||th||^2
// with radial projection onto the radius-ball after each step.
Eigen::VectorXd fit_pilot(const std::vector<Sample>& samples,
                          const FitOptions& opts);

// g(th) = sum_i (r_i - mu(x_i'th)) x_i - reg*th
Eigen::VectorXd level_gradient(const Eigen::VectorXd& theta,
                               const std::vector<Sample>& samples, double reg);

// H(th) = reg*I + sum_i dmu(x_i'th) x_i x_i'
Eigen::MatrixXd level_hessian(const Eigen::VectorXd& theta,
                              const std::vector<Sample>& samples, double reg);

// Single Newton step th_hat = th_bar + H(th_bar)^{-1} g(th_bar), unprojected.
Eigen::VectorXd one_step_correct(const Eigen::VectorXd& theta_bar,
                                 const std::vector<Sample>& samples,
                                 double reg);

}  // namespace splitlog
