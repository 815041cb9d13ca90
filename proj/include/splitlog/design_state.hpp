#pragma once

#include <Eigen/Dense>

namespace splitlog {

// Regularized Gram matrix V = ridge*I + sum x x^T with a maintained inverse
// (Sherman-Morrison) and incremental log det(V) - log det(ridge*I).
//
// The inverse is re-derived from a dense solve every kRefreshPeriod
// insertions to bound floating-point drift.
class DesignState {
 public:
  DesignState(int dim, double ridge);

  void insert(const Eigen::VectorXd& x);
  double mahalanobis_sq(const Eigen::VectorXd& x) const;

  double logdet_ratio() const { return logdet_ratio_; }
  int dim() const { return dim_; }
  double ridge() const { return ridge_; }
  long count() const { return count_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::MatrixXd& inverse() const { return inverse_; }

 private:
  static constexpr long kRefreshPeriod = 256;

  void refresh_inverse();

  int dim_;
  double ridge_;
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd inverse_;
  double logdet_ratio_ = 0.0;
  long count_ = 0;
};

}  // namespace splitlog
