#include "splitlog/design_state.hpp"

#include <cmath>
#include <stdexcept>

namespace splitlog {

DesignState::DesignState(int dim, double ridge) : dim_(dim), ridge_(ridge) {
  if (dim < 1) throw std::invalid_argument("DesignState: dim must be >= 1");
  if (ridge <= 0)
    throw std::invalid_argument("DesignState: ridge must be positive");
  matrix_ = Eigen::MatrixXd::Identity(dim, dim) * ridge;
  inverse_ = Eigen::MatrixXd::Identity(dim, dim) / ridge;
}

void DesignState::insert(const Eigen::VectorXd& x) {
  if (x.size() != dim_)
    throw std::invalid_argument("DesignState::insert: dimension mismatch");
  matrix_.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0);
  matrix_.triangularView<Eigen::StrictlyUpper>() =
      matrix_.transpose().triangularView<Eigen::StrictlyUpper>();
  const Eigen::VectorXd v = inverse_ * x;
  const double q = x.dot(v);
  inverse_.noalias() -= (v * v.transpose()) / (1.0 + q);
  logdet_ratio_ += std::log1p(q);
  ++count_;
  if (count_ % kRefreshPeriod == 0) refresh_inverse();
}

double DesignState::mahalanobis_sq(const Eigen::VectorXd& x) const {
  if (x.size() != dim_)
    throw std::invalid_argument(
        "DesignState::mahalanobis_sq: dimension mismatch");
  return x.dot(inverse_ * x);
}

void DesignState::refresh_inverse() {
  inverse_ = matrix_.llt().solve(Eigen::MatrixXd::Identity(dim_, dim_));
  // Symmetrize; the solve is exact only up to rounding.
  inverse_ = ((inverse_ + inverse_.transpose()) / 2.0).eval();
}

}  // namespace splitlog
