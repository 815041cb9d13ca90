#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace splitlog {

enum class Branch { ExploreToPilot, ExploreToEstimation, Exploit, ExploitCapped };

inline std::string to_string(Branch b) {
  switch (b) {
    case Branch::ExploreToPilot: return "explore_pilot";
    case Branch::ExploreToEstimation: return "explore_estimation";
    case Branch::Exploit: return "exploit";
    case Branch::ExploitCapped: return "exploit_capped";
  }
  return "?";
}

struct PolicyDecision {
  int action = 0;
  int level = 1;
  Branch branch = Branch::Exploit;
  double width = 0.0;
  double mean = 0.0;
};

// Common surface the harness drives: one decision per round, then the
// realized reward fed back together with the round's contexts (K x d).
class Policy {
 public:
  virtual ~Policy() = default;
  virtual PolicyDecision choose(const Eigen::MatrixXd& contexts) = 0;
  virtual void observe(const PolicyDecision& decision,
                       const Eigen::MatrixXd& contexts, double reward) = 0;
  // Deterministic invariant checks after a run; empty means clean.
  virtual std::vector<std::string> audit_violations() const { return {}; }
};

}  // namespace splitlog
