#include "splitlog/environment.hpp"

#include <cmath>
#include <cstring>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "splitlog/logistic.hpp"
#include "splitlog/rng.hpp"

namespace splitlog {
namespace {

// Largest |z| with dmu(z) >= 1/kappa.
double kappa_logit_bound(double kappa) {
  if (kappa < 4.0)
    throw std::invalid_argument("kappa < 4 admits no feasible instance");
  const double root = std::sqrt(1.0 - 4.0 / kappa);
  const double m = (1.0 + root) / 2.0;
  return std::log(m / (1.0 - m));
}

Eigen::VectorXd sphere_point(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

std::uint64_t fnv1a(std::uint64_t h, const double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &data[i], sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::uint64_t content_hash(const EnvironmentInstance& env) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, env.theta_star.data(), env.theta_star.size());
  for (const Eigen::MatrixXd& m : env.contexts)
    h = fnv1a(h, m.data(), static_cast<std::size_t>(m.size()));
  return h;
}

}  // namespace

RegimeSpec regime_spec(Regime regime, int d) {
  switch (regime) {
    case Regime::Low: return {std::min(2, d), 0.0, 0.05};
    case Regime::Middle: return {std::min(10, d), 0.3, 0.5};
    case Regime::High: return {d, 0.8, 1.0};
  }
  throw std::logic_error("unknown regime");
}

EnvironmentInstance generate_instance(const ProblemConfig& cfg, Regime regime,
                                      std::uint64_t seed, bool axis_aligned) {
  cfg.validate();
  const double z_cap = kappa_logit_bound(cfg.kappa);
  const RegimeSpec spec = regime_spec(regime, cfg.d);

  EnvironmentInstance env;
  env.regime = regime;
  env.effective_rank = spec.rank;
  env.norm_lo = spec.norm_lo;
  env.norm_hi = spec.norm_hi;
  env.seed = seed;
  env.axis_aligned = axis_aligned;
  env.T = cfg.T;
  env.K = cfg.K;
  env.d = cfg.d;

  auto rng = make_rng(seed, Stream::Instance);

  env.theta_star = cfg.B * sphere_point(cfg.d, rng);
  // Worst-case logit over admissible contexts is ||theta*|| * norm_hi.
  const double worst = env.theta_star.norm() * spec.norm_hi;
  if (worst > z_cap) env.theta_star *= z_cap / worst;

  if (axis_aligned) {
    env.basis = Eigen::MatrixXd::Identity(cfg.d, spec.rank);
  } else {
    Eigen::MatrixXd g(cfg.d, spec.rank);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int j = 0; j < spec.rank; ++j)
      for (int i = 0; i < cfg.d; ++i) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    env.basis = qr.householderQ() * Eigen::MatrixXd::Identity(cfg.d, spec.rank);
  }

  std::uniform_real_distribution<double> unorm(spec.norm_lo, spec.norm_hi);
  env.contexts.reserve(cfg.T);
  double max_abs_logit = 0.0;
  constexpr int kMaxRetries = 64;
  for (int t = 0; t < cfg.T; ++t) {
    Eigen::MatrixXd ctx(cfg.K, cfg.d);
    for (int a = 0; a < cfg.K; ++a) {
      Eigen::VectorXd x;
      double logit = 0.0;
      for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        x = env.basis * (unorm(rng) * sphere_point(spec.rank, rng));
        logit = x.dot(env.theta_star);
        if (std::abs(logit) <= z_cap) break;
      }
      if (std::abs(logit) > z_cap) {
        // Shrinking moves the logit toward 0, where dmu peaks.
        x *= z_cap / std::abs(logit) * (1.0 - 1e-12);
        logit = x.dot(env.theta_star);
      }
      max_abs_logit = std::max(max_abs_logit, std::abs(logit));
      ctx.row(a) = x.transpose();
    }
    env.contexts.push_back(std::move(ctx));
  }
  env.realized_kappa = 1.0 / dmu(max_abs_logit);
  return env;
}

int sample_reward(const EnvironmentInstance& env, int t, int a,
                  std::mt19937_64& rng) {
  if (t < 0 || t >= env.T || a < 0 || a >= env.K)
    throw std::invalid_argument("sample_reward: index out of range");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double mean = mu(env.contexts[t].row(a).dot(env.theta_star));
  return u(rng) < mean ? 1 : 0;
}

double instant_regret(const EnvironmentInstance& env, int t, int a) {
  if (t < 0 || t >= env.T || a < 0 || a >= env.K)
    throw std::invalid_argument("instant_regret: index out of range");
  int best = 0;
  double best_logit = env.contexts[t].row(0).dot(env.theta_star);
  for (int b = 1; b < env.K; ++b) {
    const double l = env.contexts[t].row(b).dot(env.theta_star);
    if (l > best_logit) {
      best_logit = l;
      best = b;
    }
  }
  (void)best;
  return mu(best_logit) - mu(env.contexts[t].row(a).dot(env.theta_star));
}

std::string instance_to_json(const EnvironmentInstance& env) {
  nlohmann::json j;
  j["seed"] = env.seed;
  j["regime"] = to_string(env.regime);
  j["axis_aligned"] = env.axis_aligned;
  j["T"] = env.T;
  j["K"] = env.K;
  j["d"] = env.d;
  j["effective_rank"] = env.effective_rank;
  j["norm_lo"] = env.norm_lo;
  j["norm_hi"] = env.norm_hi;
  j["realized_kappa"] = env.realized_kappa;
  j["theta_star"] = std::vector<double>(
      env.theta_star.data(), env.theta_star.data() + env.theta_star.size());
  std::vector<std::vector<double>> basis;
  for (int jcol = 0; jcol < env.basis.cols(); ++jcol)
    basis.emplace_back(env.basis.col(jcol).data(),
                       env.basis.col(jcol).data() + env.basis.rows());
  j["basis"] = basis;
  j["content_hash"] = content_hash(env);
  return j.dump(2);
}

EnvironmentInstance instance_from_json(const std::string& text,
                                       const ProblemConfig& cfg) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("T").get<int>() != cfg.T || j.at("K").get<int>() != cfg.K ||
      j.at("d").get<int>() != cfg.d)
    throw std::invalid_argument("instance_from_json: config mismatch");
  EnvironmentInstance env =
      generate_instance(cfg, regime_from_string(j.at("regime")),
                        j.at("seed").get<std::uint64_t>(),
                        j.at("axis_aligned").get<bool>());
  if (content_hash(env) != j.at("content_hash").get<std::uint64_t>())
    throw std::invalid_argument(
        "instance_from_json: regenerated contexts do not match stored hash");
  return env;
}

}  // namespace splitlog
