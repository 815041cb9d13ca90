#include "splitlog/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "splitlog/baselines.hpp"
#include "splitlog/design_state.hpp"
#include "splitlog/rng.hpp"
#include "splitlog/supsplitlog.hpp"

namespace splitlog {
namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::string to_string(Algo a) {
  switch (a) {
    case Algo::SupSplitLog: return "supsplitlog";
    case Algo::SupSplitLogDD: return "supsplitlog-dd";
    case Algo::SupCbGlm: return "supcb-glm";
    case Algo::SupLogistic: return "suplogistic";
    case Algo::DdrtsGlm: return "ddrts-glm";
  }
  throw std::logic_error("unknown algo");
}

Algo algo_from_string(const std::string& s) {
  if (s == "supsplitlog") return Algo::SupSplitLog;
  if (s == "supsplitlog-dd") return Algo::SupSplitLogDD;
  if (s == "supcb-glm") return Algo::SupCbGlm;
  if (s == "suplogistic") return Algo::SupLogistic;
  if (s == "ddrts-glm") return Algo::DdrtsGlm;
  throw std::invalid_argument("unknown algo: " + s);
}

void ExperimentSpec::validate() const {
  problem.validate();
  if (seeds.empty()) throw std::invalid_argument("at least one seed required");
}

std::unique_ptr<Policy> make_policy(Algo algo, const ProblemConfig& cfg,
                                    std::uint64_t seed) {
  ProblemConfig pc = cfg;
  switch (algo) {
    case Algo::SupSplitLog:
      pc.variant = Variant::Fixed;
      return std::make_unique<SupSplitLogPolicy>(pc);
    case Algo::SupSplitLogDD:
      pc.variant = Variant::DataDependent;
      return std::make_unique<SupSplitLogPolicy>(pc);
    case Algo::SupCbGlm: {
      BaselineConfig bc;
      bc.problem = pc;
      bc.fit_steps = pc.fit_steps;
      bc.fit_lr = pc.fit_lr;
      return std::make_unique<SupCbGlmPolicy>(bc, seed);
    }
    case Algo::SupLogistic: {
      BaselineConfig bc;
      bc.problem = pc;
      bc.fit_steps = pc.fit_steps;
      bc.fit_lr = pc.fit_lr;
      return std::make_unique<SupLogisticPolicy>(bc, seed);
    }
    case Algo::DdrtsGlm: {
      BaselineConfig bc;
      bc.problem = pc;
      bc.fit_steps = pc.fit_steps;
      bc.fit_lr = pc.fit_lr;
      return std::make_unique<DdrtsGlmPolicy>(bc, seed);
    }
  }
  throw std::logic_error("unknown algo");
}

RunRecord run_single(const ExperimentSpec& spec, std::uint64_t seed) {
  const ProblemConfig& cfg = spec.problem;
  const EnvironmentInstance env = generate_instance(cfg, spec.regime, seed);
  auto policy = make_policy(spec.algo, cfg, seed);
  auto reward_rng = make_rng(seed, Stream::Reward);

  const double ridge = cfg.kappa * cfg.lambda;
  DesignState v_all(cfg.d, ridge);
  DesignState v_chosen(cfg.d, ridge);

  RunRecord rec;
  rec.summary.seed = seed;
  double cum = 0.0;
  for (int t = 0; t < cfg.T; ++t) {
    const Eigen::MatrixXd& ctx = env.contexts[t];
    const PolicyDecision dec = policy->choose(ctx);
    const int r = sample_reward(env, t, dec.action, reward_rng);
    policy->observe(dec, ctx, r);

    const double dlt = instant_regret(env, t, dec.action);
    cum += dlt;
    for (int a = 0; a < cfg.K; ++a) v_all.insert(ctx.row(a).transpose());
    v_chosen.insert(ctx.row(dec.action).transpose());

    rec.actions.push_back(dec.action);
    rec.levels.push_back(dec.level);
    rec.branches.push_back(dec.branch);
    rec.inst_regret.push_back(dlt);
    rec.cum_regret.push_back(cum);
    rec.logdet_all.push_back(v_all.logdet_ratio());
    rec.logdet_chosen.push_back(v_chosen.logdet_ratio());
    rec.noise.push_back(r - mu(ctx.row(dec.action).dot(env.theta_star)));
    ++rec.summary.branch_counts[splitlog::to_string(dec.branch)];
  }
  rec.summary.final_regret = cum;

  if (auto* ssl = dynamic_cast<SupSplitLogPolicy*>(policy.get())) {
    for (const LevelState& lvl : ssl->levels()) {
      rec.summary.pilot_sizes.push_back(
          static_cast<long>(lvl.pilot_samples.size()));
      rec.summary.estimation_sizes.push_back(
          static_cast<long>(lvl.estimation_samples.size()));
    }
  }
  if (spec.audit) {
    rec.summary.audit_violations = policy->audit_violations();
    const double dlog =
        cfg.d * std::log(1.0 + cfg.T / (cfg.kappa * cfg.lambda * cfg.d));
    if (v_chosen.logdet_ratio() > dlog + 1e-9)
      rec.summary.audit_violations.push_back(
          "logdet_ratio(V_T) exceeds d*log(1+T/(kappa*lambda*d))");
  }
  return rec;
}

AggregateResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<RunRecord> records(spec.seeds.size());
  if (spec.parallel && spec.seeds.size() > 1) {
    std::vector<std::future<RunRecord>> futs;
    futs.reserve(spec.seeds.size());
    for (std::uint64_t seed : spec.seeds)
      futs.push_back(std::async(std::launch::async,
                                [&spec, seed] { return run_single(spec, seed); }));
    for (std::size_t i = 0; i < futs.size(); ++i) records[i] = futs[i].get();
  } else {
    for (std::size_t i = 0; i < spec.seeds.size(); ++i)
      records[i] = run_single(spec, spec.seeds[i]);
  }

  AggregateResult agg;
  agg.spec = spec;
  const int T = spec.problem.T;
  const double n = static_cast<double>(records.size());
  agg.regret_mean.resize(T);
  agg.regret_std.resize(T);
  agg.logdet_all_mean.resize(T);
  agg.logdet_chosen_mean.resize(T);
  for (int t = 0; t < T; ++t) {
    double m = 0.0, m2 = 0.0, la = 0.0, lc = 0.0;
    for (const RunRecord& r : records) {
      m += r.cum_regret[t];
      la += r.logdet_all[t];
      lc += r.logdet_chosen[t];
    }
    m /= n;
    la /= n;
    lc /= n;
    for (const RunRecord& r : records) {
      const double dev = r.cum_regret[t] - m;
      m2 += dev * dev;
    }
    agg.regret_mean[t] = m;
    agg.regret_std[t] = std::sqrt(m2 / n);
    agg.logdet_all_mean[t] = la;
    agg.logdet_chosen_mean[t] = lc;
  }
  for (const RunRecord& r : records) {
    agg.seeds.push_back(r.summary);
    if (!r.summary.audit_violations.empty()) agg.audit_clean = false;
  }
  return agg;
}

std::string render_csv(const AggregateResult& result) {
  std::string out =
      "t,regret_mean,regret_std,logdet_all_arms_mean,logdet_chosen_mean\n";
  for (std::size_t t = 0; t < result.regret_mean.size(); ++t) {
    out += std::to_string(t + 1);
    out += ',';
    out += fmt17(result.regret_mean[t]);
    out += ',';
    out += fmt17(result.regret_std[t]);
    out += ',';
    out += fmt17(result.logdet_all_mean[t]);
    out += ',';
    out += fmt17(result.logdet_chosen_mean[t]);
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::json summary_to_json(const SeedSummary& s) {
  nlohmann::json j;
  j["seed"] = s.seed;
  j["final_regret"] = s.final_regret;
  j["pilot_sizes"] = s.pilot_sizes;
  j["estimation_sizes"] = s.estimation_sizes;
  j["branch_counts"] = s.branch_counts;
  j["audit_violations"] = s.audit_violations;
  return j;
}

SeedSummary summary_from_json(const nlohmann::json& j) {
  SeedSummary s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.final_regret = j.at("final_regret").get<double>();
  s.pilot_sizes = j.at("pilot_sizes").get<std::vector<long>>();
  s.estimation_sizes = j.at("estimation_sizes").get<std::vector<long>>();
  s.branch_counts = j.at("branch_counts").get<std::map<std::string, long>>();
  s.audit_violations =
      j.at("audit_violations").get<std::vector<std::string>>();
  return s;
}

}  // namespace

std::string render_json(const AggregateResult& result) {
  nlohmann::json j;
  j["algo"] = to_string(result.spec.algo);
  j["regime"] = to_string(result.spec.regime);
  j["seeds_used"] = result.spec.seeds;
  j["audit"] = result.spec.audit;
  j["audit_clean"] = result.audit_clean;
  nlohmann::json p;
  p["d"] = result.spec.problem.d;
  p["T"] = result.spec.problem.T;
  p["K"] = result.spec.problem.K;
  p["B"] = result.spec.problem.B;
  p["kappa"] = result.spec.problem.kappa;
  p["lambda"] = result.spec.problem.lambda;
  p["delta"] = result.spec.problem.delta;
  j["problem"] = p;
  j["regret_mean"] = result.regret_mean;
  j["regret_std"] = result.regret_std;
  j["logdet_all_arms_mean"] = result.logdet_all_mean;
  j["logdet_chosen_mean"] = result.logdet_chosen_mean;
  nlohmann::json per_seed = nlohmann::json::array();
  for (const SeedSummary& s : result.seeds) per_seed.push_back(summary_to_json(s));
  j["per_seed"] = per_seed;
  return j.dump(2);
}

AggregateResult aggregate_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  AggregateResult r;
  r.spec.algo = algo_from_string(j.at("algo"));
  r.spec.regime = regime_from_string(j.at("regime"));
  r.spec.seeds = j.at("seeds_used").get<std::vector<std::uint64_t>>();
  r.spec.audit = j.at("audit").get<bool>();
  r.audit_clean = j.at("audit_clean").get<bool>();
  const nlohmann::json& p = j.at("problem");
  r.spec.problem.d = p.at("d").get<int>();
  r.spec.problem.T = p.at("T").get<int>();
  r.spec.problem.K = p.at("K").get<int>();
  r.spec.problem.B = p.at("B").get<double>();
  r.spec.problem.kappa = p.at("kappa").get<double>();
  r.spec.problem.lambda = p.at("lambda").get<double>();
  r.spec.problem.delta = p.at("delta").get<double>();
  r.regret_mean = j.at("regret_mean").get<std::vector<double>>();
  r.regret_std = j.at("regret_std").get<std::vector<double>>();
  r.logdet_all_mean =
      j.at("logdet_all_arms_mean").get<std::vector<double>>();
  r.logdet_chosen_mean = j.at("logdet_chosen_mean").get<std::vector<double>>();
  for (const nlohmann::json& s : j.at("per_seed"))
    r.seeds.push_back(summary_from_json(s));
  return r;
}

void emit_results(const AggregateResult& result, const std::string& path,
                  OutputFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output path: " + path);
  out << (format == OutputFormat::Csv ? render_csv(result)
                                      : render_json(result));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace splitlog
