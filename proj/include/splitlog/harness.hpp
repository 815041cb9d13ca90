#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "splitlog/config.hpp"
#include "splitlog/environment.hpp"
#include "splitlog/policy.hpp"

namespace splitlog {

enum class Algo { SupSplitLog, SupSplitLogDD, SupCbGlm, SupLogistic, DdrtsGlm };
enum class OutputFormat { Csv, Json };

std::string to_string(Algo a);
Algo algo_from_string(const std::string& s);

struct ExperimentSpec {
  Algo algo = Algo::SupSplitLogDD;
  ProblemConfig problem;
  Regime regime = Regime::Middle;
  std::vector<std::uint64_t> seeds;  // default: 10 consecutive from 1
  std::string out_path;              // empty: no file emitted
  OutputFormat format = OutputFormat::Csv;
  bool audit = false;
  bool parallel = true;

  void validate() const;
};

struct SeedSummary {
  std::uint64_t seed = 0;
  double final_regret = 0.0;
  std::vector<long> pilot_sizes;       // per level; empty for baselines
  std::vector<long> estimation_sizes;  // per level; empty for baselines
  std::map<std::string, long> branch_counts;
  std::vector<std::string> audit_violations;
};

struct RunRecord {
  std::vector<int> actions;
  std::vector<int> levels;
  std::vector<Branch> branches;
  std::vector<double> inst_regret;
  std::vector<double> cum_regret;
  std::vector<double> logdet_all;     // all K arms inserted per round
  std::vector<double> logdet_chosen;  // chosen arms only
  std::vector<double> noise;          // r_t - mu(x' theta*)
  SeedSummary summary;
};

struct AggregateResult {
  ExperimentSpec spec;
  std::vector<double> regret_mean;
  std::vector<double> regret_std;
  std::vector<double> logdet_all_mean;
  std::vector<double> logdet_chosen_mean;
  std::vector<SeedSummary> seeds;
  bool audit_clean = true;
};

std::unique_ptr<Policy> make_policy(Algo algo, const ProblemConfig& cfg,
                                    std::uint64_t seed);

RunRecord run_single(const ExperimentSpec& spec, std::uint64_t seed);
AggregateResult run_experiment(const ExperimentSpec& spec);

std::string render_csv(const AggregateResult& result);
std::string render_json(const AggregateResult& result);
AggregateResult aggregate_from_json(const std::string& text);
void emit_results(const AggregateResult& result, const std::string& path,
                  OutputFormat format);

}  // namespace splitlog
