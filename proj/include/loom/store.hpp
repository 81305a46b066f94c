#pragma once

#include "loom/domain.hpp"
#include "loom/orchestrator.hpp"
#include "loom/reward.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace loom {

using json = nlohmann::ordered_json;

constexpr int store_schema_version = 1;

// Self-contained persisted rollout: the problem snapshot and configuration
// travel with the trajectory so rewards and prompts are recomputable offline.
struct trajectory_record {
    int                                schema_version = store_schema_version;
    problem                            prob;
    trajectory                         traj;
    budget_config                      budget;
    reward_spec                        rspec;
    std::string                        template_version = "v1";
    std::map<std::string, std::string> provider_meta;
    std::vector<run_diagnostic>        diagnostics;
};

json              record_to_json(const trajectory_record & rec);
trajectory_record record_from_json(const json & j);

class io_error : public std::runtime_error {
  public:
    explicit io_error(const std::string & what) : std::runtime_error(what) {}
};

// Appends one record as a single JSONL line (write + flush per call).
void append_trajectory(const std::string & path, const trajectory_record & rec);

struct read_result {
    std::vector<trajectory_record> records;
    std::vector<parse_diagnostic>  diagnostics;  // quarantined / skipped lines
};

// Reads a JSONL file; a truncated or malformed trailing line is quarantined
// to <path>.quarantine instead of failing the read; lines with an unknown
// schema_version are skipped with a diagnostic.
read_result read_trajectories(const std::string & path);

struct rft_sample {
    std::string problem_id;
    std::string rollout_id;
    int         round = 0;
    std::string prompt;  // summarize prompt as the policy saw it
    std::string target;  // the summarizer output for that round
};

// Cold-start filter: keeps only rounds whose summarizer output re-parses to at
// least one lemma against the replayed library state. Output sorted by
// (problem, rollout, round).
std::vector<rft_sample> export_rft(const std::vector<trajectory_record> & records,
                                   const prompt_template_set & templates = prompt_template_set::builtin());

struct qa_sample {
    std::string problem_id;
    std::string rollout_id;
    std::string prompt;  // the bare problem statement
    std::string target;  // final solution, no intermediate thinking
};

// Question-answer pairs from rollouts whose final answer was judged correct.
std::vector<qa_sample> export_qa(const std::vector<trajectory_record> & records);

struct rl_sample {
    std::string problem_id;
    std::string rollout_id;
    int         round = 0;
    std::string prompt;  // search prompt at that round's library state
    std::string target;  // the reasoner output
    double      advantage = 0.0;
    bool        masked = false;
    double      final_reward = 0.0;
};

struct rl_export_result {
    std::vector<rl_sample>        samples;
    std::map<std::string, double> pass_rates;      // every problem seen
    std::vector<std::string>      dropped_groups;  // pass rate exactly 0 or 1
};

// Groups records by problem, drops groups with pass rate 0 or 1, and
// annotates the survivors with per-round advantages from the dependency
// graph of their own group. Correctness falls back to final_reward > 0 when
// outcome_correct is unset.
rl_export_result export_rl_batch(const std::vector<trajectory_record> & records, double gamma = 1.0,
                                 const prompt_template_set & templates = prompt_template_set::builtin());

json rft_sample_to_json(const rft_sample & s);
json qa_sample_to_json(const qa_sample & s);
json rl_sample_to_json(const rl_sample & s);

} // namespace loom
