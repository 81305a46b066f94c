#pragma once

#include "loom/domain.hpp"
#include "loom/protocol.hpp"
#include "loom/provider.hpp"
#include "loom/reward.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace loom {

enum class run_phase {
    exploring,
    refining,
    done,
};

const char * run_phase_name(run_phase p);

// One prompt/response exchange, for the structured run log.
struct run_event {
    int         round = 0;  // 0 = outside the exploration loop
    std::string role;
    int         sample_count = 1;
    token_usage usage;
    std::string note;
};

struct run_diagnostic {
    int              round = 0;
    std::string      stage;  // "search" | "summarize" | "verify" | "refine"
    parse_diagnostic diag;
};

// Mutable per-rollout state; one logical thread owns it.
struct run_state {
    problem                      prob;
    lemma_library                library;
    std::vector<reasoning_round> rounds;
    run_phase                    phase = run_phase::exploring;
    budget_config                budget;
    uint64_t                     seed = 0;
    std::string                  rollout_id = "r000";

    std::string pending_solution;  // reasoner text picked for refinement
    std::string pending_answer;    // boxed answer from a complete verdict

    std::vector<run_event>      events;
    std::vector<run_diagnostic> diagnostics;
};

struct refine_result {
    std::string                  final_solution;
    int                          pv_passes = 0;  // of the last vote
    int                          pv_trials = 0;
    std::vector<refinement_step> log;
    bool                         budget_exhausted = false;
    bool                         improver_gave_up = false;
};

struct rollout_result {
    trajectory                  traj;
    std::vector<run_event>      events;
    std::vector<run_diagnostic> diagnostics;
};

// Provider failure mid-rollout; carries whatever was completed.
class run_aborted : public std::runtime_error {
  public:
    run_aborted(const std::string & what, trajectory partial)
        : std::runtime_error(what), partial(std::move(partial)) {}
    trajectory partial;
};

// The multi-round loop: search -> summarize -> verify/admit, then the
// verify-and-improve refinement of the final solution. Immutable after
// construction; safe to run many rollouts concurrently on one instance.
class orchestrator {
  public:
    orchestrator(completion_provider & provider, budget_config budget = {}, reward_spec rspec = {},
                 const prompt_template_set & templates = prompt_template_set::builtin(),
                 retry_policy retries = {});

    // One exploration round: prompts the reasoner (library in context) and the
    // summarizer, verifies every candidate with n votes, admits those above
    // the confidence threshold. A complete verdict moves the phase to refining.
    reasoning_round run_round(run_state & state);

    // n parallel verify prompts; confidence = passes / n, exact.
    ratio verify_lemma(const lemma & l, const lemma_library & lib, const problem & p, run_state & state);

    // Vote-and-improve loop, at most max_refinement_rounds votes. Stops on a
    // unanimous pass or when the improver reports nothing left to improve.
    refine_result refine_solution(const std::string & solution, const problem & p, run_state & state);

    // Full rollout: explore until a complete verdict or round budget, refine,
    // score. Provider errors raise run_aborted with the partial trajectory.
    rollout_result run_rollout(const problem & p, const std::string & rollout_id = "r000",
                               uint64_t seed = 0);
    trajectory     solve(const problem & p, const std::string & rollout_id = "r000", uint64_t seed = 0);

    // K independent rollouts (ids r000..), at most budget.parallel_rollouts in
    // flight; results ordered by rollout index.
    std::vector<rollout_result> solve_many(const problem & p, int rollouts, uint64_t seed = 0);

    const budget_config & budget() const { return budget_; }
    const reward_spec &   rspec() const { return rspec_; }

  private:
    completion_result ask(chat_role role, const std::string & prompt, int sample_count,
                          run_state & state, int round, const std::string & note);

    completion_provider &       provider_;
    budget_config               budget_;
    reward_spec                 rspec_;
    const prompt_template_set & templates_;
    retry_policy                retries_;
};

} // namespace loom
