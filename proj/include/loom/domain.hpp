#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace loom {

// Exact fraction. Verifier confidences are k-of-n counts and admission
// thresholds sit exactly at 1/2, so comparisons must not go through floats.
struct ratio {
    long long num = 0;
    long long den = 1;

    double value() const { return den == 0 ? 0.0 : double(num) / double(den); }
};

inline bool operator==(const ratio & a, const ratio & b) { return a.num * b.den == b.num * a.den; }
inline bool operator!=(const ratio & a, const ratio & b) { return !(a == b); }
inline bool operator>(const ratio & a, const ratio & b)  { return a.num * b.den > b.num * a.den; }
inline bool operator<(const ratio & a, const ratio & b)  { return b > a; }
inline bool operator>=(const ratio & a, const ratio & b) { return !(a < b); }
inline bool operator<=(const ratio & a, const ratio & b) { return !(a > b); }

enum class problem_kind {
    solution_based,
    proof_based,
};

const char * problem_kind_name(problem_kind kind);
problem_kind  problem_kind_from_name(const std::string & name);

struct problem {
    std::string                id;
    std::string                statement;
    problem_kind               kind = problem_kind::solution_based;
    std::optional<std::string> reference_answer;
    std::optional<std::string> rubric_ref;
};

// Throws std::invalid_argument on invariant violations (empty statement,
// reference answer on a proof problem without a rubric).
void validate_problem(const problem & p);

struct lemma_origin {
    std::string rollout_id;
    int         round = 0;
};

struct lemma {
    int                      index = 0;     // raw number; -1 is the "no new lemmas" sentinel
    bool                     fixed_suffix = false;
    std::string              statement;
    std::vector<std::string> proof_steps;
    std::set<int>            cited_indices;
    lemma_origin             origin;
    std::optional<ratio>     confidence;    // passes/n once verified
    bool                     proven = false;
};

// Whitespace-collapsed statement with spaces around '$' delimiters removed;
// the identity used to merge equal lemmas across rollouts.
std::string normalized_statement(const std::string & text);

// FNV-1a over the normalized statement.
uint64_t statement_hash(const std::string & statement);

// All "Lemma k" / "Lemma k-fixed" references in a text (case-insensitive,
// word-bounded). Negative sentinels are not citations.
std::set<int> scan_citations(const std::string & text);
std::set<int> scan_citations(const std::vector<std::string> & steps);

bool lemma_admitted(const lemma & l, const ratio & threshold);

// Canonical block for one lemma, the shape the summarizer emits:
//   <lemma>
//   **Lemma X (Lemma X):** statement
//   **Proof X:**
//   * **Step 1:** ...
//   </lemma>
std::string render_lemma_block(const lemma & l);

enum class library_error_kind {
    index_clash,
    dangling_citation,
};

class library_error : public std::runtime_error {
  public:
    library_error(library_error_kind kind, const std::string & what)
        : std::runtime_error(what), kind(kind) {}
    library_error_kind kind;
};

class lemma_library {
  public:
    const std::vector<lemma> & entries() const { return entries_; }
    bool                       empty() const { return entries_.empty(); }
    size_t                     size() const { return entries_.size(); }
    int                        next_index() const { return next_index_; }

    bool          contains(int raw_index) const;
    // Latest entry with the raw index (a -fixed correction supersedes the original).
    const lemma * find(int raw_index) const;

    // Appends a lemma. Raw indices must be fresh (>= next_index) unless the
    // entry carries the -fixed suffix, in which case the original must exist
    // and next_index is left alone. Citations must resolve to earlier entries.
    void insert(lemma l);

    // Canonical text: one <lemma> block per entry, byte-identical for equal
    // libraries. Empty library renders to the empty string.
    std::string render() const;

  private:
    std::vector<lemma> entries_;
    int                next_index_ = 1;
};

enum class meta_action {
    extract_lemmas,
    invoke_verification,
    commit_answer,
};

const char * meta_action_name(meta_action a);
meta_action  meta_action_from_name(const std::string & name);

struct reasoning_round {
    int                t = 1;
    meta_action        action = meta_action::extract_lemmas;
    std::string        reasoner_output;
    std::string        summarizer_output;
    std::vector<lemma> new_lemmas;       // every candidate, rejected ones included
    bool               progress_flag = false;
    double             step_reward = 0.0;
};

// Enforces progress_flag == !new_lemmas.empty(); throws std::invalid_argument.
void validate_round(const reasoning_round & r);

struct refinement_step {
    std::string feedback;
    std::string revised_solution;
};

struct trajectory {
    std::string                  problem_id;
    std::string                  rollout_id;
    std::vector<reasoning_round> rounds;
    std::string                  final_solution;
    std::vector<refinement_step> refinement_log;
    int                          pv_passes = 0;
    int                          pv_trials = 0;
    std::optional<bool>          outcome_correct;
    double                       final_reward = 0.0;
};

void validate_trajectory(const trajectory & t);

struct budget_config {
    int    max_rounds            = 8;
    int    verifier_samples      = 4;
    int    max_refinement_rounds = 8;
    int    max_output_tokens     = 65536;
    int    parallel_rollouts     = 1;
    double gamma                 = 1.0;
    ratio  lemma_confidence_threshold{1, 2};   // admit strictly above
    double step_reward_bonus     = 0.0;        // per progress round, off by default
};

void validate_budget(const budget_config & b);

} // namespace loom
