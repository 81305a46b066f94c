#pragma once

#include "loom/domain.hpp"
#include "loom/orchestrator.hpp"
#include "loom/provider.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace loom {

struct rubric_item {
    std::string title;
    std::string desc;
    int         points = 1;
};

struct rubric {
    std::vector<rubric_item> items;

    int total() const {
        int t = 0;
        for (const auto & it : items) {
            t += it.points;
        }
        return t;
    }
};

// The grading-scheme JSON shape: an array of {desc, points, title} objects.
rubric                 rubric_from_json(const nlohmann::ordered_json & j);
nlohmann::ordered_json rubric_to_json(const rubric & r);
rubric                 load_rubric_file(const std::string & path);

struct grade_run {
    std::vector<double> item_awards;  // one per rubric item
    double              total = 0.0;
    bool                parse_failed = false;  // scored 0 after one re-sample
    int                 resamples = 0;
};

struct grade_report {
    std::vector<grade_run>        per_run;
    double                        mean_total = 0.0;
    int                           rubric_total = 0;
    std::vector<parse_diagnostic> diagnostics;
};

// The judge prompt shown to every run; instructs the ITEM i / TOTAL grammar.
std::string render_judge_prompt(const std::string & solution, const rubric & r);

// N independent judge runs over the rubric; per-item awards parsed from
// `ITEM i: <points>` lines (+ `TOTAL: <points>`). Items worth 1 point are
// all-or-nothing; larger items accept partial credit in [0, points]. A run
// that fails to parse is re-sampled once, then scored 0 with a diagnostic.
grade_report grade(const std::string & solution, const rubric & r, completion_provider & judge,
                   int runs = 8);

// Unbiased pass@k = 1 - C(n-c, k)/C(n, k); exact integer arithmetic while the
// binomials fit, so k=1 returns c/n identically.
double pass_at_k(int n, int c, int k);

struct bench_options {
    int      rollouts = 16;
    int      pass_k = 1;  // > 1 adds a pass@k column next to pass@1
    int      judge_runs = 8;
    uint64_t seed = 0;
};

struct bench_problem_entry {
    std::string           problem_id;
    int                   rollouts = 0;
    int                   correct = 0;
    double                pass_at_1 = 0.0;
    std::optional<double> pass_at_k_value;
    std::optional<double> rubric_mean;  // mean of per-rollout ensemble scores
    std::string           error;        // non-empty: this problem failed to run
};

struct bench_report {
    std::vector<bench_problem_entry> problems;
    double                           aggregate_pass_at_1 = 0.0;
    std::optional<double>            aggregate_pass_at_k;
    int                              evaluated = 0;  // problems without errors
};

nlohmann::ordered_json bench_report_to_json(const bench_report & r, const bench_options & opts);

// rollouts x solve() per problem; correctness counts feed pass@1 (and pass@k);
// problems with a rubric get ensemble-graded per rollout. A failing problem is
// recorded and the run continues.
bench_report run_benchmark(const std::vector<problem> & problems,
                           const std::map<std::string, rubric> & rubrics, completion_provider & provider,
                           const budget_config & budget, const reward_spec & rspec,
                           const bench_options & opts);

} // namespace loom
