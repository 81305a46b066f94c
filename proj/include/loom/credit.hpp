#pragma once

#include "loom/domain.hpp"
#include "loom/protocol.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace loom {

// One deduplicated lemma across rollouts, keyed by normalized-statement hash.
struct graph_node {
    uint64_t    id = 0;
    std::string statement;  // first-seen raw text
    std::vector<std::pair<std::string, int>> occurrences;  // (rollout id, round)
    std::vector<double> terminal_rewards;  // rewards of rollouts whose final solution uses this node
    bool                contributing = false;

    int occurrence_count() const { return (int) occurrences.size(); }
    bool terminal() const { return !terminal_rewards.empty(); }
};

struct lemma_graph {
    std::vector<graph_node>                nodes;     // first-seen order
    std::map<uint64_t, size_t>             index_of;  // node id -> position
    std::vector<std::pair<size_t, size_t>> edges;     // (from, to): "to" cites "from"
    std::vector<std::vector<size_t>>       succ;      // adjacency (sorted, unique)
    std::vector<parse_diagnostic>          diagnostics;  // dropped edges, unresolved citations
};

// Builds the cross-rollout dependency graph from admitted lemmas. Edges come
// from cited_indices resolved within each rollout, then mapped through
// deduplication; edges that would close a cycle are dropped with a diagnostic.
// Terminal rewards attach to the nodes the final solution cites by number
// (fallback: the last progress round's admitted lemmas) for rollouts with
// final_reward != 0. All trajectories must share one problem id.
lemma_graph build_graph(const std::vector<trajectory> & trajectories, const ratio & threshold = ratio{1, 2});

using value_map = std::map<uint64_t, double>;

// Reverse-topological value sweep: terminal nodes take the mean of their
// rewards; other nodes take the (unweighted, or occurrence-weighted) mean of
// their successors' values; childless non-terminal nodes are worth 0.
value_map backpropagate_values(const lemma_graph & g, bool occurrence_weighted = false);

// Best value among the round's candidates; absent nodes (rejected lemmas)
// count as 0. Rounds with no candidates have no state value.
std::optional<double> state_value(const reasoning_round & round, const value_map & v);

struct advantage_record {
    std::string rollout_id;
    int         t = 0;
    double      a = 0.0;
    bool        masked = false;
};

// Per-round TD advantages: A_t = r_t + gamma * V(s_t') - V(s_t) where t' is
// the next progress round; the last progress round bootstraps against the
// trajectory's final reward; no-lemma rounds are masked to 0.
std::vector<advantage_record> compute_advantages(const trajectory & traj, const value_map & v, double gamma);

// Plain exports for external visualization.
std::string            graph_to_edge_list(const lemma_graph & g);
nlohmann::ordered_json graph_to_json(const lemma_graph & g, const value_map & v);

} // namespace loom
