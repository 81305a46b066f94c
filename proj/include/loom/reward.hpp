#pragma once

#include "loom/domain.hpp"
#include "loom/protocol.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace loom {

// Posterior over latent solution quality after k passes in n checks.
struct beta_posterior {
    double alpha = 1.0;
    double beta  = 1.0;

    static beta_posterior from_counts(int k, int n);  // Beta(k+1, n-k+1)
    double mean() const { return alpha / (alpha + beta); }
};

enum class reward_transform {
    probability,
    log_odds,
};

const char *     reward_transform_name(reward_transform t);
reward_transform reward_transform_from_name(const std::string & name);

struct reward_spec {
    int              n = 4;
    reward_transform transform = reward_transform::log_odds;
    bool             outcome_gate = true;  // wrong final answer forces reward 0
};

// P(p1 > p0) where p1 ~ Beta(k+1, n-k+1) is the posterior after k of n passes
// and p0 ~ Beta(1, n+1) is the all-fail baseline. Closed form:
//   P = 1 - B(k+1, 2n-k+2) / B(k+1, n-k+1)
// For k = 0 the two posteriors coincide, so P is exactly 1/2.
// Throws std::domain_error outside 0 <= k <= n.
double dominance_probability(int k, int n);

// Dominance probability of k passes under spec.n trials, mapped through the
// configured transform: raw probability, or ln(P / (1-P)) (zero at k = 0).
double conjugate_reward(int k, const reward_spec & spec);

class trial_mismatch_error : public std::runtime_error {
  public:
    trial_mismatch_error(int got, int expected)
        : std::runtime_error("trajectory has " + std::to_string(got) + " PV trials, reward spec expects " +
                             std::to_string(expected)) {}
};

// Final trajectory reward: 0 when the outcome gate trips (known-wrong answer),
// else conjugate_reward(pv_passes). Requires pv_trials == spec.n.
double final_reward(const trajectory & traj, const reward_spec & spec);

// (k, n) from process-verifier votes; format errors count as failures.
// Throws std::invalid_argument on an empty list.
std::pair<int, int> aggregate_pv_votes(const std::vector<verifier_verdict> & verdicts);

} // namespace loom
