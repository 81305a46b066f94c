#pragma once

#include "loom/domain.hpp"
#include "loom/reward.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace loom {

class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string & what) : std::runtime_error(what) {}
};

struct provider_config {
    std::string kind = "scripted";  // "scripted" | "http"
    // http
    std::string                        url = "http://127.0.0.1:8000";
    std::string                        model = "default";
    std::string                        api_key_env = "LOOM_API_KEY";
    std::map<std::string, std::string> role_models;  // role name -> model override
    int                                max_in_flight = 8;
    int                                timeout_s = 120;
    // scripted
    std::string script_path;
    bool        strict_script = false;
};

struct cli_config {
    std::string     preset = "default";
    budget_config   budget;
    reward_spec     rspec;
    provider_config provider;
    std::string     out_dir = "out";
    uint64_t        seed = 0;
    std::string     template_dir;  // empty: builtin templates
    int             judge_runs = 8;
    int             pass_k = 1;
};

// Named budget bundles; "cmo2025" is the contest-scale configuration
// (256 parallel rollouts, 12 rounds, 8 verifier votes, 24 refinement rounds).
void apply_preset(cli_config & cfg, const std::string & name);

// Strict JSON config: unknown keys are errors naming the offending path;
// ${VAR} in string values is replaced from the environment (missing variables
// are errors). Values not present keep their defaults.
cli_config load_config_json(const nlohmann::ordered_json & j);
cli_config load_config_file(const std::string & path);

nlohmann::ordered_json config_to_json(const cli_config & cfg);

// ${VAR} interpolation used by the config loader (exposed for tests).
std::string interpolate_env(const std::string & value);

} // namespace loom
