#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deskrl/embed.hpp"
#include "deskrl/env.hpp"
#include "deskrl/grpo.hpp"
#include "deskrl/policy.hpp"
#include "deskrl/reward.hpp"
#include "deskrl/worldmodel.hpp"

namespace deskrl {

struct PolicyConfig {
  int hidden = 128;
  int max_boxes = 16;
  double init_w1_std = 1.0;
  double init_w2_std = 0.01;
};

struct WorldModelConfig {
  int hidden = 128;
  double lr = 4e-3;  // scaled up for the small predictor
  int epochs = 3;
  int batch_size = 32;
  double max_grad_norm = 1.0;
  double init_w1_std = 1.0;
};

struct EvalConfig {
  int episodes = 20;
  int steps = 10;
  std::vector<double> temperatures = {1.0, 0.5};
};

struct RunConfig {
  int schema_version = 1;
  std::uint64_t seed = 1;
  int episodes = 200;
  std::string out_dir = "runs";
  std::string world = "default";  // "default" or a path to a world file
  int checkpoint_every = 25;

  EnvConfig env;
  EmbedConfig embed;
  PolicyConfig policy;
  GrpoConfig grpo;
  WorldModelConfig world_model;
  RewardToggles rewards;
  EvalConfig eval;

  void validate() const;
};

/// Parses and validates a config document. Unknown keys and out-of-range
/// values throw Error(ConfigInvalid) naming the field.
RunConfig load_config(std::string_view yaml_text, std::string_view source = "<config>");
RunConfig load_config_file(const std::string& path);

/// DESKRL_SEED and DESKRL_OUT override seed and out_dir.
void apply_env_overrides(RunConfig& cfg);

/// Applies "name=on|off"; throws ConfigInvalid for unknown names or values.
void apply_toggle(RunConfig& cfg, const std::string& assignment);

std::shared_ptr<const WorldSpec> resolve_world(const RunConfig& cfg);
PolicyShape policy_shape(const RunConfig& cfg, const WorldSpec& world);
WorldModelShape world_model_shape(const RunConfig& cfg);

/// Config echo for manifests (JSON text).
std::string config_to_json(const RunConfig& cfg);

}  // namespace deskrl
