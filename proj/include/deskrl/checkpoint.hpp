#pragma once

#include <string>

#include "deskrl/policy.hpp"
#include "deskrl/worldmodel.hpp"

namespace deskrl {

struct PolicyCheckpoint {
  Policy policy;
  AdamState optimizer;
};

struct WorldModelCheckpoint {
  WorldModel model;
};

void save_policy(const std::string& path, const Policy& policy, const AdamState& opt);
/// Throws ShapeMismatch when the stored shape differs from expected,
/// CheckpointInvalid on a damaged or foreign file.
PolicyCheckpoint load_policy(const std::string& path, const PolicyShape& expected);
PolicyCheckpoint load_policy(const std::string& path);

void save_world_model(const std::string& path, const WorldModel& model);
WorldModelCheckpoint load_world_model(const std::string& path, const WorldModelShape& expected);

}  // namespace deskrl
