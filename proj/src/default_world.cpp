#include "deskrl/env.hpp"

namespace deskrl {

namespace {
#include "default_world_text.inc"
}

const std::string& default_world_text() {
  static const std::string text(kDefaultWorldYaml);
  return text;
}

std::shared_ptr<const WorldSpec> default_world() {
  static const auto world = std::make_shared<const WorldSpec>(load_world(default_world_text(), "worlds/default.yaml"));
  return world;
}

}  // namespace deskrl
