#include "deskrl/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "deskrl/agent.hpp"

namespace deskrl {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, msg); }

class Reader {
public:
  explicit Reader(std::string_view source) : source_(source) {}

  void known(const YAML::Node& map, const std::string& prefix, std::initializer_list<const char*> keys) const {
    if (!map.IsMap()) bad(where(map) + "'" + prefix + "' must be a mapping");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) bad(where(kv.first) + "unknown field '" + join(prefix, key) + "'");
    }
  }

  template <typename T>
  void get(const YAML::Node& map, const std::string& prefix, const char* key, T& out) const {
    const auto n = map[key];
    if (!n) return;
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      bad(where(n) + "field '" + join(prefix, key) + "' has the wrong type");
    }
  }

  std::string where(const YAML::Node& n) const {
    return std::string(source_) + ":" + std::to_string(n.Mark().line + 1) + ": ";
  }

  static std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
  }

private:
  std::string_view source_;
};

bool parse_switch(const std::string& v, bool& out) {
  if (v == "on" || v == "true") out = true;
  else if (v == "off" || v == "false") out = false;
  else return false;
  return true;
}

}  // namespace

void RunConfig::validate() const {
  if (schema_version != 1) bad("schema_version must be 1, got " + std::to_string(schema_version));
  if (episodes < 1) bad("episodes must be >= 1");
  if (checkpoint_every < 1) bad("checkpoint_every must be >= 1");
  if (out_dir.empty()) bad("out_dir must not be empty");
  if (env.screen_width_px < 1 || env.screen_height_px < 1) bad("env screen size must be positive");
  if (env.max_steps < 1) bad("env.max_steps must be >= 1");
  if (env.num_parallel_envs < 1 || env.num_parallel_envs > 256) bad("env.num_parallel_envs must be in [1, 256]");
  if (env.num_parallel_envs * env.max_steps < 2) bad("a buffer needs at least 2 samples (envs x steps)");
  if (embed.dim_visual < 1 || embed.dim_text < 1) bad("embed dims must be positive");
  if (policy.hidden < 1) bad("policy.hidden must be >= 1");
  if (policy.max_boxes < 1) bad("policy.max_boxes must be >= 1");
  if (!(policy.init_w1_std >= 0) || !(policy.init_w2_std >= 0)) bad("policy init std must be >= 0");
  try {
    grpo.validate();
  } catch (const Error& e) {
    bad(e.what());
  }
  if (world_model.hidden < 1) bad("world_model.hidden must be >= 1");
  if (!(world_model.lr > 0)) bad("world_model.lr must be > 0");
  if (world_model.epochs < 1) bad("world_model.epochs must be >= 1");
  if (world_model.batch_size < 1) bad("world_model.batch_size must be >= 1");
  if (!(world_model.max_grad_norm > 0)) bad("world_model.max_grad_norm must be > 0");
  if (eval.episodes < 1) bad("eval.episodes must be >= 1");
  if (eval.steps < 2) bad("eval.steps must be >= 2");
  if (eval.temperatures.empty()) bad("eval.temperatures must not be empty");
  for (double t : eval.temperatures) {
    if (!(t > 0)) bad("eval.temperatures must be > 0");
  }
}

RunConfig load_config(std::string_view yaml_text, std::string_view source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    bad(std::string(source) + ":" + std::to_string(e.mark.line + 1) + ": malformed config: " + e.msg);
  }
  RunConfig c;
  if (root.IsNull()) {
    c.validate();
    return c;
  }
  Reader r(source);
  r.known(root, "", {"schema_version", "seed", "episodes", "out_dir", "world", "checkpoint_every", "env", "embed",
                     "policy", "grpo", "world_model", "rewards", "eval"});
  if (!root["schema_version"]) bad(std::string(source) + ": missing field 'schema_version'");
  r.get(root, "", "schema_version", c.schema_version);
  r.get(root, "", "seed", c.seed);
  r.get(root, "", "episodes", c.episodes);
  r.get(root, "", "out_dir", c.out_dir);
  r.get(root, "", "world", c.world);
  r.get(root, "", "checkpoint_every", c.checkpoint_every);

  if (const auto n = root["env"]) {
    r.known(n, "env", {"screen_width_px", "screen_height_px", "max_steps", "num_parallel_envs", "noisy_tv_enabled"});
    r.get(n, "env", "screen_width_px", c.env.screen_width_px);
    r.get(n, "env", "screen_height_px", c.env.screen_height_px);
    r.get(n, "env", "max_steps", c.env.max_steps);
    r.get(n, "env", "num_parallel_envs", c.env.num_parallel_envs);
    r.get(n, "env", "noisy_tv_enabled", c.env.noisy_tv_enabled);
  }
  if (const auto n = root["embed"]) {
    r.known(n, "embed", {"dim_visual", "dim_text", "hash_seed"});
    r.get(n, "embed", "dim_visual", c.embed.dim_visual);
    r.get(n, "embed", "dim_text", c.embed.dim_text);
    r.get(n, "embed", "hash_seed", c.embed.hash_seed);
  }
  if (const auto n = root["policy"]) {
    r.known(n, "policy", {"hidden", "max_boxes", "init_w1_std", "init_w2_std"});
    r.get(n, "policy", "hidden", c.policy.hidden);
    r.get(n, "policy", "max_boxes", c.policy.max_boxes);
    r.get(n, "policy", "init_w1_std", c.policy.init_w1_std);
    r.get(n, "policy", "init_w2_std", c.policy.init_w2_std);
  }
  if (const auto n = root["grpo"]) {
    r.known(n, "grpo", {"beta", "eps_low", "eps_high", "lr", "temperature", "max_grad_norm", "batch_size", "epochs"});
    r.get(n, "grpo", "beta", c.grpo.beta);
    r.get(n, "grpo", "eps_low", c.grpo.eps_low);
    r.get(n, "grpo", "eps_high", c.grpo.eps_high);
    r.get(n, "grpo", "lr", c.grpo.lr);
    r.get(n, "grpo", "temperature", c.grpo.temperature);
    r.get(n, "grpo", "max_grad_norm", c.grpo.max_grad_norm);
    r.get(n, "grpo", "batch_size", c.grpo.batch_size);
    r.get(n, "grpo", "epochs", c.grpo.epochs);
  }
  if (const auto n = root["world_model"]) {
    r.known(n, "world_model", {"hidden", "lr", "epochs", "batch_size", "max_grad_norm", "init_w1_std"});
    r.get(n, "world_model", "hidden", c.world_model.hidden);
    r.get(n, "world_model", "lr", c.world_model.lr);
    r.get(n, "world_model", "epochs", c.world_model.epochs);
    r.get(n, "world_model", "batch_size", c.world_model.batch_size);
    r.get(n, "world_model", "max_grad_norm", c.world_model.max_grad_norm);
    r.get(n, "world_model", "init_w1_std", c.world_model.init_w1_std);
  }
  if (const auto n = root["rewards"]) {
    if (!n.IsMap()) bad(r.where(n) + "'rewards' must be a mapping of toggle name to on/off");
    for (const auto& kv : n) {
      const auto name = kv.first.as<std::string>();
      bool on = true;
      if (!parse_switch(kv.second.as<std::string>(), on)) {
        bad(r.where(kv.second) + "field 'rewards." + name + "' must be on or off");
      }
      if (!c.rewards.set(name, on)) bad(r.where(kv.first) + "unknown toggle 'rewards." + name + "'");
    }
  }
  if (const auto n = root["eval"]) {
    r.known(n, "eval", {"episodes", "steps", "temperatures"});
    r.get(n, "eval", "episodes", c.eval.episodes);
    r.get(n, "eval", "steps", c.eval.steps);
    r.get(n, "eval", "temperatures", c.eval.temperatures);
  }
  c.validate();
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str(), path);
}

void apply_env_overrides(RunConfig& cfg) {
  if (const char* s = std::getenv("DESKRL_SEED"); s && *s) {
    char* end = nullptr;
    const auto v = std::strtoull(s, &end, 10);
    if (*end != '\0') bad("DESKRL_SEED must be an unsigned integer, got '" + std::string(s) + "'");
    cfg.seed = v;
  }
  if (const char* s = std::getenv("DESKRL_OUT"); s && *s) cfg.out_dir = s;
}

void apply_toggle(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) bad("toggle '" + assignment + "' must look like name=on|off");
  const auto name = assignment.substr(0, eq);
  bool on = true;
  if (!parse_switch(assignment.substr(eq + 1), on)) bad("toggle '" + name + "' must be on or off");
  if (!cfg.rewards.set(name, on)) bad("unknown toggle '" + name + "'");
}

std::shared_ptr<const WorldSpec> resolve_world(const RunConfig& cfg) {
  if (cfg.world == "default") return default_world();
  return std::make_shared<const WorldSpec>(load_world_file(cfg.world, cfg.env.max_steps));
}

PolicyShape policy_shape(const RunConfig& cfg, const WorldSpec& world) {
  PolicyShape s;
  s.input_dim = cfg.embed.dim_visual + cfg.embed.dim_text;
  s.hidden = cfg.policy.hidden;
  s.heads = {kNumActionKinds,
             world.cells_x,
             world.cells_y,
             static_cast<int>(kKeyPayloads.size()),
             static_cast<int>(kIntentTemplates.size()),
             cfg.policy.max_boxes};
  return s;
}

WorldModelShape world_model_shape(const RunConfig& cfg) {
  WorldModelShape s;
  s.dim_visual = cfg.embed.dim_visual;
  s.dim_text = cfg.embed.dim_text;
  s.hidden = cfg.world_model.hidden;
  return s;
}

std::string config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["schema_version"] = c.schema_version;
  j["seed"] = c.seed;
  j["episodes"] = c.episodes;
  j["out_dir"] = c.out_dir;
  j["world"] = c.world;
  j["checkpoint_every"] = c.checkpoint_every;
  j["env"] = {{"screen_width_px", c.env.screen_width_px},
              {"screen_height_px", c.env.screen_height_px},
              {"max_steps", c.env.max_steps},
              {"num_parallel_envs", c.env.num_parallel_envs},
              {"noisy_tv_enabled", c.env.noisy_tv_enabled}};
  j["embed"] = {{"dim_visual", c.embed.dim_visual}, {"dim_text", c.embed.dim_text}, {"hash_seed", c.embed.hash_seed}};
  j["policy"] = {{"hidden", c.policy.hidden},
                 {"max_boxes", c.policy.max_boxes},
                 {"init_w1_std", c.policy.init_w1_std},
                 {"init_w2_std", c.policy.init_w2_std}};
  j["grpo"] = {{"beta", c.grpo.beta},
               {"eps_low", c.grpo.eps_low},
               {"eps_high", c.grpo.eps_high},
               {"lr", c.grpo.lr},
               {"temperature", c.grpo.temperature},
               {"max_grad_norm", c.grpo.max_grad_norm},
               {"batch_size", c.grpo.batch_size},
               {"epochs", c.grpo.epochs}};
  j["world_model"] = {{"hidden", c.world_model.hidden},
                      {"lr", c.world_model.lr},
                      {"epochs", c.world_model.epochs},
                      {"batch_size", c.world_model.batch_size},
                      {"max_grad_norm", c.world_model.max_grad_norm},
                      {"init_w1_std", c.world_model.init_w1_std}};
  j["rewards"] = {{"instant", c.rewards.instant},
                  {"sequence", c.rewards.sequence},
                  {"world_model", c.rewards.world_model},
                  {"visual", c.rewards.visual},
                  {"intent_alignment", c.rewards.intent_alignment}};
  j["eval"] = {{"episodes", c.eval.episodes}, {"steps", c.eval.steps}, {"temperatures", c.eval.temperatures}};
  return j.dump(2);
}

}  // namespace deskrl
