#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "deskrl/config.hpp"
#include "deskrl/metrics.hpp"

namespace deskrl {

/// One decision step: (s, a, i, s', s_hat, r) plus policy bookkeeping.
struct Sample {
  int episode = 0;
  int env = 0;
  int step = 0;  // 1-based
  std::string reply;
  std::string intent;  // empty when the envelope failed
  FormatVerdict verdict;
  Action action;  // None after a format failure
  CompositeAction choice;
  int num_boxes = 0;
  Screen pre;
  Screen post;
  Vec o, e;
  Vec o_next, e_next;
  Vec o_hat, e_hat;
  std::optional<std::vector<std::string>> box_tokens;  // OCR box under the action, pre-action screen
  RewardBreakdown reward;
  double old_logp = 0;
  double ref_logp = 0;
  double advantage = 0;

  Vec features() const;
  std::string id() const;
};

struct RolloutBuffer {
  int episode = 0;
  int num_envs = 0;
  int steps = 0;
  std::vector<Sample> samples;  // env-major, then step

  std::vector<double> rewards() const;
  std::vector<Trajectory> trajectories() const;
  std::string serialize() const;
  static RolloutBuffer deserialize(std::string_view bytes);
};

/// Replaces the decoded reply text; used to drive collection with scripted agents.
using ReplyOverride = std::function<std::string(const Sample& partial, const std::vector<OcrBox>& boxes)>;

struct RolloutContext {
  std::shared_ptr<const WorldSpec> world;
  EnvConfig env;
  EmbedConfig embed;
  RewardToggles toggles;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  ReplyOverride reply_override;
};

/// Runs every environment for env.max_steps steps against frozen snapshots
/// (one thread per environment) and assembles rewards.
RolloutBuffer collect_episode(const RolloutContext& ctx, const Policy& policy, const Policy& reference,
                              const WorldModel& world_model, int episode);

/// Fills every reward breakdown from stored embeddings: immediate terms, the
/// whole-trajectory sequence terms, toggles and the gated sum.
void assemble_rewards(RolloutBuffer& buffer, const RewardToggles& toggles, const EmbedConfig& embed);

/// Writes advantages computed over the whole buffer.
void assign_advantages(RolloutBuffer& buffer);

std::vector<PolicySample> policy_samples(const RolloutBuffer& buffer);
std::vector<WmExample> world_model_examples(const RolloutBuffer& buffer, const EnvConfig& env);

struct EpisodeLog {
  int episode = 0;
  double format_rate = 0;
  double reward_mean = 0;
  double reward_min = 0;
  double reward_max = 0;
  RewardBreakdown term_means;  // per-term means over all samples, not gated by format
  double wm_loss = 0;
  double adv_min = 0;
  double adv_max = 0;
  double adv_var = 0;
  double kl = 0;
  double surrogate = 0;
};

std::string metrics_csv_header();
std::string metrics_csv_row(const EpisodeLog& log);

/// Algorithm driver without file output: owns the policy, the frozen
/// reference, the world model and their optimizers.
class Trainer {
public:
  explicit Trainer(RunConfig cfg);

  /// Collect, compute advantages, train the world model, update the policy.
  EpisodeLog run_episode();

  int episode() const { return episode_; }
  const RunConfig& config() const { return cfg_; }
  std::shared_ptr<const WorldSpec> world() const { return world_; }
  Policy& policy() { return policy_; }
  const Policy& reference() const { return reference_; }
  WorldModel& world_model() { return world_model_; }
  AdamState& optimizer() { return opt_; }
  const RolloutBuffer& last_buffer() const { return buffer_; }
  RolloutContext context() const;

  ReplyOverride reply_override;

private:
  RunConfig cfg_;
  std::shared_ptr<const WorldSpec> world_;
  Policy policy_;
  Policy reference_;
  WorldModel world_model_;
  AdamState opt_;
  std::mt19937_64 update_rng_;
  std::mt19937_64 wm_rng_;
  RolloutBuffer buffer_;
  int episode_ = 0;
};

/// Frozen-policy evaluation: cfg.eval.episodes single-environment episodes of
/// cfg.eval.steps steps at the given temperature.
DiversityReport evaluate(const Policy& policy, const RunConfig& cfg, double temperature);

/// JSON record for one sample (trajectories.jsonl).
nlohmann::ordered_json sample_to_json(const Sample& s, const std::string& run_id);
nlohmann::json screen_to_json(const Screen& screen);
Screen screen_from_json(const nlohmann::json& j);

struct RunResult {
  std::string run_dir;
  std::vector<EpisodeLog> logs;
};

/// Full training run into a fresh <out_dir>/run_NNNN directory.
RunResult run_training(const RunConfig& cfg, std::ostream* progress = nullptr);

/// Creates the next free run_NNNN directory under out_dir (never reuses one).
std::string create_run_dir(const std::string& out_dir);

std::string git_describe();

}  // namespace deskrl
