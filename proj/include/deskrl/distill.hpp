#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "deskrl/config.hpp"
#include "deskrl/policy.hpp"

namespace deskrl {

struct FilterConfig {
  int min_episode = 30;
  bool require_format = true;
  bool require_positive_advantage = true;
  bool intent_check_enabled = true;
  std::optional<std::set<std::string>> accept_list;  // sample ids; absent means accept all
};

/// Filter predicates in the order rejections are attributed.
enum class Predicate { Episode, Format, Advantage, Intent, AcceptList };
inline constexpr int kNumPredicates = 5;
std::string_view to_string(Predicate p);

/// Verbs an intent must contain to name a concrete action.
const std::vector<std::string>& action_verbs();

/// True iff the intent has an action verb, names at least one on-screen token
/// and repeats no word back to back.
bool intent_clarity_check(std::string_view intent, const std::vector<std::string>& screen_tokens);

/// One candidate pair from a trajectory log.
struct DistillRecord {
  std::string run;
  std::string id;
  int episode = 0;
  int env = 0;
  int step = 0;
  Vec x;
  int num_boxes = 0;
  CompositeAction choice;
  bool format_ok = false;
  double advantage = 0;
  std::string intent;
  std::vector<std::string> screen_tokens;
};

/// Reads <run_dir>/trajectories.jsonl, rebuilding features with the embed
/// settings recorded in the run manifest. Missing advantages are recomputed
/// per (run, episode) buffer from the stored overall rewards.
std::vector<DistillRecord> read_trajectories(const std::string& run_dir);

/// First failing predicate, or nullopt when the record is kept.
std::optional<Predicate> first_failure(const DistillRecord& r, const FilterConfig& cfg);

struct FilterReport {
  std::size_t total = 0;
  std::size_t kept = 0;
  std::array<std::size_t, kNumPredicates> rejected{};
};

struct DistillSet {
  std::vector<DistillRecord> pairs;
};

DistillSet filter_stream(const std::vector<DistillRecord>& records, const FilterConfig& cfg, FilterReport* report);

/// Newline-separated sample ids; blank lines and '#' comments ignored.
std::set<std::string> read_accept_list(const std::string& path);

struct SftConfig {
  int epochs = 300;
  double lr = 0.5;
  double temperature = 1.0;
};

/// Full-batch gradient ascent on mean log-likelihood with backtracking, so the
/// training loss never increases. Returns the loss before each epoch and after the last.
std::vector<double> sft_train(Policy& policy, const DistillSet& set, const SftConfig& cfg);

/// Mean negative log-likelihood of the set under the policy.
double sft_loss(const Policy& policy, const DistillSet& set, double temperature);

}  // namespace deskrl
