#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deskrl/action_grammar.hpp"
#include "deskrl/common.hpp"

namespace deskrl {

/// Term groups that can be switched off for ablations.
struct RewardToggles {
  bool instant = true;
  bool sequence = true;
  bool world_model = true;
  bool visual = true;
  bool intent_alignment = true;

  /// Toggle names: instant, sequence, world_model, visual, intent_alignment.
  /// Returns false for an unknown name.
  bool set(std::string_view name, bool on);
  static std::vector<std::string_view> names();

  /// Named ablation presets: full, wo_instant, wo_sequence, wo_world_model,
  /// only_world_model, wo_visual, wo_intent_alignment.
  static std::optional<RewardToggles> preset(std::string_view name);
  static std::vector<std::string_view> preset_names();

  bool operator==(const RewardToggles&) const = default;
};

struct RewardBreakdown {
  double r_format = 0;
  double inst_vis = 0;
  double inst_text = 0;
  double seq_vis = 0;
  double seq_text = 0;
  double world_vis = 0;
  double world_text = 0;
  double des = 0;
  double inter = 0;
  double overall = 0;

  bool operator==(const RewardBreakdown&) const = default;
};

double format_reward(const FormatVerdict& verdict);

/// (1 - sim(o, o'), 1 - sim(e, e')).
std::pair<double, double> instantaneous(const Vec& o, const Vec& e, const Vec& o_next, const Vec& e_next);

/// Mean of 1 - sim over post-state pairs (i, j) with i < t < j, t in 1..T.
/// Zero at t = 1 and t = T.
std::pair<double, double> subsequent(const std::vector<Vec>& post_o, const std::vector<Vec>& post_e, int t);

/// (sim(i, e) + sim(i, e'), sim(i, e_box)); r_inter is 0 without a box.
std::pair<double, double> alignment(const Vec& intent, const Vec& e, const Vec& e_next, const std::optional<Vec>& e_box);

/// Zeroes disabled terms and sets overall = r_format * (sum of the eight terms).
RewardBreakdown overall(RewardBreakdown terms, const RewardToggles& toggles);

}  // namespace deskrl
