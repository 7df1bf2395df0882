#include "deskrl/reward.hpp"

#include "deskrl/embed.hpp"

namespace deskrl {

bool RewardToggles::set(std::string_view name, bool on) {
  if (name == "instant") instant = on;
  else if (name == "sequence") sequence = on;
  else if (name == "world_model") world_model = on;
  else if (name == "visual") visual = on;
  else if (name == "intent_alignment") intent_alignment = on;
  else return false;
  return true;
}

std::vector<std::string_view> RewardToggles::names() {
  return {"instant", "sequence", "world_model", "visual", "intent_alignment"};
}

std::optional<RewardToggles> RewardToggles::preset(std::string_view name) {
  RewardToggles t;
  if (name == "full") return t;
  if (name == "wo_instant") t.instant = false;
  else if (name == "wo_sequence") t.sequence = false;
  else if (name == "wo_world_model") t.world_model = false;
  else if (name == "wo_visual") t.visual = false;
  else if (name == "wo_intent_alignment") t.intent_alignment = false;
  else if (name == "only_world_model") t.instant = t.sequence = t.intent_alignment = false;
  else return std::nullopt;
  return t;
}

std::vector<std::string_view> RewardToggles::preset_names() {
  return {"full", "wo_instant", "wo_sequence", "wo_world_model", "only_world_model", "wo_visual",
          "wo_intent_alignment"};
}

double format_reward(const FormatVerdict& verdict) { return verdict.ok() ? 1.0 : 0.0; }

std::pair<double, double> instantaneous(const Vec& o, const Vec& e, const Vec& o_next, const Vec& e_next) {
  return {1.0 - cosine(o, o_next), 1.0 - cosine(e, e_next)};
}

std::pair<double, double> subsequent(const std::vector<Vec>& post_o, const std::vector<Vec>& post_e, int t) {
  if (post_o.size() != post_e.size()) {
    throw Error(ErrorCode::DimensionMismatch, "visual and text post-state lists differ in length");
  }
  const int T = static_cast<int>(post_o.size());
  if (t < 1 || t > T) {
    throw Error(ErrorCode::IndexOutOfRange, "step " + std::to_string(t) + " outside 1.." + std::to_string(T));
  }
  double vis = 0.0;
  double text = 0.0;
  int pairs = 0;
  for (int i = 1; i < t; ++i) {
    for (int j = t + 1; j <= T; ++j) {
      vis += 1.0 - cosine(post_o[static_cast<std::size_t>(i - 1)], post_o[static_cast<std::size_t>(j - 1)]);
      text += 1.0 - cosine(post_e[static_cast<std::size_t>(i - 1)], post_e[static_cast<std::size_t>(j - 1)]);
      ++pairs;
    }
  }
  if (pairs == 0) return {0.0, 0.0};
  return {vis / pairs, text / pairs};
}

std::pair<double, double> alignment(const Vec& intent, const Vec& e, const Vec& e_next,
                                    const std::optional<Vec>& e_box) {
  const double des = cosine(intent, e) + cosine(intent, e_next);
  const double inter = e_box ? cosine(intent, *e_box) : 0.0;
  return {des, inter};
}

RewardBreakdown overall(RewardBreakdown r, const RewardToggles& toggles) {
  if (!toggles.instant) r.inst_vis = r.inst_text = 0.0;
  if (!toggles.sequence) r.seq_vis = r.seq_text = 0.0;
  if (!toggles.world_model) r.world_vis = r.world_text = 0.0;
  if (!toggles.visual) r.inst_vis = r.seq_vis = r.world_vis = 0.0;
  if (!toggles.intent_alignment) r.des = r.inter = 0.0;
  const double sum =
      r.inst_vis + r.inst_text + r.seq_vis + r.seq_text + r.world_vis + r.world_text + r.des + r.inter;
  r.overall = r.r_format == 0.0 ? 0.0 : r.r_format * sum;
  return r;
}

}  // namespace deskrl
