#include "deskrl/distill.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "deskrl/embed.hpp"
#include "deskrl/grpo.hpp"
#include "deskrl/rollout.hpp"

namespace deskrl {

std::string_view to_string(Predicate p) {
  switch (p) {
    case Predicate::Episode: return "min_episode";
    case Predicate::Format: return "format";
    case Predicate::Advantage: return "positive_advantage";
    case Predicate::Intent: return "intent_check";
    case Predicate::AcceptList: return "accept_list";
  }
  return "?";
}

const std::vector<std::string>& action_verbs() {
  static const std::vector<std::string> verbs = {
      "click", "open", "scroll", "type", "move", "press", "select", "check",
      "close", "drag", "launch", "search", "enter", "view", "read", "play",
  };
  return verbs;
}

bool intent_clarity_check(std::string_view intent, const std::vector<std::string>& screen_tokens) {
  const auto words = tokenize(intent);
  const auto& verbs = action_verbs();
  bool verb = false;
  bool target = false;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0 && words[i] == words[i - 1]) return false;
    verb = verb || std::find(verbs.begin(), verbs.end(), words[i]) != verbs.end();
    target = target || std::find(screen_tokens.begin(), screen_tokens.end(), words[i]) != screen_tokens.end();
  }
  return verb && target;
}

std::vector<DistillRecord> read_trajectories(const std::string& run_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(run_dir);
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw Error(ErrorCode::Io, "run directory '" + run_dir + "' has no manifest.json");
  EmbedConfig embed;
  try {
    const auto manifest = nlohmann::json::parse(mf);
    const auto& e = manifest.at("config").at("embed");
    embed.dim_visual = e.at("dim_visual").get<int>();
    embed.dim_text = e.at("dim_text").get<int>();
    embed.hash_seed = e.at("hash_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::Io, "malformed manifest in '" + run_dir + "': " + ex.what());
  }

  std::ifstream in(dir / "trajectories.jsonl");
  if (!in) throw Error(ErrorCode::Io, "run directory '" + run_dir + "' has no trajectories.jsonl");
  std::vector<DistillRecord> out;
  std::vector<double> overall;
  bool missing_advantage = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      DistillRecord r;
      r.run = j.at("run").get<std::string>();
      r.id = j.at("id").get<std::string>();
      r.episode = j.at("episode").get<int>();
      r.env = j.at("env").get<int>();
      r.step = j.at("step").get<int>();
      r.format_ok = j.at("verdict").get<std::string>() == "ok";
      r.intent = j.at("intent").get<std::string>();
      r.num_boxes = j.at("num_boxes").get<int>();
      const auto& c = j.at("choice");
      for (int h = 0; h < kNumHeads; ++h) r.choice.set_choice(h, c.at(static_cast<std::size_t>(h)).get<int>());
      const auto pre = screen_from_json(j.at("pre"));
      r.screen_tokens = ocr_tokens(pre);
      r.x.resize(embed.dim_visual + embed.dim_text);
      r.x << embed_visual(pre, embed), embed_text(r.screen_tokens, embed);
      if (j.contains("advantage") && !j["advantage"].is_null()) {
        r.advantage = j["advantage"].get<double>();
      } else {
        missing_advantage = true;
        r.advantage = 0.0;
      }
      overall.push_back(j.at("reward").at("overall").get<double>());
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::Io, (dir / "trajectories.jsonl").string() + ":" + std::to_string(line_no) + ": " +
                                     ex.what());
    }
  }

  if (missing_advantage) {
    std::map<std::pair<std::string, int>, std::vector<std::size_t>> buffers;
    for (std::size_t i = 0; i < out.size(); ++i) buffers[{out[i].run, out[i].episode}].push_back(i);
    for (const auto& [key, idx] : buffers) {
      std::vector<double> rewards;
      for (auto i : idx) rewards.push_back(overall[i]);
      const auto adv = rewards.size() >= 2 ? compute_advantages(rewards) : std::vector<double>(rewards.size(), 0.0);
      for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]].advantage = adv[k];
    }
  }
  return out;
}

std::optional<Predicate> first_failure(const DistillRecord& r, const FilterConfig& cfg) {
  if (r.episode < cfg.min_episode) return Predicate::Episode;
  if (cfg.require_format && !r.format_ok) return Predicate::Format;
  if (cfg.require_positive_advantage && !(r.advantage > 0)) return Predicate::Advantage;
  if (cfg.intent_check_enabled && !intent_clarity_check(r.intent, r.screen_tokens)) return Predicate::Intent;
  if (cfg.accept_list && !cfg.accept_list->count(r.id)) return Predicate::AcceptList;
  return std::nullopt;
}

DistillSet filter_stream(const std::vector<DistillRecord>& records, const FilterConfig& cfg, FilterReport* report) {
  DistillSet set;
  FilterReport rep;
  rep.total = records.size();
  for (const auto& r : records) {
    if (const auto fail = first_failure(r, cfg)) {
      ++rep.rejected[static_cast<std::size_t>(*fail)];
    } else {
      set.pairs.push_back(r);
    }
  }
  rep.kept = set.pairs.size();
  if (report) *report = rep;
  return set;
}

std::set<std::string> read_accept_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open accept list '" + path + "'");
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    ids.insert(line.substr(b, e - b + 1));
  }
  return ids;
}

namespace {

struct Batch {
  Mat X;
  std::vector<int> boxes;
  std::vector<CompositeAction> actions;
  Vec weights;
};

Batch make_batch(const DistillSet& set, int input_dim) {
  Batch b;
  const auto n = static_cast<Eigen::Index>(set.pairs.size());
  b.X.resize(input_dim, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = set.pairs[static_cast<std::size_t>(i)];
    if (p.x.size() != input_dim) throw Error(ErrorCode::ShapeMismatch, "distill features do not match the policy");
    b.X.col(i) = p.x;
    b.boxes.push_back(p.num_boxes);
    b.actions.push_back(p.choice);
  }
  b.weights = Vec::Constant(n, 1.0 / static_cast<double>(n));
  return b;
}

}  // namespace

double sft_loss(const Policy& policy, const DistillSet& set, double temperature) {
  if (set.pairs.empty()) throw Error(ErrorCode::EmptyDataset, "distill set is empty");
  const auto b = make_batch(set, policy.shape().input_dim);
  return -policy.batch_log_prob(b.X, b.boxes, b.actions, temperature, b.weights, nullptr);
}

std::vector<double> sft_train(Policy& policy, const DistillSet& set, const SftConfig& cfg) {
  if (set.pairs.empty()) throw Error(ErrorCode::EmptyDataset, "distill set is empty");
  const auto b = make_batch(set, policy.shape().input_dim);
  auto loss_at = [&](const Policy& p, Vec* grad) {
    return -p.batch_log_prob(b.X, b.boxes, b.actions, cfg.temperature, b.weights, grad);
  };

  std::vector<double> losses;
  double lr = cfg.lr;
  Vec grad;
  double loss = loss_at(policy, &grad);
  for (int ep = 0; ep < cfg.epochs; ++ep) {
    losses.push_back(loss);
    Policy trial = policy;
    bool accepted = false;
    for (int tries = 0; tries < 40; ++tries) {
      trial.params() = policy.params() + lr * grad;  // grad is of the log-likelihood
      const double next = loss_at(trial, nullptr);
      if (std::isfinite(next) && next <= loss) {
        accepted = true;
        loss = next;
        break;
      }
      lr *= 0.5;
    }
    if (!accepted) break;
    policy = std::move(trial);
    lr *= 1.2;
    grad.setZero();
    loss = loss_at(policy, &grad);
  }
  losses.push_back(loss);
  return losses;
}

}  // namespace deskrl
