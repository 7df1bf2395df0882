#include "deskrl/rollout.hpp"

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "deskrl/agent.hpp"
#include "deskrl/binio.hpp"
#include "deskrl/checkpoint.hpp"

#ifndef DESKRL_GIT_DESCRIBE
#define DESKRL_GIT_DESCRIBE "unknown"
#endif

namespace deskrl {

namespace fs = std::filesystem;

namespace {

// Independent RNG streams derived from the run seed.
enum Stream : std::uint64_t {
  kPolicyInit = 1,
  kWorldModelInit,
  kUpdateShuffle,
  kWorldModelShuffle,
  kSampling,
  kEnvNoise,
  kEvalSampling,
  kEvalNoise,
};

void write_screen(BinWriter& w, const Screen& s) {
  w.pod<std::int32_t>(s.width_cells);
  w.pod<std::int32_t>(s.height_cells);
  w.str(s.page_id);
  w.pod<std::int32_t>(s.scroll_offset);
  w.pod<std::uint64_t>(s.cells.size());
  for (const auto& c : s.cells) {
    w.pod(c.color);
    w.pod(c.widget);
    w.str(c.token);
  }
}

Screen read_screen(BinReader& r) {
  Screen s;
  s.width_cells = r.pod<std::int32_t>();
  s.height_cells = r.pod<std::int32_t>();
  s.page_id = r.str();
  s.scroll_offset = r.pod<std::int32_t>();
  const auto n = r.pod<std::uint64_t>();
  if (n != static_cast<std::uint64_t>(s.width_cells) * static_cast<std::uint64_t>(s.height_cells)) {
    throw Error(ErrorCode::CheckpointInvalid, "screen cell count does not match its size");
  }
  s.cells.resize(n);
  for (auto& c : s.cells) {
    c.color = r.pod<std::uint8_t>();
    c.widget = r.pod<std::int16_t>();
    c.token = r.str();
  }
  return s;
}

void write_opt_string(BinWriter& w, const std::optional<std::string>& s) {
  w.pod<std::uint8_t>(s ? 1 : 0);
  if (s) w.str(*s);
}

std::optional<std::string> read_opt_string(BinReader& r) {
  if (r.pod<std::uint8_t>() == 0) return std::nullopt;
  return r.str();
}

void write_breakdown(BinWriter& w, const RewardBreakdown& b) {
  for (double v : {b.r_format, b.inst_vis, b.inst_text, b.seq_vis, b.seq_text, b.world_vis, b.world_text, b.des,
                   b.inter, b.overall}) {
    w.pod(v);
  }
}

RewardBreakdown read_breakdown(BinReader& r) {
  RewardBreakdown b;
  for (double* v : {&b.r_format, &b.inst_vis, &b.inst_text, &b.seq_vis, &b.seq_text, &b.world_vis, &b.world_text,
                    &b.des, &b.inter, &b.overall}) {
    *v = r.pod<double>();
  }
  return b;
}

nlohmann::ordered_json breakdown_json(const RewardBreakdown& b) {
  return {{"r_format", b.r_format}, {"inst_vis", b.inst_vis},     {"inst_text", b.inst_text},
          {"seq_vis", b.seq_vis},   {"seq_text", b.seq_text},     {"world_vis", b.world_vis},
          {"world_text", b.world_text}, {"des", b.des},           {"inter", b.inter},
          {"overall", b.overall}};
}

void run_env(const RolloutContext& ctx, const Policy& policy, const Policy& reference, const WorldModel& wm,
             int episode, int env_id, std::vector<Sample>& out) {
  EnvConfig ecfg = ctx.env;
  ecfg.rng_seed = derive_seed(ctx.seed, kEnvNoise, episode, env_id);
  Environment env(ctx.world, ecfg);
  std::mt19937_64 rng(derive_seed(ctx.seed, kSampling, episode, env_id));
  const int W = ecfg.screen_width_px;
  const int H = ecfg.screen_height_px;

  Screen cur = env.reset();
  for (int t = 1; t <= ecfg.max_steps; ++t) {
    Sample s;
    s.episode = episode;
    s.env = env_id;
    s.step = t;
    s.pre = cur;
    s.o = embed_visual(cur, ctx.embed);
    const auto boxes = ocr(cur);
    s.e = embed_text(ocr_tokens(cur), ctx.embed);
    s.num_boxes = static_cast<int>(boxes.size());
    const Vec x = s.features();
    s.choice = policy.sample(x, s.num_boxes, ctx.temperature, rng);
    s.old_logp = policy.log_prob(x, s.num_boxes, s.choice, ctx.temperature);
    s.ref_logp = reference.log_prob(x, s.num_boxes, s.choice, ctx.temperature);
    s.reply = ctx.reply_override ? ctx.reply_override(s, boxes)
                                 : decode_reply(s.choice, boxes, ecfg, ctx.world->cells_x, ctx.world->cells_y);

    auto check = check_reply(s.reply, W, H);
    s.verdict = check.verdict;
    s.intent = check.intent;
    s.action = check.action.value_or(Action::none());
    if (s.verdict.ok() && has_coords(s.action.kind)) {
      if (auto box = box_at(cur, *s.action.x, *s.action.y, W, H)) s.box_tokens = box->tokens;
    }

    cur = env.step(s.action);
    s.post = cur;
    s.o_next = embed_visual(cur, ctx.embed);
    s.e_next = embed_text(ocr_tokens(cur), ctx.embed);
    const auto pred = wm.predict(s.o, s.e, encode_action(s.action, W, H));
    s.o_hat = pred.o;
    s.e_hat = pred.e;
    out.push_back(std::move(s));
  }
}

double mean_of(const std::vector<Sample>& v, double RewardBreakdown::*field) {
  double sum = 0.0;
  for (const auto& s : v) sum += s.reward.*field;
  return sum / static_cast<double>(v.size());
}

}  // namespace

Vec Sample::features() const {
  Vec x(o.size() + e.size());
  x << o, e;
  return x;
}

std::string Sample::id() const {
  return std::to_string(episode) + ":" + std::to_string(env) + ":" + std::to_string(step);
}

std::vector<double> RolloutBuffer::rewards() const {
  std::vector<double> r;
  r.reserve(samples.size());
  for (const auto& s : samples) r.push_back(s.reward.overall);
  return r;
}

std::vector<Trajectory> RolloutBuffer::trajectories() const {
  std::vector<Trajectory> out(static_cast<std::size_t>(num_envs));
  for (const auto& s : samples) {
    auto& t = out.at(static_cast<std::size_t>(s.env));
    t.episode = s.episode;
    t.env = s.env;
    t.o.push_back(s.o_next);
    t.e.push_back(s.e_next);
    t.format_ok.push_back(s.verdict.ok());
  }
  return out;
}

std::string RolloutBuffer::serialize() const {
  BinWriter w;
  w.pod<std::uint32_t>(0x42534b44);  // "DKSB"
  w.pod<std::int32_t>(episode);
  w.pod<std::int32_t>(num_envs);
  w.pod<std::int32_t>(steps);
  w.pod<std::uint64_t>(samples.size());
  for (const auto& s : samples) {
    w.pod<std::int32_t>(s.episode);
    w.pod<std::int32_t>(s.env);
    w.pod<std::int32_t>(s.step);
    w.str(s.reply);
    w.str(s.intent);
    w.pod<std::int32_t>(s.verdict.reason ? static_cast<std::int32_t>(*s.verdict.reason) : -1);
    w.pod<std::uint8_t>(static_cast<std::uint8_t>(s.action.kind));
    w.pod<std::uint8_t>(s.action.x ? 1 : 0);
    w.pod<std::int32_t>(s.action.x.value_or(0));
    w.pod<std::uint8_t>(s.action.y ? 1 : 0);
    w.pod<std::int32_t>(s.action.y.value_or(0));
    write_opt_string(w, s.action.text);
    write_opt_string(w, s.action.key);
    for (int h = 0; h < kNumHeads; ++h) w.pod<std::int32_t>(s.choice.choice(h));
    w.pod<std::int32_t>(s.num_boxes);
    write_screen(w, s.pre);
    write_screen(w, s.post);
    for (const Vec* v : {&s.o, &s.e, &s.o_next, &s.e_next, &s.o_hat, &s.e_hat}) w.vec(*v);
    w.pod<std::uint8_t>(s.box_tokens ? 1 : 0);
    if (s.box_tokens) {
      w.pod<std::uint64_t>(s.box_tokens->size());
      for (const auto& t : *s.box_tokens) w.str(t);
    }
    write_breakdown(w, s.reward);
    w.pod(s.old_logp);
    w.pod(s.ref_logp);
    w.pod(s.advantage);
  }
  return w.bytes();
}

RolloutBuffer RolloutBuffer::deserialize(std::string_view bytes) {
  BinReader r(bytes);
  if (r.pod<std::uint32_t>() != 0x42534b44) throw Error(ErrorCode::CheckpointInvalid, "not a rollout buffer dump");
  RolloutBuffer b;
  b.episode = r.pod<std::int32_t>();
  b.num_envs = r.pod<std::int32_t>();
  b.steps = r.pod<std::int32_t>();
  const auto n = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < n; ++i) {
    Sample s;
    s.episode = r.pod<std::int32_t>();
    s.env = r.pod<std::int32_t>();
    s.step = r.pod<std::int32_t>();
    s.reply = r.str();
    s.intent = r.str();
    const auto reason = r.pod<std::int32_t>();
    if (reason >= 0) s.verdict = FormatVerdict::fail(static_cast<FormatError>(reason));
    s.action.kind = static_cast<ActionKind>(r.pod<std::uint8_t>());
    const bool hx = r.pod<std::uint8_t>() != 0;
    const int x = r.pod<std::int32_t>();
    const bool hy = r.pod<std::uint8_t>() != 0;
    const int y = r.pod<std::int32_t>();
    if (hx) s.action.x = x;
    if (hy) s.action.y = y;
    s.action.text = read_opt_string(r);
    s.action.key = read_opt_string(r);
    for (int h = 0; h < kNumHeads; ++h) s.choice.set_choice(h, r.pod<std::int32_t>());
    s.num_boxes = r.pod<std::int32_t>();
    s.pre = read_screen(r);
    s.post = read_screen(r);
    for (Vec* v : {&s.o, &s.e, &s.o_next, &s.e_next, &s.o_hat, &s.e_hat}) *v = r.vec();
    if (r.pod<std::uint8_t>() != 0) {
      std::vector<std::string> toks(r.pod<std::uint64_t>());
      for (auto& t : toks) t = r.str();
      s.box_tokens = std::move(toks);
    }
    s.reward = read_breakdown(r);
    s.old_logp = r.pod<double>();
    s.ref_logp = r.pod<double>();
    s.advantage = r.pod<double>();
    b.samples.push_back(std::move(s));
  }
  if (!r.done()) throw Error(ErrorCode::CheckpointInvalid, "trailing bytes in rollout buffer dump");
  return b;
}

RolloutBuffer collect_episode(const RolloutContext& ctx, const Policy& policy, const Policy& reference,
                              const WorldModel& world_model, int episode) {
  if (!ctx.world) throw Error(ErrorCode::ConfigInvalid, "rollout needs a world");
  const int n = ctx.env.num_parallel_envs;
  std::vector<std::vector<Sample>> per_env(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  {
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      workers.emplace_back([&, i] {
        try {
          run_env(ctx, policy, reference, world_model, episode, i, per_env[static_cast<std::size_t>(i)]);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  RolloutBuffer buffer;
  buffer.episode = episode;
  buffer.num_envs = n;
  buffer.steps = ctx.env.max_steps;
  for (auto& v : per_env) {
    for (auto& s : v) buffer.samples.push_back(std::move(s));
  }
  assemble_rewards(buffer, ctx.toggles, ctx.embed);
  return buffer;
}

void assemble_rewards(RolloutBuffer& buffer, const RewardToggles& toggles, const EmbedConfig& embed) {
  std::vector<std::vector<Sample*>> by_env(static_cast<std::size_t>(buffer.num_envs));
  for (auto& s : buffer.samples) by_env.at(static_cast<std::size_t>(s.env)).push_back(&s);

  for (auto& traj : by_env) {
    std::sort(traj.begin(), traj.end(), [](const Sample* a, const Sample* b) { return a->step < b->step; });
    std::vector<Vec> post_o;
    std::vector<Vec> post_e;
    for (const Sample* s : traj) {
      post_o.push_back(s->o_next);
      post_e.push_back(s->e_next);
    }
    for (std::size_t k = 0; k < traj.size(); ++k) {
      Sample& s = *traj[k];
      RewardBreakdown r;
      r.r_format = format_reward(s.verdict);
      std::tie(r.inst_vis, r.inst_text) = instantaneous(s.o, s.e, s.o_next, s.e_next);
      std::tie(r.seq_vis, r.seq_text) = subsequent(post_o, post_e, static_cast<int>(k) + 1);
      std::tie(r.world_vis, r.world_text) = curiosity(s.o_next, s.o_hat, s.e_next, s.e_hat);
      std::optional<Vec> e_box;
      if (s.box_tokens) e_box = embed_text(*s.box_tokens, embed);
      std::tie(r.des, r.inter) = alignment(embed_intent(s.intent, embed), s.e, s.e_next, e_box);
      s.reward = overall(r, toggles);
    }
  }
}

void assign_advantages(RolloutBuffer& buffer) {
  const auto adv = compute_advantages(buffer.rewards());
  for (std::size_t i = 0; i < adv.size(); ++i) buffer.samples[i].advantage = adv[i];
}

std::vector<PolicySample> policy_samples(const RolloutBuffer& buffer) {
  std::vector<PolicySample> out;
  out.reserve(buffer.samples.size());
  for (const auto& s : buffer.samples) {
    out.push_back({s.features(), s.num_boxes, s.choice, s.old_logp, s.ref_logp, s.advantage});
  }
  return out;
}

std::vector<WmExample> world_model_examples(const RolloutBuffer& buffer, const EnvConfig& env) {
  std::vector<WmExample> out;
  out.reserve(buffer.samples.size());
  for (const auto& s : buffer.samples) {
    out.push_back({s.o, s.e, encode_action(s.action, env.screen_width_px, env.screen_height_px), s.o_next, s.e_next});
  }
  return out;
}

std::string metrics_csv_header() {
  return "episode,format_rate,reward_mean,reward_min,reward_max,inst_vis,inst_text,seq_vis,seq_text,world_vis,"
         "world_text,des,inter,wm_loss,adv_min,adv_max,adv_var,kl,surrogate";
}

std::string metrics_csv_row(const EpisodeLog& l) {
  std::ostringstream os;
  os << std::setprecision(10) << l.episode;
  const auto& m = l.term_means;
  for (double v : {l.format_rate, l.reward_mean, l.reward_min, l.reward_max, m.inst_vis, m.inst_text, m.seq_vis,
                   m.seq_text, m.world_vis, m.world_text, m.des, m.inter, l.wm_loss, l.adv_min, l.adv_max, l.adv_var,
                   l.kl, l.surrogate}) {
    os << ',' << v;
  }
  return os.str();
}

Trainer::Trainer(RunConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  world_ = resolve_world(cfg_);
  const auto shape = policy_shape(cfg_, *world_);
  policy_ = Policy(shape, derive_seed(cfg_.seed, kPolicyInit), cfg_.policy.init_w1_std, cfg_.policy.init_w2_std);
  reference_ = policy_;
  world_model_ = WorldModel(world_model_shape(cfg_), derive_seed(cfg_.seed, kWorldModelInit),
                            cfg_.world_model.init_w1_std);
  update_rng_.seed(derive_seed(cfg_.seed, kUpdateShuffle));
  wm_rng_.seed(derive_seed(cfg_.seed, kWorldModelShuffle));
}

RolloutContext Trainer::context() const {
  RolloutContext ctx;
  ctx.world = world_;
  ctx.env = cfg_.env;
  ctx.embed = cfg_.embed;
  ctx.toggles = cfg_.rewards;
  ctx.temperature = cfg_.grpo.temperature;
  ctx.seed = cfg_.seed;
  ctx.reply_override = reply_override;
  return ctx;
}

EpisodeLog Trainer::run_episode() {
  ++episode_;
  buffer_ = collect_episode(context(), policy_, reference_, world_model_, episode_);
  assign_advantages(buffer_);

  EpisodeLog log;
  log.episode = episode_;
  const auto& S = buffer_.samples;
  std::vector<bool> flags;
  for (const auto& s : S) flags.push_back(s.verdict.ok());
  log.format_rate = correct_format_rate(flags);
  const auto rewards = buffer_.rewards();
  log.reward_mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(rewards.size());
  log.reward_min = *std::min_element(rewards.begin(), rewards.end());
  log.reward_max = *std::max_element(rewards.begin(), rewards.end());
  auto& m = log.term_means;
  m.r_format = log.format_rate;
  m.inst_vis = mean_of(S, &RewardBreakdown::inst_vis);
  m.inst_text = mean_of(S, &RewardBreakdown::inst_text);
  m.seq_vis = mean_of(S, &RewardBreakdown::seq_vis);
  m.seq_text = mean_of(S, &RewardBreakdown::seq_text);
  m.world_vis = mean_of(S, &RewardBreakdown::world_vis);
  m.world_text = mean_of(S, &RewardBreakdown::world_text);
  m.des = mean_of(S, &RewardBreakdown::des);
  m.inter = mean_of(S, &RewardBreakdown::inter);
  m.overall = log.reward_mean;
  double amin = S.front().advantage, amax = amin, asum = 0.0, asq = 0.0;
  for (const auto& s : S) {
    amin = std::min(amin, s.advantage);
    amax = std::max(amax, s.advantage);
    asum += s.advantage;
    asq += s.advantage * s.advantage;
  }
  const double n = static_cast<double>(S.size());
  log.adv_min = amin;
  log.adv_max = amax;
  log.adv_var = asq / n - (asum / n) * (asum / n);

  const auto examples = world_model_examples(buffer_, cfg_.env);
  const auto losses = world_model_.train_epochs(examples, cfg_.world_model.epochs, cfg_.world_model.lr,
                                                cfg_.world_model.batch_size, cfg_.world_model.max_grad_norm, wm_rng_);
  log.wm_loss = losses.back();

  const auto stats = grpo_update(policy_, opt_, policy_samples(buffer_), cfg_.grpo, update_rng_);
  log.kl = stats.kl_after;
  log.surrogate = stats.objective_first;
  return log;
}

DiversityReport evaluate(const Policy& policy, const RunConfig& cfg, double temperature) {
  const auto world = resolve_world(cfg);
  EnvConfig ecfg = cfg.env;
  ecfg.max_steps = cfg.eval.steps;
  const int W = ecfg.screen_width_px;
  const int H = ecfg.screen_height_px;
  std::vector<Trajectory> group;
  for (int ep = 0; ep < cfg.eval.episodes; ++ep) {
    ecfg.rng_seed = derive_seed(cfg.seed, kEvalNoise, ep);
    Environment env(world, ecfg);
    std::mt19937_64 rng(derive_seed(cfg.seed, kEvalSampling, ep));
    Trajectory traj;
    traj.episode = ep;
    Screen cur = env.reset();
    for (int t = 0; t < ecfg.max_steps; ++t) {
      const auto boxes = ocr(cur);
      Vec x(cfg.embed.dim_visual + cfg.embed.dim_text);
      x << embed_visual(cur, cfg.embed), embed_text(ocr_tokens(cur), cfg.embed);
      const auto choice = policy.sample(x, static_cast<int>(boxes.size()), temperature, rng);
      const auto reply = decode_reply(choice, boxes, ecfg, world->cells_x, world->cells_y);
      const auto check = check_reply(reply, W, H);
      cur = env.step(check.action.value_or(Action::none()));
      traj.o.push_back(embed_visual(cur, cfg.embed));
      traj.e.push_back(embed_text(ocr_tokens(cur), cfg.embed));
      traj.format_ok.push_back(check.verdict.ok());
    }
    group.push_back(std::move(traj));
  }
  return diversity_report(group);
}

nlohmann::json screen_to_json(const Screen& s) {
  nlohmann::json colors = nlohmann::json::array();
  nlohmann::json widgets = nlohmann::json::array();
  nlohmann::json tokens = nlohmann::json::array();
  for (std::size_t i = 0; i < s.cells.size(); ++i) {
    const auto& c = s.cells[i];
    if (!colors.empty() && colors.back()[0] == c.color) {
      colors.back()[1] = colors.back()[1].get<int>() + 1;
    } else {
      colors.push_back({c.color, 1});
    }
    if (!widgets.empty() && widgets.back()[0] == c.widget) {
      widgets.back()[1] = widgets.back()[1].get<int>() + 1;
    } else {
      widgets.push_back({c.widget, 1});
    }
    if (!c.token.empty()) tokens.push_back({i, c.token});
  }
  return {{"w", s.width_cells}, {"h", s.height_cells}, {"page", s.page_id}, {"scroll", s.scroll_offset},
          {"colors", colors},   {"widgets", widgets},   {"tokens", tokens}};
}

Screen screen_from_json(const nlohmann::json& j) {
  Screen s;
  s.width_cells = j.at("w").get<int>();
  s.height_cells = j.at("h").get<int>();
  s.page_id = j.at("page").get<std::string>();
  s.scroll_offset = j.at("scroll").get<int>();
  const auto n = static_cast<std::size_t>(s.width_cells) * static_cast<std::size_t>(s.height_cells);
  s.cells.resize(n);
  std::size_t i = 0;
  for (const auto& run : j.at("colors")) {
    for (int k = 0; k < run.at(1).get<int>(); ++k) s.cells.at(i++).color = run.at(0).get<std::uint8_t>();
  }
  if (i != n) throw Error(ErrorCode::Io, "screen color runs do not cover the grid");
  i = 0;
  for (const auto& run : j.at("widgets")) {
    for (int k = 0; k < run.at(1).get<int>(); ++k) s.cells.at(i++).widget = run.at(0).get<std::int16_t>();
  }
  if (i != n) throw Error(ErrorCode::Io, "screen widget runs do not cover the grid");
  for (const auto& t : j.at("tokens")) s.cells.at(t.at(0).get<std::size_t>()).token = t.at(1).get<std::string>();
  return s;
}

nlohmann::ordered_json sample_to_json(const Sample& s, const std::string& run_id) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["run"] = run_id;
  j["id"] = s.id();
  j["episode"] = s.episode;
  j["env"] = s.env;
  j["step"] = s.step;
  j["reply"] = s.reply;
  j["intent"] = s.intent;
  j["verdict"] = verdict_code(s.verdict);
  j["action"] = render(s.action);
  j["choice"] = {s.choice.kind, s.choice.cx, s.choice.cy, s.choice.payload, s.choice.intent, s.choice.slot};
  j["num_boxes"] = s.num_boxes;
  j["box_tokens"] = s.box_tokens ? nlohmann::json(*s.box_tokens) : nlohmann::json(nullptr);
  j["reward"] = breakdown_json(s.reward);
  j["advantage"] = s.advantage;
  j["old_logp"] = s.old_logp;
  j["ref_logp"] = s.ref_logp;
  j["pre"] = screen_to_json(s.pre);
  j["post"] = screen_to_json(s.post);
  return j;
}

std::string git_describe() { return DESKRL_GIT_DESCRIBE; }

std::string create_run_dir(const std::string& out_dir) {
  fs::create_directories(out_dir);
  for (int i = 1; i < 100000; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "run_%04d", i);
    const fs::path p = fs::path(out_dir) / name;
    if (fs::exists(p)) continue;
    if (fs::create_directory(p)) return p.string();
  }
  throw Error(ErrorCode::Io, "no free run directory under '" + out_dir + "'");
}

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + p.string() + "'");
  out << text;
}

std::string eval_csv_header() {
  return "checkpoint,temperature,correct_format,d_seq_vis,d_seq_text,d_grp_vis,d_grp_text,avg_diversity";
}

std::string eval_csv_row(const std::string& name, double temp, const DiversityReport& r) {
  std::ostringstream os;
  os << std::setprecision(10) << name << ',' << temp << ',' << r.correct_format << ',' << r.d_vis << ',' << r.d_text
     << ',' << r.D_vis << ',' << r.D_text << ',' << r.avg;
  return os.str();
}

}  // namespace

RunResult run_training(const RunConfig& cfg, std::ostream* progress) {
  Trainer trainer(cfg);
  RunResult result;
  result.run_dir = create_run_dir(cfg.out_dir);
  const fs::path dir(result.run_dir);
  const std::string run_id = dir.filename().string();
  fs::create_directories(dir / "checkpoints");

  {
    nlohmann::ordered_json manifest;
    manifest["schema"] = 1;
    manifest["run"] = run_id;
    manifest["seed"] = cfg.seed;
    manifest["git_describe"] = git_describe();
    manifest["world"] = trainer.world()->name;
    auto toggles = nlohmann::ordered_json::object();
    toggles["instant"] = cfg.rewards.instant;
    toggles["sequence"] = cfg.rewards.sequence;
    toggles["world_model"] = cfg.rewards.world_model;
    toggles["visual"] = cfg.rewards.visual;
    toggles["intent_alignment"] = cfg.rewards.intent_alignment;
    manifest["toggles"] = toggles;
    manifest["config"] = nlohmann::ordered_json::parse(config_to_json(cfg));
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  }
  save_policy((dir / "checkpoints" / "policy_init.ckpt").string(), trainer.policy(), trainer.optimizer());

  std::ofstream metrics(dir / "metrics.csv");
  std::ofstream traj(dir / "trajectories.jsonl");
  if (!metrics || !traj) throw Error(ErrorCode::Io, "cannot create log files in '" + result.run_dir + "'");
  metrics << metrics_csv_header() << '\n';

  for (int ep = 1; ep <= cfg.episodes; ++ep) {
    const auto log = trainer.run_episode();
    metrics << metrics_csv_row(log) << '\n' << std::flush;
    for (const auto& s : trainer.last_buffer().samples) traj << sample_to_json(s, run_id).dump() << '\n';
    traj.flush();
    result.logs.push_back(log);
    if (ep % cfg.checkpoint_every == 0 || ep == cfg.episodes) {
      char name[64];
      std::snprintf(name, sizeof(name), "policy_e%04d.ckpt", ep);
      save_policy((dir / "checkpoints" / name).string(), trainer.policy(), trainer.optimizer());
      std::snprintf(name, sizeof(name), "world_model_e%04d.ckpt", ep);
      save_world_model((dir / "checkpoints" / name).string(), trainer.world_model());
    }
    if (progress) {
      *progress << "episode " << ep << "/" << cfg.episodes << " format " << std::fixed << std::setprecision(3)
                << log.format_rate << " reward " << log.reward_mean << " wm_loss " << log.wm_loss << std::endl;
    }
  }
  save_policy((dir / "policy_final.ckpt").string(), trainer.policy(), trainer.optimizer());
  save_world_model((dir / "world_model_final.ckpt").string(), trainer.world_model());

  std::ostringstream csv;
  csv << eval_csv_header() << '\n';
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& [name, pol] : {std::pair<std::string, const Policy*>{"init", &trainer.reference()},
                                  std::pair<std::string, const Policy*>{"final", &trainer.policy()}}) {
    for (double t : cfg.eval.temperatures) {
      const auto r = evaluate(*pol, cfg, t);
      csv << eval_csv_row(name, t, r) << '\n';
      rows.push_back({{"checkpoint", name},    {"temperature", t},   {"correct_format", r.correct_format},
                      {"d_seq_vis", r.d_vis},  {"d_seq_text", r.d_text}, {"d_grp_vis", r.D_vis},
                      {"d_grp_text", r.D_text}, {"avg_diversity", r.avg}});
    }
  }
  write_text(dir / "eval.csv", csv.str());
  write_text(dir / "eval.json", rows.dump(2) + "\n");
  return result;
}

}  // namespace deskrl
