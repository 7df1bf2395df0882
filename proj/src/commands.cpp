#include "deskrl/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "deskrl/checkpoint.hpp"
#include "deskrl/rollout.hpp"

namespace deskrl {

namespace fs = std::filesystem;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::WorldFormat:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

namespace {

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + p.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + p.string() + "'");
  out << text;
}

std::string next_free(const fs::path& parent, const char* prefix) {
  for (int i = 1; i < 100000; ++i) {
    std::ostringstream name;
    name << prefix << std::setw(4) << std::setfill('0') << i;
    const auto p = parent / name.str();
    if (!fs::exists(p) && fs::create_directory(p)) return p.string();
  }
  throw Error(ErrorCode::Io, "no free directory under '" + parent.string() + "'");
}

}  // namespace

std::string eval_table_header() {
  return "checkpoint,temperature,correct_format,d_seq_vis,d_seq_text,d_grp_vis,d_grp_text,avg_diversity";
}

std::string eval_table_row(const std::string& label, double temperature, const DiversityReport& r) {
  std::ostringstream os;
  os << std::setprecision(6) << label << ',' << temperature << ',' << r.correct_format << ',' << r.d_vis << ','
     << r.d_text << ',' << r.D_vis << ',' << r.D_text << ',' << r.avg;
  return os.str();
}

RunConfig resolve_train_config(const TrainOptions& opt) {
  RunConfig cfg = opt.config_path ? load_config_file(*opt.config_path) : RunConfig{};
  apply_env_overrides(cfg);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.out_dir) cfg.out_dir = *opt.out_dir;
  if (opt.episodes) cfg.episodes = *opt.episodes;
  for (const auto& t : opt.toggles) apply_toggle(cfg, t);
  cfg.validate();
  return cfg;
}

RunConfig manifest_config(const std::string& run_dir) {
  const auto path = fs::path(run_dir) / "manifest.json";
  if (!fs::exists(path)) throw Error(ErrorCode::Io, "'" + run_dir + "' is not a run directory (no manifest.json)");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, "malformed manifest '" + path.string() + "': " + e.what());
  }
  if (!manifest.contains("config")) throw Error(ErrorCode::Io, "manifest '" + path.string() + "' has no config");
  return load_config(manifest["config"].dump(), path.string());
}

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = resolve_train_config(opt);
    const auto result = run_training(cfg, opt.quiet ? nullptr : &err);
    out << result.run_dir << "\n";
    return kExitOk;
  });
}

int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = opt.config_path ? load_config_file(*opt.config_path) : RunConfig{};
    apply_env_overrides(cfg);
    if (opt.seed) cfg.seed = *opt.seed;
    if (!opt.temperatures.empty()) cfg.eval.temperatures = opt.temperatures;
    cfg.validate();
    const auto world = resolve_world(cfg);
    const auto ck = load_policy(opt.checkpoint, policy_shape(cfg, *world));

    std::ostringstream table;
    table << eval_table_header() << '\n';
    const std::string label = fs::path(opt.checkpoint).filename().string();
    for (double t : cfg.eval.temperatures) table << eval_table_row(label, t, evaluate(ck.policy, cfg, t)) << '\n';
    out << table.str();
    if (opt.out_csv) write_text(*opt.out_csv, table.str());
    return kExitOk;
  });
}

int cmd_distill(const DistillOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = manifest_config(opt.run_dir);
    FilterConfig filter = opt.filter;
    if (opt.accept_list_path) filter.accept_list = read_accept_list(*opt.accept_list_path);

    const auto records = read_trajectories(opt.run_dir);
    FilterReport report;
    const auto set = filter_stream(records, filter, &report);

    nlohmann::ordered_json rep;
    rep["total"] = report.total;
    rep["kept"] = report.kept;
    auto rejected = nlohmann::ordered_json::object();
    for (int p = 0; p < kNumPredicates; ++p) {
      rejected[std::string(to_string(static_cast<Predicate>(p)))] = report.rejected[static_cast<std::size_t>(p)];
    }
    rep["rejected"] = rejected;
    rep["filter"] = {{"min_episode", filter.min_episode},
                     {"require_format", filter.require_format},
                     {"require_positive_advantage", filter.require_positive_advantage},
                     {"intent_check_enabled", filter.intent_check_enabled},
                     {"accept_list", opt.accept_list_path ? *opt.accept_list_path : std::string()}};

    if (set.pairs.empty()) {
      std::ostringstream msg;
      msg << "no samples survive filtering (" << report.total << " total;";
      for (int p = 0; p < kNumPredicates; ++p) {
        msg << ' ' << to_string(static_cast<Predicate>(p)) << " rejected "
            << report.rejected[static_cast<std::size_t>(p)];
      }
      msg << ")";
      throw Error(ErrorCode::EmptyDataset, msg.str());
    }

    const auto world = resolve_world(cfg);
    const auto shape = policy_shape(cfg, *world);
    auto fresh = load_policy((fs::path(opt.run_dir) / "checkpoints" / "policy_init.ckpt").string(), shape);
    const auto losses = sft_train(fresh.policy, set, opt.sft);
    rep["sft"] = {{"epochs_run", losses.size() - 1}, {"loss_first", losses.front()}, {"loss_last", losses.back()}};

    const auto dir = fs::path(next_free(opt.run_dir, "distill_"));
    save_policy((dir / "distilled.ckpt").string(), fresh.policy, AdamState{});

    std::ostringstream set_lines;
    for (const auto& p : set.pairs) {
      nlohmann::ordered_json j;
      j["run"] = p.run;
      j["id"] = p.id;
      j["episode"] = p.episode;
      j["env"] = p.env;
      j["step"] = p.step;
      j["intent"] = p.intent;
      j["choice"] = {p.choice.kind, p.choice.cx, p.choice.cy, p.choice.payload, p.choice.intent, p.choice.slot};
      j["advantage"] = p.advantage;
      set_lines << j.dump() << '\n';
    }
    write_text(dir / "distill_set.jsonl", set_lines.str());

    std::ostringstream table;
    table << eval_table_header() << '\n';
    const auto final_path = fs::path(opt.run_dir) / "policy_final.ckpt";
    for (double t : cfg.eval.temperatures) {
      table << eval_table_row("distilled", t, evaluate(fresh.policy, cfg, t)) << '\n';
      if (fs::exists(final_path)) {
        const auto rl = load_policy(final_path.string(), shape);
        table << eval_table_row("rl_final", t, evaluate(rl.policy, cfg, t)) << '\n';
      }
    }
    write_text(dir / "eval.csv", table.str());
    write_text(dir / "filter_report.json", rep.dump(2) + "\n");
    out << dir.string() << '\n' << rep.dump(2) << '\n' << table.str();
    return kExitOk;
  });
}

int cmd_report(const ReportOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.run_dirs.empty()) throw Error(ErrorCode::ConfigInvalid, "report needs at least one run directory");
    std::ostringstream table;
    std::ostringstream curves;
    table << "run,checkpoint,temperature,correct_format,d_seq_vis,d_seq_text,d_grp_vis,d_grp_text,avg_diversity\n";
    bool curves_header = false;
    for (const auto& run : opt.run_dirs) {
      const fs::path dir(run);
      const auto name = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
      const auto eval_path = dir / "eval.csv";
      if (!fs::exists(eval_path)) throw Error(ErrorCode::Io, "run '" + run + "' has no eval.csv");
      std::istringstream eval(read_text(eval_path));
      std::string line;
      std::getline(eval, line);  // header
      while (std::getline(eval, line)) {
        if (!line.empty()) table << name << ',' << line << '\n';
      }
      const auto metrics_path = dir / "metrics.csv";
      if (!fs::exists(metrics_path)) throw Error(ErrorCode::Io, "run '" + run + "' has no metrics.csv");
      std::istringstream metrics(read_text(metrics_path));
      std::getline(metrics, line);
      if (!curves_header) {
        curves << "run," << line << '\n';
        curves_header = true;
      }
      while (std::getline(metrics, line)) {
        if (!line.empty()) curves << name << ',' << line << '\n';
      }
    }
    out << table.str();
    if (opt.out_csv) write_text(*opt.out_csv, table.str());
    if (opt.curves_csv) write_text(*opt.curves_csv, curves.str());
    return kExitOk;
  });
}

}  // namespace deskrl
