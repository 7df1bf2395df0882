#include <iostream>

#include <CLI11.hpp>

#include "deskrl/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Desktop exploration agent: GRPO training, evaluation and distillation."};
  app.require_subcommand(1);

  deskrl::TrainOptions train;
  auto* t = app.add_subcommand("train", "Run one training job into a fresh run directory");
  t->add_option("--config", train.config_path, "YAML run config");
  t->add_option("--seed", train.seed, "Master seed");
  t->add_option("--out", train.out_dir, "Parent directory for run_NNNN");
  t->add_option("--episodes", train.episodes, "Episode count");
  t->add_option("--toggle", train.toggles, "Reward term switch, e.g. world_model=off (repeatable)");
  t->add_flag("--quiet", train.quiet, "No per-episode progress on stderr");

  deskrl::EvalOptions eval;
  auto* e = app.add_subcommand("eval", "Evaluate a policy checkpoint");
  e->add_option("--checkpoint", eval.checkpoint, "Policy checkpoint")->required()->check(CLI::ExistingFile);
  e->add_option("--config", eval.config_path, "YAML run config (shapes must match the checkpoint)");
  e->add_option("--seed", eval.seed, "Master seed for evaluation episodes");
  e->add_option("--temperature", eval.temperatures, "Sampling temperature (repeatable)");
  e->add_option("--out", eval.out_csv, "Also write the table to this CSV file");

  deskrl::DistillOptions distill;
  auto* d = app.add_subcommand("distill", "Filter a run's trajectories and fine-tune a fresh policy on them");
  d->add_option("--run", distill.run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  d->add_option("--min-episode", distill.filter.min_episode, "Earliest episode kept")->capture_default_str();
  d->add_flag("!--no-format-filter", distill.filter.require_format, "Keep malformed replies");
  d->add_flag("!--no-advantage-filter", distill.filter.require_positive_advantage, "Keep non-positive advantages");
  d->add_flag("!--no-intent-check", distill.filter.intent_check_enabled, "Skip the intent clarity check");
  d->add_option("--accept-list", distill.accept_list_path, "File of accepted sample ids")->check(CLI::ExistingFile);
  d->add_option("--sft-epochs", distill.sft.epochs, "Fine-tuning epochs")->capture_default_str();
  d->add_option("--sft-lr", distill.sft.lr, "Initial fine-tuning step size")->capture_default_str();

  deskrl::ReportOptions report;
  auto* r = app.add_subcommand("report", "Merge eval tables and reward curves from several runs");
  r->add_option("runs", report.run_dirs, "Run directories")->required();
  r->add_option("--out", report.out_csv, "Write the merged eval table here");
  r->add_option("--curves", report.curves_csv, "Write merged per-episode metrics here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return deskrl::kExitUsage;
  }

  if (t->parsed()) return deskrl::cmd_train(train, std::cout, std::cerr);
  if (e->parsed()) return deskrl::cmd_eval(eval, std::cout, std::cerr);
  if (d->parsed()) return deskrl::cmd_distill(distill, std::cout, std::cerr);
  return deskrl::cmd_report(report, std::cout, std::cerr);
}
