#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "deskrl/config.hpp"
#include "deskrl/distill.hpp"
#include "deskrl/metrics.hpp"

namespace deskrl {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitConfig = 2, kExitRuntime = 3 };

/// Maps a library error to the CLI exit code.
int exit_code_for(const Error& e);

struct TrainOptions {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> episodes;
  std::vector<std::string> toggles;  // name=on|off
  bool quiet = false;
};

struct EvalOptions {
  std::string checkpoint;
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::vector<double> temperatures;  // empty: use the config's list
  std::optional<std::string> out_csv;
};

struct DistillOptions {
  std::string run_dir;
  FilterConfig filter;
  std::optional<std::string> accept_list_path;
  SftConfig sft;
};

struct ReportOptions {
  std::vector<std::string> run_dirs;
  std::optional<std::string> out_csv;
  std::optional<std::string> curves_csv;
};

/// Resolves file, environment and flag settings into one validated config.
RunConfig resolve_train_config(const TrainOptions& opt);

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err);
int cmd_distill(const DistillOptions& opt, std::ostream& out, std::ostream& err);
int cmd_report(const ReportOptions& opt, std::ostream& out, std::ostream& err);

/// Table-1 style column set shared by eval and report output.
std::string eval_table_header();
std::string eval_table_row(const std::string& label, double temperature, const DiversityReport& r);

/// Run config recorded in <run_dir>/manifest.json.
RunConfig manifest_config(const std::string& run_dir);

}  // namespace deskrl
